# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled search kernels; semantics match ``_kernels_py`` exactly."""

from libc.stdlib cimport malloc, calloc, free

cdef enum:
    FOUND = 1
    INFEASIBLE = 0
    BUDGET = -1


cdef struct CoverState:
    int n_tsets
    int n_blocks
    int per_block
    int lam
    int max_blocks
    long long node_limit
    long long nodes
    int deficit
    int fix_first
    int *block_ts      # n_blocks * per_block
    int *ts_off        # n_tsets + 1 offsets into ts_blk
    int *ts_blk
    int *cov
    int *forb
    int *sol
    int sol_len


cdef inline void _add(CoverState *st, int b) nogil:
    cdef int j, ts
    for j in range(st.per_block):
        ts = st.block_ts[b * st.per_block + j]
        if st.cov[ts] < st.lam:
            st.deficit -= 1
        st.cov[ts] += 1


cdef inline void _remove(CoverState *st, int b) nogil:
    cdef int j, ts
    for j in range(st.per_block):
        ts = st.block_ts[b * st.per_block + j]
        st.cov[ts] -= 1
        if st.cov[ts] < st.lam:
            st.deficit += 1


cdef int _rec(CoverState *st, int depth, int *tried_buf) nogil:
    cdef int remaining, best, low, i, b, r, result, n_tried, idx
    if st.deficit == 0:
        return FOUND
    remaining = st.max_blocks - depth
    if <long long>remaining * st.per_block < st.deficit:
        return INFEASIBLE
    st.nodes += 1
    if st.nodes > st.node_limit:
        return BUDGET
    best = -1
    low = st.lam
    for i in range(st.n_tsets):
        if st.cov[i] < low:
            low = st.cov[i]
            best = i
            if low == 0:
                break
    if st.lam - low > remaining:
        return INFEASIBLE
    # each depth owns a slice of tried_buf of length n_blocks
    cdef int *tried = tried_buf + depth * st.n_blocks
    n_tried = 0
    result = INFEASIBLE
    for idx in range(st.ts_off[best], st.ts_off[best + 1]):
        b = st.ts_blk[idx]
        if st.forb[b]:
            continue
        _add(st, b)
        st.sol[st.sol_len] = b
        st.sol_len += 1
        r = _rec(st, depth + 1, tried_buf)
        if r == FOUND:
            return FOUND
        st.sol_len -= 1
        _remove(st, b)
        if r == BUDGET:
            result = BUDGET
            break
        st.forb[b] += 1
        tried[n_tried] = b
        n_tried += 1
        if depth == 0 and st.fix_first:
            break
    for i in range(n_tried):
        st.forb[tried[i]] -= 1
    return result


def cover_search(int n_tsets, block_tsets, tset_blocks, int lam, int max_blocks,
                 long long node_limit, bint fix_first=True):
    """See ``_kernels_py.cover_search``."""
    cdef CoverState st
    cdef int i, j, n_blocks = len(block_tsets)
    cdef int total = 0
    cdef int *tried_buf = NULL
    cdef int status
    st.n_tsets = n_tsets
    st.n_blocks = n_blocks
    st.per_block = len(block_tsets[0]) if n_blocks else 0
    st.lam = lam
    st.max_blocks = max_blocks
    st.node_limit = node_limit
    st.nodes = 0
    st.deficit = lam * n_tsets
    st.fix_first = fix_first
    st.sol_len = 0
    for i in range(n_tsets):
        total += len(tset_blocks[i])
    st.block_ts = <int *>malloc(sizeof(int) * max(1, n_blocks * st.per_block))
    st.ts_off = <int *>malloc(sizeof(int) * (n_tsets + 1))
    st.ts_blk = <int *>malloc(sizeof(int) * max(1, total))
    st.cov = <int *>calloc(max(1, n_tsets), sizeof(int))
    st.forb = <int *>calloc(max(1, n_blocks), sizeof(int))
    st.sol = <int *>malloc(sizeof(int) * (max_blocks + 1))
    tried_buf = <int *>malloc(sizeof(int) * (max_blocks + 1) * max(1, n_blocks))
    try:
        if (st.block_ts == NULL or st.ts_off == NULL or st.ts_blk == NULL or st.cov == NULL
                or st.forb == NULL or st.sol == NULL or tried_buf == NULL):
            raise MemoryError()
        for i in range(n_blocks):
            row = block_tsets[i]
            for j in range(st.per_block):
                st.block_ts[i * st.per_block + j] = row[j]
        total = 0
        for i in range(n_tsets):
            st.ts_off[i] = total
            for b in tset_blocks[i]:
                st.ts_blk[total] = b
                total += 1
        st.ts_off[n_tsets] = total
        with nogil:
            status = _rec(&st, 0, tried_buf)
        sol = [st.sol[i] for i in range(st.sol_len)] if status == FOUND else []
        return status, st.nodes, sol
    finally:
        free(st.block_ts)
        free(st.ts_off)
        free(st.ts_blk)
        free(st.cov)
        free(st.forb)
        free(st.sol)
        free(tried_buf)


cdef struct IndepState:
    int nv
    int n
    int *adj
    int *deg
    int best
    long long best_mask


cdef void _indep(IndepState *st, int start, int size, long long mask) nogil:
    cdef int u, w, ok
    if size > st.best:
        st.best = size
        st.best_mask = mask
    if size + (st.nv - start) <= st.best:
        return
    for u in range(start, st.nv):
        if st.deg[u] >= st.n:
            continue
        ok = 1
        for w in range(st.nv):
            if (mask >> w) & 1 and st.deg[w] + st.adj[u * st.nv + w] >= st.n:
                ok = 0
                break
        if not ok:
            continue
        for w in range(st.nv):
            st.deg[w] += st.adj[u * st.nv + w]
        _indep(st, u + 1, size + 1, mask | (1LL << u))
        for w in range(st.nv):
            st.deg[w] -= st.adj[u * st.nv + w]


def max_n_independent(adj, int n):
    """See ``_kernels_py.max_n_independent``."""
    cdef IndepState st
    cdef int i, j, nv = len(adj)
    if nv > 62:
        raise ValueError("too many vertices")
    st.nv = nv
    st.n = n
    st.best = 0
    st.best_mask = 0
    st.adj = <int *>malloc(sizeof(int) * max(1, nv * nv))
    st.deg = <int *>calloc(max(1, nv), sizeof(int))
    try:
        if st.adj == NULL or st.deg == NULL:
            raise MemoryError()
        for i in range(nv):
            for j in range(nv):
                st.adj[i * nv + j] = adj[i][j]
        with nogil:
            _indep(&st, 0, 0, 0)
        return st.best, st.best_mask
    finally:
        free(st.adj)
        free(st.deg)

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coverbound.classic import Params, schonheim
from coverbound.exactmath import binom, ceil_rat
from coverbound.spectral import (
    CBError,
    CBParams,
    ContextError,
    a_coefficients,
    best_smalld,
    build_context,
    cb_bound,
    cb_value,
    context_from_b,
    dbig_params,
    iterated_schonheim,
    smalld_params,
    theorem_dbig,
    theorem_main,
    theorem_smalld,
)


def sch_provider(p: Params) -> int:
    return schonheim(p)


def ctx_for(v, k, t, s=1, lam=1):
    return build_context(Params(v, k, t, lam), s, sch_provider)


@st.composite
def contexts(draw):
    t = draw(st.integers(2, 6))
    k = draw(st.integers(t + 1, t + 25))
    v = draw(st.integers(k + 1, k + 60))
    lam = draw(st.integers(1, 3))
    s = draw(st.integers(1, t // 2))
    return ctx_for(v, k, t, s, lam)


def test_context_m6_family():
    ctx = ctx_for(148, 32, 5, s=2)
    assert ctx.b_sequence() == [146, 30, 6]
    assert ctx.a == (6, 24, 92)
    assert ctx.d == 0
    assert ctx.hypotheses_hold


def test_context_19_9_3():
    ctx = ctx_for(19, 9, 3)
    assert (ctx.b[1], ctx.b[2], ctx.a_s, ctx.d) == (7, 3, 4, 2)


def test_context_44_20_3():
    ctx = ctx_for(44, 20, 3)
    assert (ctx.b[1], ctx.b[2], ctx.a_s, ctx.d, ctx.d_prime) == (7, 3, 4, 4, 23)


@pytest.mark.parametrize("key,s", [((10, 5, 3), 2), ((10, 5, 3), 0), ((10, 10, 3), 1), ((10, 3, 3), 1)])
def test_context_inapplicable(key, s):
    with pytest.raises(ContextError, match="context inapplicable"):
        ctx_for(*key, s=s)


def test_cb_examples():
    ctx = ctx_for(22, 10, 3)
    assert cb_bound(ctx, CBParams(Fraction(1), Fraction(0))) == 16
    assert cb_bound(ctx, CBParams(Fraction(1), Fraction(3, 10))) == 17
    assert cb_bound(ctx, CBParams(Fraction(0), Fraction(0))) == 0


def test_cb_preconditions():
    ctx = ctx_for(22, 10, 3)
    with pytest.raises(CBError, match="CB inapplicable"):
        cb_bound(ctx, CBParams(Fraction(1), Fraction(2, 3)))
    with pytest.raises(CBError, match="CB inapplicable"):
        cb_bound(ctx, CBParams(Fraction(1), Fraction(-1, 3)))
    with pytest.raises(CBError, match="CB inapplicable"):
        cb_bound(ctx, CBParams(Fraction(1, 2), Fraction(1, 5), beta_is_under_approx=True))


def test_theorem_main_examples():
    assert theorem_main(ctx_for(19, 9, 3)) == 16
    assert theorem_main(ctx_for(44, 20, 3)) is None
    assert theorem_main(ctx_for(148, 32, 5, s=2)) >= 3208


def test_theorem_dbig_examples():
    ctx = ctx_for(44, 20, 3)
    cb = dbig_params(ctx)
    assert (cb.alpha, cb.beta) == (Fraction(1, 2), Fraction(5, 48))
    assert cb_value(ctx, cb) == Fraction(6908, 428)
    assert theorem_dbig(ctx) == 17
    assert theorem_dbig(ctx_for(19, 9, 3)) is None


def test_theorem_dbig_needs_positive_a():
    b = {1: 5, 2: 5}
    ctx = context_from_b(Params(30, 10, 3), 1, b)
    assert ctx.a_s == 0
    assert theorem_dbig(ctx) is None


def test_theorem_smalld_examples():
    ctx = ctx_for(22, 10, 3)
    assert ctx.d == 0
    params = smalld_params(ctx)
    assert params["a"].beta == Fraction(6, 20)
    assert theorem_smalld(ctx) == 17
    ctx = ctx_for(26, 12, 3)
    assert ctx.d == 2
    a = smalld_params(ctx)["a"]
    assert (a.alpha, a.beta) == (Fraction(9, 10), Fraction(3, 14))
    assert cb_value(ctx, a) == Fraction(5187, 323)
    assert best_smalld(ctx) == (17, "a")
    ctx = ctx_for(21, 10, 3)
    assert ctx.d == 3
    assert "b" not in smalld_params(ctx)
    assert theorem_smalld(ctx) == 15
    assert theorem_main(ctx) == 16


@settings(max_examples=300)
@given(contexts())
def test_context_identities(ctx):
    p, s = ctx.params, ctx.s
    assert ctx.a == a_coefficients(ctx.b, s)
    off = sum(binom(s, i) * binom(p.v - s, s - i) * ctx.b[2 * s - i] for i in range(s))
    assert ctx.d == ctx.b_s * (binom(p.k, s) - 1) - off
    assert ctx.d_prime == ctx.d + binom(p.k, s) - 1
    if ctx.hyp_ii:
        assert ctx.d >= 0
        if p.v >= s * p.k:
            assert ctx.hyp_iii
    if ctx.hypotheses_hold:
        assert ctx.b_s > ctx.a_s


@settings(max_examples=300)
@given(contexts())
def test_emitted_weights_are_admissible(ctx):
    cbs = list(smalld_params(ctx).values())
    dbig = dbig_params(ctx)
    if dbig is not None:
        cbs.append(dbig)
    for cb in cbs:
        assert cb.alpha >= 2 * cb.beta > 0


@settings(max_examples=300)
@given(contexts(), st.fractions(min_value=0, max_value=Fraction(1, 2)), st.fractions(min_value=0, max_value=Fraction(1, 100)))
def test_cb_nondecreasing_in_beta(ctx, beta, eps):
    if not ctx.b_s_small or beta + eps > Fraction(1, 2):
        return
    lo = cb_value(ctx, CBParams(Fraction(1), beta))
    hi = cb_value(ctx, CBParams(Fraction(1), beta + eps))
    assert lo <= hi


@settings(max_examples=300)
@given(contexts(), st.fractions(min_value=0, max_value=1), st.fractions(min_value=0, max_value=Fraction(1, 2)))
def test_cb_dominated_by_iterated_schonheim(ctx, alpha, frac):
    beta = alpha * frac
    if not ctx.b_s + 1 > beta * ctx.binom_ks:
        return
    value = cb_value(ctx, CBParams(alpha, beta))
    assert ceil_rat(value) <= iterated_schonheim(ctx.params, ctx.s, ctx.b_s + 1)


@settings(max_examples=300)
@given(contexts())
def test_theorem_main_at_least_counting_ratio(ctx):
    # C(k,s)(b+1) >= b(C(k,s)+1) exactly when b <= C(k,s)
    main = theorem_main(ctx)
    if main is not None and ctx.b_s <= ctx.binom_ks:
        assert main >= ceil_rat(Fraction(ctx.binom_vs * ctx.b_s, ctx.binom_ks))


def test_theorem_main_can_trail_iterated_step():
    # with b_s > C(k,s) the single-ratio form loses to the nested ceilings
    ctx = build_context(Params(4, 3, 2, 3), 1, sch_provider)
    assert theorem_main(ctx) == 6
    assert iterated_schonheim(ctx.params, 1, ctx.b_s) == 7


def test_case_c_uses_certified_root():
    found = 0
    for k in range(4, 30):
        for v in range(k + 1, 4 * k):
            ctx = ctx_for(v, k, 3)
            cb = smalld_params(ctx).get("c")
            if cb is None:
                continue
            found += 1
            assert cb.beta_is_under_approx and cb.alpha == 1
            a, d, dp = ctx.a_s, ctx.d, ctx.d_prime
            exact_sq = Fraction(d * (a + 2), (a + 1) * (a - d))
            root = cb.beta + Fraction(d * (dp + 1), 2 * (a + 1) * (a - d))
            assert root * root <= exact_sq
    assert found > 0

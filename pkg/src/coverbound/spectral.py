"""Higher-incidence-matrix bounds.

For a covering with s-incidence matrix ``A``, ``A A^T`` splits into a
positive semidefinite part built from chosen lower bounds ``b_s..b_2s`` and
a remainder whose diagonally dominant principal submatrices certify rank.
:func:`build_context` computes every quantity that split depends on; the
theorem functions turn it into block-count bounds through the parametric
form :func:`cb_value`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

from .classic import Params, schonheim
from .exactmath import DEFAULT_SQRT_SCALE, binom, ceil_div, ceil_rat, sqrt_lower

BoundProvider = Callable[[Params], int]


class ContextError(ValueError):
    pass


class CBError(ValueError):
    pass


@dataclass(frozen=True)
class SpectralContext:
    params: Params
    s: int
    b: Dict[int, int]  # i -> b_i for i in s..2s
    a: Tuple[int, ...]  # a_0..a_s
    d: int
    d_prime: int
    binom_vs: int
    binom_ks: int
    hyp_shape: bool
    hyp_i: bool
    hyp_ii: bool
    hyp_iii: bool
    b_s_small: bool

    @property
    def b_s(self) -> int:
        return self.b[self.s]

    @property
    def a_s(self) -> int:
        return self.a[self.s]

    @property
    def hypotheses_hold(self) -> bool:
        return self.hyp_shape and self.hyp_i and self.hyp_ii and self.hyp_iii

    def b_sequence(self) -> List[int]:
        return [self.b[i] for i in range(self.s, 2 * self.s + 1)]


@dataclass(frozen=True)
class CBParams:
    alpha: Fraction
    beta: Fraction
    beta_is_under_approx: bool = False


def a_coefficients(b: Dict[int, int], s: int) -> Tuple[int, ...]:
    """a_j = sum_{i=0}^{j} (-1)^(i+j) C(j, i) b_{2s-i} for j = 0..s."""
    out = []
    for j in range(s + 1):
        total = 0
        for i in range(j + 1):
            sign = -1 if (i + j) % 2 else 1
            total += sign * binom(j, i) * b[2 * s - i]
        out.append(total)
    return tuple(out)


def d_value(p: Params, s: int, b: Dict[int, int]) -> int:
    """Row-sum excess d of the remainder matrix on rows with b(X) = b_s."""
    off = sum(binom(s, i) * binom(p.v - s, s - i) * b[2 * s - i] for i in range(s))
    return b[s] * (binom(p.k, s) - 1) - off


def build_context(p: Params, s: int, bound_provider: BoundProvider) -> SpectralContext:
    """Evaluate the setup quantities for ``(p, s)``.

    ``b_i`` is ``bound_provider(p.derived(i))`` for i = s..2s.  The
    upper constraints ``b_i <= C(v-i, k-i, t-i)`` cannot be checked and are
    assumed whenever the provider only returns valid lower bounds.
    """
    if not (1 <= s <= p.t // 2) or not (p.t < p.k < p.v):
        raise ContextError("context inapplicable")
    b = {i: bound_provider(p.derived(i)) for i in range(s, 2 * s + 1)}
    return context_from_b(p, s, b)


def context_from_b(p: Params, s: int, b: Dict[int, int]) -> SpectralContext:
    if not (1 <= s <= p.t // 2) or not (p.t < p.k < p.v):
        raise ContextError("context inapplicable")
    a = a_coefficients(b, s)
    d = d_value(p, s, b)
    bks = binom(p.k, s)
    hyp_shape = all(b[i] >= 1 for i in b)
    hyp_i = b[2 * s] >= schonheim(p.derived(2 * s))
    hyp_ii = all(
        ceil_div((p.v - i) * b[i + 1], p.k - i) <= b[i] for i in range(s, 2 * s)
    )
    hyp_iii = all(x >= 0 for x in a)
    return SpectralContext(
        params=p,
        s=s,
        b=b,
        a=a,
        d=d,
        d_prime=d + bks - 1,
        binom_vs=binom(p.v, s),
        binom_ks=bks,
        hyp_shape=hyp_shape,
        hyp_i=hyp_i,
        hyp_ii=hyp_ii,
        hyp_iii=hyp_iii,
        b_s_small=b[s] < bks,
    )


def cb_value(ctx: SpectralContext, cb: CBParams) -> Fraction:
    """The exact rational CB(alpha, beta) before rounding up."""
    alpha, beta = Fraction(cb.alpha), Fraction(cb.beta)
    if beta < 0 or alpha < 2 * beta:
        raise CBError("CB inapplicable")
    if cb.beta_is_under_approx and not (alpha == 1 and ctx.b_s_small):
        raise CBError("CB inapplicable")
    gamma = alpha - beta
    num = ctx.b_s * gamma * ctx.binom_vs + alpha * ctx.binom_vs
    den = gamma * ctx.binom_ks + 1
    return num / den


def cb_bound(ctx: SpectralContext, cb: CBParams) -> int:
    """ceil(CB(alpha, beta)) in exact arithmetic.

    When ``beta`` is an under-approximation the result is still a valid
    bound: with alpha = 1 and b_s < C(k, s) the CB value is nondecreasing
    in beta (its derivative in gamma = alpha - beta has the sign of
    b_s - C(k, s)), and any smaller nonnegative beta also satisfies the
    counting hypothesis the CB form is derived from.
    """
    return ceil_rat(cb_value(ctx, cb))


def theorem_main(ctx: SpectralContext) -> Optional[int]:
    if not ctx.hypotheses_hold or ctx.d >= ctx.a_s:
        return None
    return cb_bound(ctx, CBParams(Fraction(1), Fraction(0)))


def dbig_params(ctx: SpectralContext) -> Optional[CBParams]:
    a, d, bks = ctx.a_s, ctx.d, ctx.binom_ks
    if not (ctx.hypotheses_hold and ctx.b_s_small and d >= a >= 1):
        return None
    alpha = Fraction(a + 1, 2 * (d + 1))
    beta = Fraction(a + 1, 2 * (d + bks))
    # alpha >= 2 beta needs C(k,s) >= d + 2; otherwise weaken beta, which
    # keeps the counting hypothesis true.
    beta = min(beta, alpha / 2)
    return CBParams(alpha, beta)


def theorem_dbig(ctx: SpectralContext) -> Optional[int]:
    cb = dbig_params(ctx)
    return None if cb is None else cb_bound(ctx, cb)


def smalld_params(ctx: SpectralContext, sqrt_scale: int = DEFAULT_SQRT_SCALE) -> Dict[str, CBParams]:
    """Applicable (alpha, beta) pairs for the d < a_s improvements, by case."""
    a, d, dp = ctx.a_s, ctx.d, ctx.d_prime
    if not (ctx.hypotheses_hold and ctx.b_s_small and d < a):
        return {}
    out: Dict[str, CBParams] = {}
    out["a"] = CBParams(
        Fraction(1) - Fraction(d * d, 2 * a * (a + 1)),
        Fraction(a + 2, 2 * (dp + 1)),
    )
    if 2 * d >= a and d * dp < a * (a + 1):
        out["b"] = CBParams(Fraction(1), Fraction(1) - Fraction(d * dp, a * (a + 1)))
    if 2 * d < a and d * (dp + 1) ** 2 < 4 * (a + 1) * (a + 2) * (a - d):
        root = sqrt_lower(Fraction(d * (a + 2), (a + 1) * (a - d)), sqrt_scale)
        beta = root - Fraction(d * (dp + 1), 2 * (a + 1) * (a - d))
        # d = 0 gives beta = 0, which is just the unweighted bound
        if beta > 0:
            out["c"] = CBParams(Fraction(1), beta, beta_is_under_approx=True)
    return out


def smalld_cases(ctx: SpectralContext, sqrt_scale: int = DEFAULT_SQRT_SCALE) -> Dict[str, int]:
    return {case: cb_bound(ctx, cb) for case, cb in smalld_params(ctx, sqrt_scale).items()}


def theorem_smalld(ctx: SpectralContext, sqrt_scale: int = DEFAULT_SQRT_SCALE) -> Optional[int]:
    cases = smalld_cases(ctx, sqrt_scale)
    return max(cases.values()) if cases else None


def best_smalld(ctx: SpectralContext, sqrt_scale: int = DEFAULT_SQRT_SCALE) -> Optional[Tuple[int, str]]:
    """(value, case) of the strongest applicable case; ties go to the earlier case."""
    cases = smalld_cases(ctx, sqrt_scale)
    if not cases:
        return None
    case = max(sorted(cases), key=lambda c: (cases[c], -ord(c)))
    return cases[case], case


def iterated_schonheim(p: Params, s: int, start: int) -> int:
    """s applications of the one-step bound to ``start`` along (v-i, k-i)."""
    x = start
    for i in range(s - 1, -1, -1):
        x = ceil_div((p.v - i) * x, p.k - i)
    return x

"""Closed-form and series moments of simplex counts and Euler characteristic.

All formulas are for the Rips-Vietoris complex of a Poisson (or Binomial)
point process on the flat torus with max-norm balls, using the half-open
pairwise threshold 2*epsilon.  Combinatorial coefficients (Stirling numbers,
the c_n^d variance coefficients, the alpha_n/beta_n series coefficients) are
computed in exact rational arithmetic and converted to float only at final
evaluation, because the alternating factorial sums cancel catastrophically
in floating point.

Third and fourth central moments are assembled from overlap-pattern sums.
Each term pairs an exact combinatorial weight with an overlap integral: the
two-simplex integral has a closed form (j2_closed_form); larger patterns are
delegated to the Monte Carlo oracle in joracle.  The n = 3 and n = 4 weights
are derived by counting slot matchings of ordered vertex tuples directly
(choose shared slots on each simplex, contract pairs, then biject the
residual shared classes across pairs); each term carries lambda^M where M is
the number of distinct points in the pattern, which is forced by scaling
invariance and reproduces the known n = 2 covariance and the Poisson count
cumulants at k = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .joracle import JEstimate, OverlapPattern, j_oracle_mc
from .sampling import SeedSpec
from .torus import TorusSpec


@dataclass(frozen=True)
class ModelParams:
    lam: float
    spec: TorusSpec
    epsilon: float

    def __post_init__(self):
        if not (self.lam > 0.0 and math.isfinite(self.lam)):
            raise ValueError(f"lambda must be positive and finite, got {self.lam}")
        if not (0.0 < self.epsilon < self.spec.a / 4.0):
            raise ValueError(
                f"epsilon must lie in (0, a/4) = (0, {self.spec.a / 4.0}), "
                f"got {self.epsilon}")

    @property
    def x(self) -> float:
        """The recurring dimensionless intensity lambda*(2*epsilon)^d."""
        return self.lam * (2.0 * self.epsilon) ** self.spec.d


class MomentKind(Enum):
    MEAN = "mean"
    COVARIANCE = "covariance"
    VARIANCE = "variance"
    CENTRAL_MOMENT = "central_moment"


@dataclass(frozen=True)
class MomentValue:
    value: float
    kind: MomentKind
    order: int | None = None
    truncation: dict | None = None

    def __post_init__(self):
        if self.kind is MomentKind.VARIANCE and self.value < 0.0:
            raise ValueError(f"variance must be nonnegative, got {self.value}")


# ---------------------------------------------------------------------------
# Combinatorial machinery


@lru_cache(maxsize=None)
def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind S(n, k), exact."""
    if not (0 <= k <= n):
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    if n == 0:
        return 1 if k == 0 else 0
    if k == 0:
        return 0
    if k == n:
        return 1
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


def bell_polynomial(n: int, x: float) -> float:
    """B_n(x) = sum_k S(n,k) x^k with exact integer coefficients."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return float(sum(stirling2(n, k) * x ** k for k in range(n + 1)))


def bell_exponential(n: int, x: float, tol: float = 1e-16) -> float:
    """Dobinski-style evaluation B_n(x) = e^{-x} sum_k x^k k^n / k!."""
    total = 0.0
    term_count = max(40, int(abs(x)) * 4 + 40)
    for k in range(term_count):
        total += x ** k * k ** n / math.factorial(k)
    return math.exp(-x) * total


# ---------------------------------------------------------------------------
# First moments


def mean_Nk(params: ModelParams, k: int) -> MomentValue:
    """Expected number of (k-1)-simplices of the Poisson-process complex."""
    if k < 1:
        raise ValueError("k must be >= 1")
    d, a = params.spec.d, params.spec.a
    value = (params.lam * a ** d * params.x ** (k - 1) * k ** d
             / math.factorial(k))
    return MomentValue(value=value, kind=MomentKind.MEAN)


def mean_Nk_binomial(spec: TorusSpec, epsilon: float, n: int, k: int) -> MomentValue:
    """Expected (k-1)-simplex count for n independent uniform points."""
    if k < 0 or n < 0:
        raise ValueError("n and k must be >= 0")
    if k > n or k == 0:
        return MomentValue(value=0.0, kind=MomentKind.MEAN)
    d, a = spec.d, spec.a
    value = math.comb(n, k) * k ** d * (2.0 * epsilon / a) ** (d * (k - 1))
    return MomentValue(value=value, kind=MomentKind.MEAN)


def _chi_alternating_series(params: ModelParams) -> tuple[float, dict]:
    """chi mean as the alternating series over mean simplex counts."""
    total = 0.0
    small_streak = 0
    k = 0
    last = math.inf
    while small_streak < 3 and k < 10_000:
        k += 1
        term = (-1.0) ** (k + 1) * mean_Nk(params, k).value
        total += term
        if last != 0.0 and abs(term) <= 1e-14 * max(abs(total), 1.0):
            small_streak += 1
        else:
            small_streak = 0
        last = term
    return total, {"terms": k, "tail_estimate": abs(last)}


def mean_chi(params: ModelParams) -> MomentValue:
    """Expected Euler characteristic, closed Bell-polynomial form."""
    d, a = params.spec.d, params.spec.a
    x = params.x
    value = (a / (2.0 * params.epsilon)) ** d * math.exp(-x) * (
        -bell_polynomial(d, -x))
    series_value, trunc = _chi_alternating_series(params)
    trunc["alternating_series_value"] = series_value
    return MomentValue(value=value, kind=MomentKind.MEAN, truncation=trunc)


def mean_chi_binomial(spec: TorusSpec, epsilon: float, n: int) -> MomentValue:
    """Expected Euler characteristic for n uniform points (alternating sum)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    total = 0.0
    for k in range(1, n + 1):
        total += (-1.0) ** (k + 1) * mean_Nk_binomial(spec, epsilon, n, k).value
    return MomentValue(value=total, kind=MomentKind.MEAN)


# ---------------------------------------------------------------------------
# Two-simplex overlap integral and covariances


def j2_closed_form(m1: int, m2: int, m12: int, spec: TorusSpec,
                   epsilon: float) -> float:
    """Overlap integral of two simplices sharing m12 vertices.

    The simplices have m1 + m12 and m2 + m12 vertices; m1 and m2 are the
    private vertex counts.  Disjoint simplices (m12 = 0) factorize into a
    product of single-simplex integrals and are rejected here.
    """
    if m12 < 1:
        raise ValueError("m12 must be >= 1 (disjoint simplices factorize)")
    if m1 < 0 or m2 < 0:
        raise ValueError("m1 and m2 must be >= 0")
    d, a = spec.d, spec.a
    base = m1 + m2 + m12 + 2.0 * m1 * m2 / (m12 + 1.0)
    return base ** d * a ** d * (2.0 * epsilon) ** ((m1 + m2 + m12 - 1) * d)


def cov_Nk_Nl(params: ModelParams, k: int, l: int) -> MomentValue:
    """Covariance of the numbers of (k-1)- and (l-1)-simplices."""
    if k < 1 or l < 1:
        raise ValueError("k and l must be >= 1")
    k, l = max(k, l), min(k, l)
    d, a = params.spec.d, params.spec.a
    total = 0.0
    for i in range(1, l + 1):
        coeff = Fraction(1, math.factorial(i) * math.factorial(k - i)
                         * math.factorial(l - i))
        base = Fraction(k + l - i) + Fraction(2 * (k - i) * (l - i), i + 1)
        total += (params.lam * a ** d * params.x ** (k + l - i - 1)
                  * float(coeff) * float(base) ** d)
    kind = MomentKind.VARIANCE if k == l else MomentKind.COVARIANCE
    return MomentValue(value=total, kind=kind)


# ---------------------------------------------------------------------------
# Variance of the Euler characteristic


@lru_cache(maxsize=None)
def c_coefficient(n: int, d: int) -> Fraction:
    """Series coefficient c_n^d of the Euler-characteristic variance."""
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    total = Fraction(0)
    j_lo = -(-(n + 1) // 2)  # ceil((n+1)/2)
    for j in range(j_lo, n + 1):
        inner = Fraction(0)
        for i in range(n - j + 1, j + 1):
            base = Fraction(n) + Fraction(2 * (n - i) * (n - j), 1 + i + j - n)
            inner += (Fraction((-1) ** (i + j))
                      / (math.factorial(n - j) * math.factorial(n - i)
                         * math.factorial(i + j - n))) * base ** d
        diag_base = Fraction(n) + Fraction(2 * (n - j) ** 2, 1 + 2 * j - n)
        diag = (Fraction(1, math.factorial(n - j) ** 2
                         * math.factorial(2 * j - n)) * diag_base ** d)
        total += 2 * inner - diag
    return total


def var_chi_series(params: ModelParams, n_terms: int) -> MomentValue:
    """Euler-characteristic variance as a power series in lambda*(2eps)^d."""
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    d, a = params.spec.d, params.spec.a
    x = params.x
    pref = params.lam * a ** d
    # the partial sums cancel by many orders of magnitude around n ~ 2x, so
    # the series is accumulated in exact rationals and rounded once
    xf = Fraction(x)
    acc = Fraction(0)
    last = 0.0
    for n in range(1, n_terms + 1):
        term = c_coefficient(n, d) * xf ** (n - 1)
        acc += term
        last = float(term)
    total = pref * float(acc)
    # terms behave like |c_n^d| x^{n-1} with an e^x-type tail; report the
    # last included term scaled by a crude geometric continuation
    tail = abs(pref * last) * max(x / max(n_terms, 1), x) if n_terms else 0.0
    value = total
    trunc = {"terms": n_terms, "tail_estimate": abs(pref * last),
             "tail_geometric": tail}
    if value < 0.0:
        # heavily truncated alternating series can dip below zero; surface
        # the partial sum without asserting variance positivity
        return MomentValue(value=value, kind=MomentKind.CENTRAL_MOMENT,
                           order=2, truncation=trunc)
    return MomentValue(value=value, kind=MomentKind.VARIANCE, truncation=trunc)


def var_chi_1d(params: ModelParams) -> MomentValue:
    """Closed-form Euler-characteristic variance on the circle (d = 1)."""
    if params.spec.d != 1:
        raise ValueError("closed form requires d = 1")
    lam, eps, a = params.lam, params.epsilon, params.spec.a
    value = a * (lam * math.exp(-2.0 * lam * eps)
                 - 4.0 * lam ** 2 * eps * math.exp(-4.0 * lam * eps))
    return MomentValue(value=value, kind=MomentKind.VARIANCE)


@lru_cache(maxsize=None)
def alpha_beta_coeffs(n: int) -> tuple[Fraction, Fraction]:
    """Series coefficients (alpha_n, beta_n) with c_n^1 = alpha_n + beta_n.

    alpha_n is the coefficient of x^n in -x e^{-x} + 2x e^{-2x}; beta_n is
    the coefficient of x^n in 2x e^{-x} - 2(x + x^2) e^{-2x}.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return Fraction(0), Fraction(0)
    alpha = Fraction((-1) ** n * (1 - 2 ** n), math.factorial(n - 1))
    beta = (Fraction(2 * (-1) ** (n - 1), math.factorial(n - 1))
            - Fraction(2 * (-2) ** (n - 1), math.factorial(n - 1)))
    if n >= 2:
        beta -= Fraction(2 * (-2) ** (n - 2), math.factorial(n - 2))
    return alpha, beta


# ---------------------------------------------------------------------------
# Euclidean-ball remark values (d = 2)


def euclid_remark_moments(spec: TorusSpec, lam: float, epsilon: float) -> dict:
    """Closed-form Euclidean-ball moments on the 2-torus.

    E[N_2] and E[N_3] are for the pairwise threshold epsilon; the two
    variances are for the pairwise threshold 2*epsilon (the two conventions
    coexist in the source formulas and are preserved as stated, with the
    first Var N_3 factor read as (4 lambda eps^2)^3 to keep the term
    dimensionally consistent with the rest of its series).
    """
    if spec.d != 2:
        raise ValueError("Euclidean remark values require d = 2")
    a = spec.a
    pi = math.pi
    en2 = pi * (a * lam * epsilon) ** 2 / 2.0
    en3 = pi * (pi - 3.0 * math.sqrt(3.0) / 4.0) * lam ** 3 * a ** 2 * epsilon ** 4 / 6.0
    y = 4.0 * lam * epsilon ** 2
    pref = (a / (2.0 * epsilon)) ** 2
    varn2 = pref * (pi / 2.0 * y ** 2 + pi ** 2 * y ** 3)
    varn3 = pref * (
        y ** 3 * (pi / 6.0) * (pi - 3.0 * math.sqrt(3.0) / 4.0)
        + y ** 4 * pi * (pi ** 2 / 2.0 - 5.0 / 12.0 - pi * math.sqrt(3.0) / 2.0)
        + y ** 5 * (pi ** 2 / 4.0) * (pi - 3.0 * math.sqrt(3.0) / 4.0) ** 2)
    return {"EN2": en2, "EN3": en3, "VarN2": varn2, "VarN3": varn3}


# ---------------------------------------------------------------------------
# Higher central moments via overlap-pattern assembly


def _default_j_oracle(params: ModelParams, samples: int, seed: SeedSpec):
    counter = [0]

    def oracle(pattern: OverlapPattern) -> JEstimate:
        counter[0] += 1
        return j_oracle_mc(pattern, params.spec, params.epsilon, samples,
                           seed.child("j_oracle", counter[0]))

    return oracle


def _third_moment_terms(k: int):
    """Index tuples (i, j, s, t, weight_fraction, pattern_counts) for n=3.

    i, j, s are the total shared-vertex counts on each of the three
    simplices; t is the overlap between the first two.  The resulting
    pattern has u - t, i - t, j - t vertices shared by exactly two simplices
    (pairs (0,1), (0,2), (1,2)) and 2t - u shared by all three, where
    u = i + j - s; M = 3k - s - t distinct points.
    """
    kfact3 = Fraction(math.factorial(k)) ** 3
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            s_lo = max(abs(i - j), 1)
            s_hi = min(i + j, k)
            for s in range(s_lo, s_hi + 1):
                u = i + j - s
                t_lo = -(-u // 2)
                t_hi = min(u, i, j)
                for t in range(t_lo, t_hi + 1):
                    weight = Fraction(
                        math.comb(k, i) * math.comb(k, j) * math.comb(k, s)
                        * math.factorial(t) * math.factorial(s)
                        * math.comb(i, t) * math.comb(j, t)
                        * math.comb(t, u - t)) / kfact3
                    counts = {(0, 1): u - t, (0, 2): i - t, (1, 2): j - t,
                              (0, 1, 2): 2 * t - u}
                    M = 3 * k - s - t
                    yield i, j, s, t, weight, counts, M


def third_moment_Nk(params: ModelParams, k: int,
                    j_oracle=None, oracle_samples: int = 1_000_000,
                    seed: SeedSpec | None = None) -> MomentValue:
    """Third central moment of the number of (k-1)-simplices."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if j_oracle is None:
        if seed is None:
            seed = SeedSpec(master_seed=0, stream_index=0)
        j_oracle = _default_j_oracle(params, oracle_samples, seed)
    d, a = params.spec.d, params.spec.a
    total = 0.0
    var = 0.0
    for i, j, s, t, weight, counts, M in _third_moment_terms(k):
        pattern = OverlapPattern.make(
            (k, k, k), {sub: c for sub, c in counts.items() if c > 0})
        assert pattern.total_vertices == M
        est = j_oracle(pattern)
        coeff = float(weight) * params.lam ** M
        total += coeff * est.value
        var += (coeff * est.stderr) ** 2
    return MomentValue(value=total, kind=MomentKind.CENTRAL_MOMENT, order=3,
                       truncation={"oracle_stderr": math.sqrt(var)})


def _contingency_tables(rows: tuple[int, ...], cols: tuple[int, ...]):
    """All nonnegative integer matrices with the given margins."""
    if sum(rows) != sum(cols):
        return
    ncols = len(cols)

    def rec(row_idx: int, remaining_cols: tuple[int, ...], acc):
        if row_idx == len(rows):
            if all(c == 0 for c in remaining_cols):
                yield tuple(acc)
            return
        target = rows[row_idx]

        def fill(col_idx: int, left: int, row_acc):
            if col_idx == ncols - 1:
                if left <= remaining_cols[col_idx]:
                    yield tuple(row_acc) + (left,)
                return
            for v in range(min(left, remaining_cols[col_idx]) + 1):
                yield from fill(col_idx + 1, left - v, tuple(row_acc) + (v,))

        for row in fill(0, target, ()):
            new_cols = tuple(c - v for c, v in zip(remaining_cols, row))
            yield from rec(row_idx + 1, new_cols, acc + [row])

    yield from rec(0, cols, [])


def _fourth_moment_terms(k: int):
    """Overlap patterns and weights for the fourth central moment.

    The four simplices are organized as two pairs (0,1) and (2,3).  i_j is
    the number of shared slots on simplex j; t1 = |S0 ^ S1| and
    t2 = |S2 ^ S3|; s is the number of distinct vertices shared across the
    two pairs.  The cross-shared vertices of the left pair fall into classes
    (both S0 and S1, S0 only, S1 only) of sizes (2t1-u1, i1-t1, i2-t1) with
    u1 = i1 + i2 - s, and symmetrically on the right; a contingency table
    over these classes enumerates the cross bijections, each carrying the
    multinomial count prod(A_x!) prod(B_y!) / prod(n_xy!).  M = 4k-t1-t2-s.
    """
    kfact4 = Fraction(math.factorial(k)) ** 4
    left_members = {0: (0, 1), 1: (0,), 2: (1,)}
    right_members = {0: (2, 3), 1: (2,), 2: (3,)}
    for i1, i2, i3, i4 in product(range(1, k + 1), repeat=4):
        for s in range(0, min(i1 + i2, i3 + i4) + 1):
            u1 = i1 + i2 - s
            u2 = i3 + i4 - s
            if u1 < 0 or u2 < 0:
                continue
            for t1 in range(-(-u1 // 2), min(u1, i1, i2) + 1):
                for t2 in range(-(-u2 // 2), min(u2, i3, i4) + 1):
                    rows = (2 * t1 - u1, i1 - t1, i2 - t1)
                    cols = (2 * t2 - u2, i3 - t2, i4 - t2)
                    if min(rows) < 0 or min(cols) < 0:
                        continue
                    base = Fraction(
                        math.comb(k, i1) * math.comb(k, i2)
                        * math.comb(k, i3) * math.comb(k, i4)
                        * math.factorial(t1) * math.comb(i1, t1)
                        * math.comb(i2, t1) * math.comb(t1, u1 - t1)
                        * math.factorial(t2) * math.comb(i3, t2)
                        * math.comb(i4, t2) * math.comb(t2, u2 - t2)) / kfact4
                    M = 4 * k - t1 - t2 - s
                    for table in _contingency_tables(rows, cols):
                        count = Fraction(1)
                        for A in rows:
                            count *= math.factorial(A)
                        for B in cols:
                            count *= math.factorial(B)
                        for row in table:
                            for v in row:
                                count //= math.factorial(v)
                        counts: dict[tuple[int, ...], int] = {}
                        if u1 - t1 > 0:
                            counts[(0, 1)] = counts.get((0, 1), 0) + (u1 - t1)
                        if u2 - t2 > 0:
                            counts[(2, 3)] = counts.get((2, 3), 0) + (u2 - t2)
                        for x in range(3):
                            for y in range(3):
                                v = table[x][y]
                                if v > 0:
                                    sub = tuple(sorted(
                                        left_members[x] + right_members[y]))
                                    counts[sub] = counts.get(sub, 0) + v
                        yield base * count, counts, M


def fourth_moment_Nk(params: ModelParams, k: int,
                     j_oracle=None, oracle_samples: int = 200_000,
                     seed: SeedSpec | None = None) -> MomentValue:
    """Fourth central moment of the number of (k-1)-simplices."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if j_oracle is None:
        if seed is None:
            seed = SeedSpec(master_seed=0, stream_index=0)
        j_oracle = _default_j_oracle(params, oracle_samples, seed)
    total = 0.0
    var = 0.0
    merged: dict = {}
    for weight, counts, M in _fourth_moment_terms(k):
        key = (tuple(sorted(counts.items())), M)
        merged[key] = merged.get(key, Fraction(0)) + weight
    for (counts_items, M), weight in sorted(merged.items()):
        pattern = OverlapPattern.make((k, k, k, k), dict(counts_items))
        assert pattern.total_vertices == M
        est = j_oracle(pattern)
        coeff = float(weight) * params.lam ** M
        total += coeff * est.value
        var += (coeff * est.stderr) ** 2
    return MomentValue(value=total, kind=MomentKind.CENTRAL_MOMENT, order=4,
                       truncation={"oracle_stderr": math.sqrt(var)})


def nth_moment_assembler(params: ModelParams, k: int, n: int,
                         j_oracle=None, oracle_samples: int = 1_000_000,
                         seed: SeedSpec | None = None) -> MomentValue:
    """n-th central moment of the (k-1)-simplex count, n in {2, 3, 4}.

    n = 2 uses the closed-form two-simplex integrals and reproduces the
    covariance diagonal exactly; n = 3 and n = 4 assemble overlap patterns
    against the Monte Carlo integral oracle.
    """
    if n == 2:
        d, a = params.spec.d, params.spec.a
        total = 0.0
        for i in range(1, k + 1):
            weight = (Fraction(math.comb(k, i) ** 2 * math.factorial(i))
                      / Fraction(math.factorial(k)) ** 2)
            total += (float(weight) * params.lam ** (2 * k - i)
                      * j2_closed_form(k - i, k - i, i, params.spec,
                                       params.epsilon))
        return MomentValue(value=total, kind=MomentKind.VARIANCE)
    if n == 3:
        return third_moment_Nk(params, k, j_oracle=j_oracle,
                               oracle_samples=oracle_samples, seed=seed)
    if n == 4:
        return fourth_moment_Nk(params, k, j_oracle=j_oracle,
                                oracle_samples=oracle_samples, seed=seed)
    raise ValueError(f"supported moment orders are 2, 3, 4; got {n}")

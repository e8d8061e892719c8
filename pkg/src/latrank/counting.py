"""Both sides of the fixed-rank counting law.

The left side sums an admissible test function over rank-k integral matrices,
scaled by 1/T.  The right side is a series over echelon matrices D of
denominator-weighted subspace integrals; its truncations converge to the
leading constant of the T^{knd} growth law.  The module also provides the
rank-one zeta identities that tie the series to classical zeta values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import kernels
from .exactval import PowerProduct
from .modules import PrimitiveModule, enumerate_primitive_modules
from .numfield import NumberField, rank_over_K, unflatten_kvector
from .zlattice import ZLattice, direct_sum, okn_lattice, short_vectors, unit_ball_volume


# -- test functions -------------------------------------------------------------


@dataclass(frozen=True)
class TestFunction:
    """Bounded compactly supported test function on n x m matrix space.

    kind "ball": indicator of the Frobenius ball of the given radius.
    kind "product_of_balls": product over columns of per-column ball indicators.
    kind "custom": arbitrary evaluator on the embedded real matrix, with a
    caller-supplied support radius.
    """

    kind: str
    radius: Fraction | None = None
    radii: tuple | None = None
    evaluator: Callable | None = None
    _support: float | None = None

    @property
    def support_radius(self) -> float:
        if self.kind == "ball":
            return float(self.radius)
        if self.kind == "product_of_balls":
            return math.sqrt(sum(float(r) ** 2 for r in self.radii))
        return float(self._support)

    def column_radii(self, m: int):
        if self.kind == "ball":
            raise ValueError("ball kind has no per-column radii")
        if len(self.radii) == m:
            return self.radii
        if len(self.radii) == 1:
            return self.radii * m
        raise ValueError(f"need {m} column radii, got {len(self.radii)}")

    def is_indicator(self) -> bool:
        return self.kind in ("ball", "product_of_balls")


def ball(radius) -> TestFunction:
    return TestFunction(kind="ball", radius=Fraction(radius))


def product_of_balls(radius, m: int | None = None) -> TestFunction:
    if isinstance(radius, (list, tuple)):
        radii = tuple(Fraction(r) for r in radius)
    else:
        radii = (Fraction(radius),) * (m or 1)
    return TestFunction(kind="product_of_balls", radii=radii)


def custom(evaluator: Callable, support_radius: float) -> TestFunction:
    return TestFunction(kind="custom", evaluator=evaluator, _support=support_radius)


# -- reports ----------------------------------------------------------------------


@dataclass
class RankCountReport:
    T: Fraction
    raw_sum: float          # integer-valued for indicator test functions
    normalized: float       # raw_sum / T^(k n d)
    matrices_seen: int
    method: str


@dataclass
class TermValue:
    value: float
    stderr: float
    method: str


@dataclass
class C1Estimate:
    n: int
    m: int
    k: int
    cutoff: float
    partial_sum: float
    term_count: int
    tail_estimate: float    # heuristic, never folded into partial_sum
    mc_stderr: float
    terms: list = dc_field(default_factory=list)


# -- rank helpers -------------------------------------------------------------------


def rank_of_matrix(field: NumberField, rows) -> int:
    return rank_over_K([[field.coerce(x) for x in row] for row in rows])


def rank_factorize(field: NumberField, rows):
    from .modules import rank_factorize as _rf

    return _rf(field, rows)


# -- left side: direct and stratified counting ---------------------------------------


def _coords_to_matrices(field: NumberField, lat: ZLattice, coords_list, n: int, m: int):
    d = field.degree
    for coords in coords_list:
        amb = lat.to_ambient(coords)
        rows = [unflatten_kvector(field, list(amb[t * m * d:(t + 1) * m * d]))
                for t in range(n)]
        yield rows


def _column_sqnorms_exact(field: NumberField, rows):
    cols = len(rows[0])
    out = []
    for j in range(cols):
        out.append(sum(field.t2(rows[i][j], rows[i][j]) for i in range(len(rows))))
    return out


def lhs_count(field: NumberField, n: int, m: int, k: int, T, f: TestFunction,
              method: str = "auto", cap: int | None = None,
              threads: int | None = None) -> RankCountReport:
    """Sum of f(A/T) over integral n x m matrices of rank exactly k.

    method "direct" enumerates the full matrix ball and filters by rank;
    "stratified" decomposes the sum over the modules Lambda_D carrying the
    rank-k matrices, which is how large T stays tractable.  The two methods
    agree exactly (tested), so "auto" picks by cost.
    """
    if not (n > m >= k >= 1):
        raise ValueError("need n > m >= k >= 1")
    T = Fraction(T)
    if T < 1:
        raise ValueError("need T >= 1")
    if method == "auto":
        method = "direct" if k == m else "stratified"
    if method == "direct":
        return _lhs_direct(field, n, m, k, T, f, cap=cap, threads=threads)
    if method == "stratified":
        return _lhs_stratified(field, n, m, k, T, f, cap=cap, threads=threads)
    raise ValueError(f"unknown method {method!r}")


def _support_times_T(f: TestFunction, T: Fraction) -> Fraction:
    if f.kind == "ball":
        return Fraction(f.radius) * T
    if f.kind == "product_of_balls":
        sq = sum(Fraction(r) ** 2 for r in f.radii)
        root = Fraction(math.isqrt(sq.numerator * sq.denominator), sq.denominator)
        while root * root < sq:   # exact rational cover of sqrt(sq)
            root += Fraction(1, 1000)
        return root * T
    return Fraction(f.support_radius).limit_denominator(10 ** 12) * T * Fraction(1001, 1000)


def _lhs_direct(field, n, m, k, T, f, cap=None, threads=None):
    d = field.degree
    lat = okn_lattice(field, n * m)
    radius_exact = _support_times_T(f, T)
    coords = short_vectors(lat, radius_exact, cap=cap, threads=threads)
    seen = len(coords)
    if field.degree == 1 and f.kind == "ball":
        batch = np.array(coords, dtype=np.int64).reshape(len(coords), n, m)
        ranks = kernels.ranks_over_z(batch)
        raw = float(np.count_nonzero(ranks == k))
        return RankCountReport(T=T, raw_sum=raw, normalized=raw / float(T) ** (k * n * d),
                               matrices_seen=seen, method="direct")
    raw = 0.0
    for rows in _coords_to_matrices(field, lat, coords, n, m):
        if rank_over_K([list(r) for r in rows]) != k:
            continue
        raw += _evaluate_exactish(field, f, rows, T, m)
    return RankCountReport(T=T, raw_sum=raw, normalized=raw / float(T) ** (k * n * d),
                           matrices_seen=seen, method="direct")


def _evaluate_exactish(field, f, rows, T, m) -> float:
    if f.kind == "ball":
        sq = sum(field.t2(x, x) for row in rows for x in row)
        lhs = PowerProduct.coerce(sq) * field.scale_sq if sq else None
        bound = PowerProduct.coerce(Fraction(f.radius) ** 2 * T ** 2)
        return 1.0 if (lhs is None or lhs <= bound) else 0.0
    if f.kind == "product_of_balls":
        radii = f.column_radii(m)
        for j, sq in enumerate(_column_sqnorms_exact(field, rows)):
            if sq == 0:
                continue
            if not PowerProduct.coerce(sq) * field.scale_sq <= \
                    PowerProduct.coerce(Fraction(radii[j]) ** 2 * T ** 2):
                return 0.0
        return 1.0
    emb = np.array([np.concatenate([field.embed_element(x) for x in row]) for row in rows])
    return float(f.evaluator(emb / float(T)))


def _lhs_stratified(field, n, m, k, T, f, cap=None, threads=None):
    d = field.degree
    RT = _support_times_T(f, T)
    # any module carrying a rank-k matrix of norm <= RT satisfies
    # H <= prod ||u_j v_i|| <= (c_emb * RT)^(kd)
    c_emb = max(
        abs(sum(complex(float(c)) * complex(root) ** j for j, c in enumerate(u.coords)))
        for u in field.basis_elements() for _, root in field.places
    )
    c_emb = Fraction(max(1.0, c_emb * (1 + 1e-9))).limit_denominator(10 ** 6)
    hbound = max(Fraction(1), (c_emb * RT) ** (k * d))
    modules = enumerate_primitive_modules(field, k, m, hbound, cap=cap)
    raw = 0.0
    seen = 0
    bound_sq = PowerProduct.coerce(RT ** 2)
    from .zlattice import shortest_nonzero_sqnorm

    for P in modules:
        lam = P.lattice
        # cheapest reject: the module must fit k independent rows under RT
        if shortest_nonzero_sqnorm(lam) > bound_sq:
            continue
        stacked = direct_sum(lam, n)
        coords = short_vectors(stacked, RT, cap=cap, threads=threads)
        seen += len(coords)
        r = lam.rank
        arr = np.array(coords, dtype=np.int64).reshape(len(coords), n, r)
        if field.degree == 1:
            ranks = kernels.ranks_over_z(arr)   # rank of coefficients = rank of A
        else:
            ranks = np.array([
                rank_over_K([list(row) for row in rows])
                for rows in _coords_to_matrices(field, stacked, coords, n, m)
            ])
        if f.kind == "ball":
            raw += float(np.count_nonzero(ranks == k))
        else:
            for rows, rk in zip(_coords_to_matrices(field, stacked, coords, n, m), ranks):
                if rk == k:
                    raw += _evaluate_exactish(field, f, rows, T, m)
    return RankCountReport(T=T, raw_sum=raw, normalized=raw / float(T) ** (k * n * d),
                           matrices_seen=seen, method="stratified")


# -- right side: per-module subspace integrals ----------------------------------------


def term_value_detail(P: PrimitiveModule, n: int, f: TestFunction,
                      mc_samples: int = 0, seed=None) -> TermValue:
    """D(D)^(-n) * integral of f(x D) over M_{n x k}(K_R).

    Ball test functions have the closed form H^(-n) V(knd) R^(knd); product
    and custom kinds are integrated by Monte Carlo over the subspace measure
    with a reported standard error.
    """
    lat = P.lattice
    kd = lat.rank
    hn = float(P.height_sq) ** (-n / 2.0)
    if f.kind == "ball":
        s = kd * n
        val = hn * unit_ball_volume(s) * float(f.radius) ** s
        return TermValue(value=val, stderr=0.0, method="closed_form")
    if mc_samples <= 0:
        raise ValueError("mc_samples must be positive for non-ball test functions")
    m = P.echelon.m
    field = P.echelon.field
    d = field.degree
    # orthonormal frame of the embedded row space
    basis_emb = np.array([lat.ambient.embed(row) for row in lat.basis])
    q, _ = np.linalg.qr(basis_emb.T)        # (m d, kd), orthonormal columns
    fro = f.support_radius
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-fro, fro, size=(mc_samples, n, kd))
    emb = pts @ q.T                          # (N, n, m d) rows in ambient frame
    if f.kind == "product_of_balls":
        radii = np.array([float(r) for r in f.column_radii(m)])
        colsq = np.zeros((mc_samples, m))
        for j in range(m):
            block = emb[:, :, j * d:(j + 1) * d]
            colsq[:, j] = np.einsum("nij,nij->n", block, block)
        vals = np.all(colsq <= radii[None, :] ** 2, axis=1).astype(float)
    else:
        vals = np.array([float(f.evaluator(emb[i])) for i in range(mc_samples)])
    volume = (2.0 * fro) ** (n * kd)
    mean = float(vals.mean())
    std = float(vals.std(ddof=1)) if mc_samples > 1 else 0.0
    value = hn * volume * mean
    stderr = hn * volume * std / math.sqrt(mc_samples)
    return TermValue(value=value, stderr=stderr, method="monte_carlo")


def term_value(P: PrimitiveModule, n: int, f: TestFunction,
               mc_samples: int = 0, seed=None) -> float:
    return term_value_detail(P, n, f, mc_samples=mc_samples, seed=seed).value


def pivot_product_integral(P: PrimitiveModule, n: int, f: TestFunction) -> float:
    """Closed form of the product integral when D has only pivot and zero columns.

    Independent of the Monte Carlo path; used as its cross-check.
    """
    D = P.echelon
    field = D.field
    d = field.degree
    radii = f.column_radii(D.m)
    val = float(P.height_sq) ** (-n / 2.0)
    for j in range(D.m):
        col = [D.rows[i][j] for i in range(D.k)]
        if j in D.pivot_cols:
            val *= unit_ball_volume(n * d) * float(radii[j]) ** (n * d)
        elif all(x.is_zero() for x in col):
            continue
        else:
            raise ValueError("matrix has a non-pivot nonzero column")
    return val


def c1_estimate(field: NumberField, n: int, m: int, k: int, f: TestFunction,
                height_cutoff, mc_samples: int = 0, seed=None,
                cap: int | None = None) -> C1Estimate:
    """Truncated series for the leading constant, plus a heuristic tail estimate."""
    if not (n > m >= k >= 1):
        raise ValueError("need n > m >= k >= 1")
    modules = enumerate_primitive_modules(field, k, m, height_cutoff, cap=cap)
    total = 0.0
    var = 0.0
    terms = []
    base_seed = 0 if seed is None else int(seed)
    for idx, P in enumerate(modules):
        # independent deterministic stream per module, in canonical module order
        tv = term_value_detail(P, n, f, mc_samples=mc_samples,
                               seed=np.random.SeedSequence((base_seed, idx)))
        total += tv.value
        var += tv.stderr ** 2
        terms.append((P.height, P.denominator, tv.value))
    cutoff = float(height_cutoff)
    tail = _tail_estimate(terms, cutoff, m, n)
    return C1Estimate(n=n, m=m, k=k, cutoff=cutoff, partial_sum=total,
                      term_count=len(terms), tail_estimate=tail,
                      mc_stderr=math.sqrt(var), terms=terms)


def _tail_estimate(terms, cutoff: float, m: int, n: int) -> float:
    """Fit C * X^(m-n) to the last decade of terms; reported, never added."""
    lo = cutoff / 10.0
    s_last = sum(v for h, _, v in terms if lo < h <= cutoff)
    if s_last <= 0:
        return 0.0
    expo = m - n
    denom = lo ** expo - cutoff ** expo
    if denom <= 0:
        return 0.0
    A = s_last / denom
    return A * cutoff ** expo


# -- zeta identities --------------------------------------------------------------------


def zeta(s: float, terms: int = 200) -> float:
    """Riemann zeta for s > 1 by direct summation with an Euler-Maclaurin tail.

    With M = 200 the remainder is below 1e-12 for all s >= 2.
    """
    if s <= 1:
        raise ValueError("need s > 1")
    M = terms
    total = sum(c ** -float(s) for c in range(1, M + 1))
    total += M ** (1.0 - s) / (s - 1.0)
    total -= 0.5 * M ** (-float(s))
    total += s * M ** (-s - 1.0) / 12.0
    total -= s * (s + 1) * (s + 2) * M ** (-s - 3.0) / 720.0
    return total


def _grid_norm_sq(m: int, cutoff: float):
    rng = np.arange(-int(cutoff), int(cutoff) + 1)
    grids = np.meshgrid(*([rng] * m), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    nsq = (pts.astype(np.int64) ** 2).sum(axis=1)
    keep = (nsq > 0) & (nsq <= cutoff * cutoff)
    return pts[keep], nsq[keep]


def primitive_zeta_check(n: int, m: int, cutoff):
    """Truncations of zeta(n) * sum over primitive vectors vs sum over all vectors.

    Both sums share the cutoff; returns (lhs, rhs, relative_error).
    """
    if not n > m:
        raise ValueError("need n > m")
    pts, nsq = _grid_norm_sq(m, float(cutoff))
    norms = np.sqrt(nsq.astype(float))
    rhs = float((norms ** (-float(n))).sum())
    g = np.gcd.reduce(np.abs(pts), axis=1)
    prim = g == 1
    lhs = zeta(n) * float((norms[prim] ** (-float(n))).sum())
    return lhs, rhs, abs(lhs - rhs) / rhs


def koecher_identity_check(field: NumberField, n: int, m: int, cutoff,
                           cap: int | None = None):
    """Rank-one series against the zeta-normalized lattice sum, shared truncation.

    series = sum over modules of D(D)^(-n) Integral(ball indicator), H <= cutoff;
    zeta side = V(n) * Z_trunc / zeta(n) with Z_trunc = (1/2) sum ||v||^(-n).
    Returns (series_side, zeta_side, relative_error).
    """
    if field.degree != 1:
        raise ValueError("the zeta comparison is stated over the rationals")
    modules = enumerate_primitive_modules(field, 1, m, cutoff, cap=cap)
    f = ball(1)
    series = sum(term_value(P, n, f) for P in modules)
    _, nsq = _grid_norm_sq(m, float(cutoff))
    z_trunc = 0.5 * float((np.sqrt(nsq.astype(float)) ** (-float(n))).sum())
    zeta_side = unit_ball_volume(n) * z_trunc / zeta(n)
    return series, zeta_side, abs(series - zeta_side) / zeta_side

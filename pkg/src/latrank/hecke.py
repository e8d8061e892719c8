"""Lifts of codes: finite Grassmannians, Hecke neighbors, and lattice-sum moments.

A (P, s)-neighbor of O_K^n is the preimage of an s-dimensional subspace of
(O_K/P)^n under reduction mod P, rescaled by T_P = N(P)^((1-s/n)/d) to unit
covolume.  Averaging m-th powers of lattice sums over all neighbors equals a
rank-stratified sum over integral matrices exactly at every finite prime, and
converges to the echelon-matrix series as N(P) grows.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import intmat
from .counting import TestFunction, term_value_detail
from .errors import ValidationError
from .exactval import PowerProduct
from .modules import enumerate_primitive_modules
from .numfield import NumberField, PrimeIdealData, rank_over_K
from .zlattice import ZLattice, okn_lattice, short_vectors


# -- finite Grassmannians ---------------------------------------------------------


@dataclass(frozen=True)
class FiniteSubspace:
    """Canonical echelon basis of an s-dimensional subspace of F_q^n."""

    q: int
    n: int
    s: int
    rows: tuple   # s rows of length n, entries in [0, q)

    def __post_init__(self):
        if self.s == 0:
            return
        pivots = []
        for i, row in enumerate(self.rows):
            piv = next((j for j, x in enumerate(row) if x), None)
            if piv is None or row[piv] != 1:
                raise ValueError("rows must be reduced echelon with unit pivots")
            if pivots and piv <= pivots[-1]:
                raise ValueError("pivot columns must increase")
            for i2 in range(len(self.rows)):
                if i2 != i and self.rows[i2][piv] != 0:
                    raise ValueError("pivot columns must be cleared")
            pivots.append(piv)

    @property
    def pivot_cols(self):
        return tuple(next(j for j, x in enumerate(row) if x) for row in self.rows)


def gaussian_binomial(u: int, t: int, q: int) -> int:
    """Number of u-dimensional subspaces of F_q^t, exact."""
    if u < 0 or u > t:
        return 0
    num = 1
    den = 1
    for i in range(u):
        num *= q ** t - q ** i
        den *= q ** u - q ** i
    return num // den


def _free_positions(pivots, n):
    """Fillable entries of the reduced echelon pattern with the given pivots."""
    pivset = set(pivots)
    free = []
    for i, p in enumerate(pivots):
        for j in range(p + 1, n):
            if j not in pivset:
                free.append((i, j))
    return free


def enumerate_subspaces(s: int, n: int, q: int, cap: int = 2_000_000):
    """All canonical echelon bases of s-dimensional subspaces of F_q^n."""
    if not 0 <= s <= n:
        raise ValueError("need 0 <= s <= n")
    count = gaussian_binomial(s, n, q)
    if count > cap:
        raise ValidationError(
            f"Grassmannian has {count} subspaces > cap {cap}; use sampling"
        )
    if s == 0:
        return [FiniteSubspace(q=q, n=n, s=0, rows=())]
    out = []
    for pivots in itertools.combinations(range(n), s):
        free = _free_positions(pivots, n)
        base = [[0] * n for _ in range(s)]
        for i, p in enumerate(pivots):
            base[i][p] = 1
        for fill in itertools.product(range(q), repeat=len(free)):
            rows = [row[:] for row in base]
            for (i, j), v in zip(free, fill):
                rows[i][j] = v
            out.append(FiniteSubspace(q=q, n=n, s=s,
                                      rows=tuple(tuple(r) for r in rows)))
    assert len(out) == count
    return out


def sample_subspace(s: int, n: int, q: int, rng: np.random.Generator) -> FiniteSubspace:
    """Uniform random subspace via the Schubert-cell construction.

    Pivot sets are drawn with probability proportional to their cell size
    q^(number of free entries); free entries are then uniform, so every
    subspace has probability 1/gaussian_binomial(s, n, q) by construction.
    """
    if s == 0:
        return FiniteSubspace(q=q, n=n, s=0, rows=())
    combos = list(itertools.combinations(range(n), s))
    weights = np.array([float(q) ** len(_free_positions(p, n)) for p in combos])
    weights /= weights.sum()
    pivots = combos[int(rng.choice(len(combos), p=weights))]
    free = _free_positions(pivots, n)
    rows = [[0] * n for _ in range(s)]
    for i, p in enumerate(pivots):
        rows[i][p] = 1
    for (i, j) in free:
        rows[i][j] = int(rng.integers(q))
    return FiniteSubspace(q=q, n=n, s=s, rows=tuple(tuple(r) for r in rows))


def containment_probability(k: int, s: int, n: int, q: int) -> Fraction:
    """Probability that a uniform s-dim subspace of F_q^n contains a fixed k-dim one."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    if k == 0:
        return Fraction(1)
    if s < k:
        return Fraction(0)
    return Fraction(gaussian_binomial(s - k, n - k, q), gaussian_binomial(s, n, q))


# -- Hecke neighbors -----------------------------------------------------------------


@dataclass
class HeckeLattice:
    """Unit-covolume rescaling of the preimage of a subspace mod P."""

    lattice: ZLattice            # the unscaled integral lattice, P^n <= L <= O_K^n
    prime: PrimeIdealData
    subspace: FiniteSubspace
    t_scale: float               # T_P
    t_scale_sq: PowerProduct     # exact T_P^2

    def key(self):
        return self.subspace.rows

    def covolume_sq(self) -> PowerProduct:
        n = self.subspace.n
        d = self.lattice.ambient_dim // n
        return self.lattice.height_sq() / self.t_scale_sq ** (n * d)

    def covolume(self) -> float:
        return math.sqrt(float(self.covolume_sq()))


def hecke_neighbor(field: NumberField, P: PrimeIdealData, S: FiniteSubspace,
                   base: ZLattice | None = None) -> HeckeLattice:
    """The (P, s)-neighbor of O_K^n attached to the subspace S."""
    if S.q != P.p:
        raise ValueError("subspace is over the wrong residue field")
    n, s, p = S.n, S.s, P.p
    d = field.degree
    okn = base or okn_lattice(field, n)
    theta = field.gen()
    gens = []   # integral-basis coordinate rows, length n*d
    for row in S.rows:
        lifted = tuple(field.coerce(int(a)) for a in row)
        for u in field.basis_elements():
            vec = tuple(u * x for x in lifted)
            gens.append([c for x in vec for c in field.integral_coords(x)])
    for mult in [field.coerce(p), theta - P.root]:
        for u in field.basis_elements():
            prod = mult * u
            coords = field.integral_coords(prod)
            for c in range(n):
                vec = [0] * (n * d)
                vec[c * d:(c + 1) * d] = coords
                gens.append(vec)
    H, _ = intmat.hermite_normal_form(gens)
    basis_w = [row for row in H if any(row)]
    if len(basis_w) != n * d:
        raise ValueError("neighbor construction produced a degenerate lattice")
    det = 1
    for i in range(n * d):
        det *= basis_w[i][i]
    if abs(det) != p ** (n - s):
        raise ValueError(f"neighbor index {abs(det)} != p^(n-s)")
    basis = intmat.mat_mul(basis_w, [list(r) for r in okn.basis])
    lat = ZLattice(basis, okn.ambient, ok_module=True)
    t_sq = PowerProduct.of(p, Fraction(2 * (n - s), n * d))
    hl = HeckeLattice(lattice=lat, prime=P, subspace=S,
                      t_scale=math.sqrt(float(t_sq)), t_scale_sq=t_sq)
    if not hl.covolume_sq() == PowerProduct.coerce(1):
        raise ValueError("neighbor covolume is not preserved")
    return hl


def lattice_sum(hl: HeckeLattice, g: TestFunction, include_zero: bool = True,
                cap: int | None = None):
    """Sum of g over the rescaled lattice.

    Ball indicators give an exact integer count; custom g is evaluated in
    floating point on the embedded rescaled vectors.
    """
    if g.kind == "ball":
        radius = (PowerProduct.coerce(Fraction(g.radius) ** 2) * hl.t_scale_sq).sqrt()
        vecs = short_vectors(hl.lattice, radius, cap=cap)
        count = len(vecs)
        if not include_zero:
            count -= 1
        return count
    if g.kind != "custom":
        raise ValueError("lattice sums support ball and custom test functions")
    sup = Fraction(g.support_radius).limit_denominator(10 ** 9) * Fraction(1001, 1000)
    radius = (PowerProduct.coerce(sup ** 2) * hl.t_scale_sq).sqrt()
    total = 0.0
    inv_t = 1.0 / hl.t_scale
    for c in short_vectors(hl.lattice, radius, cap=cap):
        if not include_zero and not any(c):
            continue
        emb = hl.lattice.ambient.embed(hl.lattice.to_ambient(c))
        total += float(g.evaluator(emb * inv_t))
    return total


# -- moments ----------------------------------------------------------------------------


@dataclass
class MomentReport:
    p: int
    s: int
    n: int
    m: int
    mode: str
    lhs: float
    stratified: float | None
    rhs_limit: float
    abs_error: float
    lhs_exact: Fraction | None = None
    stratified_exact: Fraction | None = None
    sample_stderr: float = 0.0


def moment_lhs(field: NumberField, P: PrimeIdealData, n: int, s: int, m: int,
               g: TestFunction, mode: str = "exact", sample_count: int = 0,
               seed=None, include_zero: bool = True, cap: int | None = None):
    """Average of (sum of g over the neighbor)^m over the neighbors of O_K^n.

    Exact mode returns a Fraction for indicator g; sampled mode returns
    (mean, stderr) over uniformly sampled subspaces.
    """
    okn = okn_lattice(field, n)
    if mode == "exact":
        subs = enumerate_subspaces(s, n, P.p)
        total = 0
        for S in subs:
            hl = hecke_neighbor(field, P, S, base=okn)
            total += lattice_sum(hl, g, include_zero=include_zero, cap=cap) ** m
        if g.kind == "ball":
            return Fraction(total, len(subs))
        return total / len(subs)
    if mode == "sampled":
        if sample_count <= 0:
            raise ValueError("sample_count must be positive in sampled mode")
        rng = np.random.default_rng(seed)
        vals = np.zeros(sample_count)
        for i in range(sample_count):
            S = sample_subspace(s, n, P.p, rng)
            hl = hecke_neighbor(field, P, S, base=okn)
            vals[i] = lattice_sum(hl, g, include_zero=include_zero, cap=cap) ** m
        stderr = float(vals.std(ddof=1) / math.sqrt(sample_count)) if sample_count > 1 else 0.0
        return float(vals.mean()), stderr
    raise ValueError(f"unknown mode {mode!r}")


def moment_stratified(field: NumberField, P: PrimeIdealData, n: int, s: int, m: int,
                      g: TestFunction, cap: int | None = None) -> Fraction:
    """Rank-stratified rewriting of the moment: exact at every finite prime.

    Sums, over integral n x m matrices x with every column inside the support
    of g scaled by T_P, the probability that a uniform s-dim subspace contains
    the span of x mod P.  The probability is driven by the rank of x mod P,
    not the rank over K.
    """
    if g.kind != "ball":
        raise ValueError("the exact identity is implemented for ball test functions")
    p = P.p
    d = field.degree
    okn = okn_lattice(field, n)
    t_sq = PowerProduct.of(p, Fraction(2 * (n - s), n * d))
    radius = (PowerProduct.coerce(Fraction(g.radius) ** 2) * t_sq).sqrt()
    cols = short_vectors(okn, radius, cap=cap)
    # reduction of each candidate column to F_p^n
    reduced = []
    for c in cols:
        kvec = okn.kvector_of_coords(c)
        reduced.append(tuple(field.reduce_mod_prime(x, P) for x in kvec))
    probs = [containment_probability(k, s, n, p) for k in range(min(n, m) + 1)]
    red_arr = np.array(reduced, dtype=np.int64)          # (|C|, n)
    combos = list(itertools.product(range(len(cols)), repeat=m))
    batch = np.stack([red_arr[list(c)].T for c in combos])  # (N, n, m)
    from .kernels import ranks_mod_p

    ranks = ranks_mod_p(batch, p)
    total = Fraction(0)
    for rk in ranks:
        total += probs[int(rk)]
    return total


def _rank_mod_p(mat: np.ndarray, p: int) -> int:
    from .kernels import ranks_mod_p

    return int(ranks_mod_p(mat[None, :, :], p)[0])


def _column_product(field: NumberField, g: TestFunction, n: int, m: int) -> TestFunction:
    """f(x) = prod_j g(column j of x) as a test function on n x m matrices."""
    from .counting import custom as custom_tf
    from .counting import product_of_balls

    if g.kind == "ball":
        return product_of_balls(g.radius, m)
    d = field.degree

    def evaluator(emb):
        # emb has shape (n, m*d); column j of the K-matrix is the j-th d-block
        val = 1.0
        for j in range(m):
            col = emb[:, j * d:(j + 1) * d].ravel()
            val *= float(g.evaluator(col))
            if val == 0.0:
                return 0.0
        return val

    return custom_tf(evaluator, math.sqrt(m) * g.support_radius)


def moment_rhs_limit(field: NumberField, n: int, m: int, g: TestFunction,
                     height_cutoff, mc_samples: int = 4000, seed=None,
                     cap: int | None = None):
    """Limit value of the moments: sum over ranks k of the echelon series.

    The k = 0 term is g(0)^m; each k >= 1 term integrates the column-product
    of g against the module measure.  Returns (value, per_k breakdown, stderr).
    """
    if not (n >= 2 and 1 <= m <= n - 1):
        raise ValidationError(f"need n >= 2 and 1 <= m <= n-1, got n={n}, m={m}")
    if g.kind == "ball":
        g0 = 1.0
    elif g.kind == "custom":
        g0 = float(g.evaluator(np.zeros(n * field.degree)))
    else:
        raise ValueError("moment limits take ball or custom g")
    f = _column_product(field, g, n, m)
    per_k = [g0 ** m]
    stderr_sq = 0.0
    base_seed = 0 if seed is None else int(seed)
    for k in range(1, m + 1):
        modules = enumerate_primitive_modules(field, k, m, height_cutoff, cap=cap)
        acc = 0.0
        for idx, P in enumerate(modules):
            tv = term_value_detail(P, n, f, mc_samples=mc_samples,
                                   seed=np.random.SeedSequence((base_seed, k, idx)))
            acc += tv.value
            stderr_sq += tv.stderr ** 2
        per_k.append(acc)
    return sum(per_k), per_k, math.sqrt(stderr_sq)


def rank_drop_check(field: NumberField, rows, P: PrimeIdealData):
    """Ranks over K and mod P, with the explicit norm lower bound when rank drops.

    The implemented constant: if rank drops from k, then
    ||x|| >= (N(P) / (k!^d |disc|^(k/2)))^(1/(kd)).
    """
    kmat = [[field.coerce(x) for x in row] for row in rows]
    rank_K = rank_over_K(kmat)
    mat = np.array([[field.reduce_mod_prime(x, P) for x in row] for row in kmat],
                   dtype=np.int64)
    rank_modp = _rank_mod_p(mat, P.p)
    d = field.degree
    k = rank_K
    if rank_modp >= rank_K or rank_K == 0:
        return rank_K, rank_modp, True, 0.0
    c = (math.factorial(k) ** d * abs(field.discriminant) ** (k / 2.0)) ** (-1.0 / (k * d))
    threshold = c * P.norm ** (1.0 / (k * d))
    sq = sum(field.t2(x, x) for row in kmat for x in row)
    norm = math.sqrt(float(field.scale_sq) * float(sq))
    return rank_K, rank_modp, norm >= threshold * (1 - 1e-12), threshold


def validate_moment_window(n: int, m: int, s: int) -> None:
    """Admissible (m, s): s = n-1, or m <= s <= n-1 with 1 - s/n < 1/m."""
    if s == n - 1 and 1 <= m <= n - 1:
        return
    if not Fraction(1) - Fraction(s, n) < Fraction(1, m):
        raise ValidationError(
            f"violated 1 - s/n < 1/m: 1 - {s}/{n} = {Fraction(n - s, n)} >= 1/{m}"
        )
    if not m <= s <= n - 1:
        raise ValidationError(f"need m <= s <= n-1 (or s = n-1): m={m}, s={s}, n={n}")


def convergence_table(field: NumberField, n: int, m: int, s: int, g: TestFunction,
                      primes, mode: str = "exact", height_cutoff=30,
                      mc_samples: int = 4000, seed=None, exact_cap: int = 5000,
                      cap: int | None = None) -> list[MomentReport]:
    """Per-prime moments against the limit value; the error should trend down."""
    validate_moment_window(n, m, s)
    rhs, _, rhs_err = moment_rhs_limit(field, n, m, g, height_cutoff,
                                       mc_samples=mc_samples, seed=seed, cap=cap)
    reports = []
    sample_count = 0
    if mode.startswith("sampled"):
        sample_count = int(mode.split(":", 1)[1]) if ":" in mode else 2000
    for p in primes:
        P = field.prime_above(p)
        n_subs = gaussian_binomial(s, n, p)
        stratified = moment_stratified(field, P, n, s, m, g, cap=cap)
        if mode == "exact" or (mode == "auto" and n_subs <= exact_cap):
            lhs_val = moment_lhs(field, P, n, s, m, g, mode="exact", cap=cap)
            reports.append(MomentReport(
                p=p, s=s, n=n, m=m, mode="exact",
                lhs=float(lhs_val), stratified=float(stratified), rhs_limit=rhs,
                abs_error=abs(float(lhs_val) - rhs),
                lhs_exact=lhs_val, stratified_exact=stratified))
        else:
            mean, stderr = moment_lhs(field, P, n, s, m, g, mode="sampled",
                                      sample_count=sample_count, seed=seed, cap=cap)
            reports.append(MomentReport(
                p=p, s=s, n=n, m=m, mode=f"sampled:{sample_count}",
                lhs=mean, stratified=float(stratified), rhs_limit=rhs,
                abs_error=abs(mean - rhs),
                stratified_exact=stratified, sample_stderr=stderr))
    return reports

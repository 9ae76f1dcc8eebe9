"""Classical multiple-access channels: information quantities, polymatroids, region arithmetic.

Senders are numbered 0..n-1 and subset bitmasks use bit ``i`` for sender ``i``.
Joint input tuples are flattened in row-major order (sender 0 most significant),
and pairs (a, b) from two factor alphabets are flattened as ``a * |B| + b``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError

from .errors import DomainError, SizeError, ValidationError
from .kernels import polymatroid_slacks, shannon_bits

TOL = 1e-9
MAX_Q = 8
MAX_JOINT = 1_000_000
MAX_RANK_SENDERS = 16
MAX_POLYMATROID_N = 10
MAX_VERTEX_N = 8


def _check_pmf(p: np.ndarray, axis: int, what: str) -> None:
    if np.any(p < 0):
        raise ValidationError(f"{what} has negative entries")
    sums = p.sum(axis=axis)
    if np.any(np.abs(sums - 1.0) > TOL):
        worst = float(np.max(np.abs(sums - 1.0)))
        raise ValidationError(f"{what} rows do not sum to 1 (worst error {worst:.3g})")


@dataclass(frozen=True, eq=False)
class ClassicalMac:
    """Conditional pmf p(y | x_0..x_{n-1}), stored as an array of shape (*inputs, |Y|)."""

    table: np.ndarray

    def __post_init__(self):
        t = np.array(self.table, dtype=float)
        if t.ndim < 2:
            raise ValidationError("table needs at least one input axis and the output axis")
        _check_pmf(t, -1, "channel")
        t.flags.writeable = False
        object.__setattr__(self, "table", t)

    @property
    def n_senders(self) -> int:
        return self.table.ndim - 1

    @property
    def input_sizes(self) -> tuple:
        return self.table.shape[:-1]

    @property
    def output_size(self) -> int:
        return self.table.shape[-1]

    @classmethod
    def from_rows(cls, input_sizes: Sequence[int], output_size: int, rows) -> "ClassicalMac":
        """Build from one row p(.|x) per joint input, inputs in row-major order."""
        rows = np.asarray(rows, dtype=float)
        expected = (int(np.prod(input_sizes)), output_size)
        if rows.shape != expected:
            raise ValidationError(f"expected {expected} rows x columns, got {rows.shape}")
        return cls(rows.reshape(*input_sizes, output_size))

    @classmethod
    def deterministic(cls, input_sizes: Sequence[int], output_size: int, fn) -> "ClassicalMac":
        t = np.zeros((*input_sizes, output_size))
        for x in itertools.product(*(range(k) for k in input_sizes)):
            t[x + (fn(*x),)] = 1.0
        return cls(t)


@dataclass(frozen=True, eq=False)
class InputEnsemble:
    """Time-sharing pmf p(q) and per-sender conditionals p(x_i | q).

    ``cond[i]`` has shape (|Q|, |X_i|).
    """

    q_pmf: np.ndarray
    cond: tuple

    def __post_init__(self):
        q = np.array(self.q_pmf, dtype=float).ravel()
        if q.size > MAX_Q:
            raise SizeError(f"time-sharing alphabet {q.size} exceeds the cap {MAX_Q}")
        _check_pmf(q, 0, "time-sharing pmf")
        cond = []
        for i, c in enumerate(self.cond):
            c = np.array(c, dtype=float)
            if c.ndim != 2 or c.shape[0] != q.size:
                raise ValidationError(f"sender {i}: expected shape (|Q|={q.size}, |X|), got {c.shape}")
            _check_pmf(c, 1, f"sender {i} input pmf")
            c.flags.writeable = False
            cond.append(c)
        q.flags.writeable = False
        object.__setattr__(self, "q_pmf", q)
        object.__setattr__(self, "cond", tuple(cond))

    @property
    def n_senders(self) -> int:
        return len(self.cond)

    @property
    def input_sizes(self) -> tuple:
        return tuple(c.shape[1] for c in self.cond)

    @classmethod
    def uniform(cls, input_sizes: Sequence[int]) -> "InputEnsemble":
        return cls(np.ones(1), tuple(np.full((1, k), 1.0 / k) for k in input_sizes))


@dataclass(frozen=True, eq=False)
class RankFunction:
    """Set function over bitmasks: ``values[S] = f(S)``."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if v.size != 1 << self.n:
            raise ValidationError(f"need 2^{self.n} = {1 << self.n} values, got {v.size}")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def __call__(self, subset) -> float:
        if isinstance(subset, (int, np.integer)):
            return float(self.values[subset])
        return float(self.values[mask_of(subset)])

    def __add__(self, other: "RankFunction") -> "RankFunction":
        if self.n != other.n:
            raise ValidationError("rank functions over different ground sets")
        return RankFunction(self.n, self.values + other.values)


@dataclass(frozen=True, eq=False)
class RegionPolytope:
    """V-representation of a rate region: deduplicated vertices in lexicographic order."""

    n: int
    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float).reshape(-1, self.n)
        if np.any(v < -TOL):
            raise ValidationError("rate vectors must be nonnegative")
        v = _dedupe_sorted(v)
        v.flags.writeable = False
        object.__setattr__(self, "vertices", v)

    def __len__(self):
        return self.vertices.shape[0]


def mask_of(subset) -> int:
    m = 0
    for i in subset:
        m |= 1 << i
    return m


def _dedupe_sorted(v: np.ndarray, tol: float = TOL) -> np.ndarray:
    if v.shape[0] == 0:
        return v
    order = np.lexsort(v.T[::-1])
    v = v[order]
    keep = [0]
    for k in range(1, v.shape[0]):
        if not any(np.max(np.abs(v[k] - v[j])) <= tol for j in keep):
            keep.append(k)
    return v[keep]


# ---------------------------------------------------------------- information quantities

def joint_pmf(mac: ClassicalMac, ens: InputEnsemble) -> np.ndarray:
    """p(q, x_0, .., x_{n-1}, y) as an array of shape (|Q|, *inputs, |Y|)."""
    if mac.n_senders != ens.n_senders or mac.input_sizes != ens.input_sizes:
        raise ValidationError(
            f"ensemble alphabets {ens.input_sizes} do not match channel inputs {mac.input_sizes}")
    size = ens.q_pmf.size * mac.table.size
    if size > MAX_JOINT:
        raise SizeError(f"joint table has {size} entries, cap is {MAX_JOINT}")
    p = ens.q_pmf
    for c in ens.cond:
        p = p[..., None] * c.reshape((c.shape[0],) + (1,) * (p.ndim - 1) + (c.shape[1],))
    return p[..., None] * mac.table[None, ...]


def _marginal_entropy(joint: np.ndarray, keep_axes: Sequence[int]) -> float:
    drop = tuple(a for a in range(joint.ndim) if a not in keep_axes)
    return shannon_bits(joint.sum(axis=drop))


def _cmi_from_joint(joint: np.ndarray, n: int, mask: int) -> float:
    # axes: 0 = Q, 1..n = senders, n+1 = Y
    if mask == 0:
        return 0.0
    y = n + 1
    comp = [1 + i for i in range(n) if not mask >> i & 1]
    everyone = [1 + i for i in range(n)]
    val = (_marginal_entropy(joint, [0, *comp, y]) - _marginal_entropy(joint, [0, *comp])
           - _marginal_entropy(joint, [0, *everyone, y]) + _marginal_entropy(joint, [0, *everyone]))
    return max(val, 0.0)


def conditional_mutual_information(mac: ClassicalMac, ens: InputEnsemble, subset) -> float:
    """I(X_S : Y | X_{S^c}, Q) in bits; ``subset`` is a bitmask or an iterable of senders."""
    mask = subset if isinstance(subset, (int, np.integer)) else mask_of(subset)
    if mask >> mac.n_senders:
        raise ValidationError(f"subset mask {mask} refers to senders beyond {mac.n_senders}")
    return _cmi_from_joint(joint_pmf(mac, ens), mac.n_senders, int(mask))


def rank_function(mac: ClassicalMac, ens: InputEnsemble) -> RankFunction:
    n = mac.n_senders
    if n > MAX_RANK_SENDERS:
        raise SizeError(f"{n} senders exceeds the cap {MAX_RANK_SENDERS}")
    joint = joint_pmf(mac, ens)
    return RankFunction(n, [_cmi_from_joint(joint, n, s) for s in range(1 << n)])


# ---------------------------------------------------------------- polymatroids

@dataclass
class PolymatroidReport:
    passed: bool
    normalized: bool
    monotone: bool
    submodular: bool
    f_empty: float
    monotone_slack: float
    submodular_slack: float
    first_violation: str | None


def is_polymatroid(f: RankFunction, tol: float = TOL) -> PolymatroidReport:
    """Exhaustive check of normalization, monotonicity and submodularity."""
    if f.n > MAX_POLYMATROID_N:
        raise SizeError(f"exhaustive check limited to n <= {MAX_POLYMATROID_N}")
    f0, mono, (ms, mi), sub, (ss, st) = polymatroid_slacks(f.values, f.n, tol)
    normalized = abs(f0) <= tol
    monotone = mono >= -tol
    submodular = sub >= -tol
    first = None
    if not normalized:
        first = f"f(empty) = {f0:.6g}"
    elif not monotone:
        first = f"monotonicity: f({ms | 1 << mi}) < f({ms}) adding element {mi} (slack {mono:.3g})"
    elif not submodular:
        first = f"submodularity: S={ss}, T={st} (slack {sub:.3g})"
    return PolymatroidReport(normalized and monotone and submodular, normalized, monotone,
                             submodular, f0, mono, sub, first)


def edmonds_vertex(f: RankFunction, order: Sequence[int]) -> np.ndarray:
    """Greedy vertex for the ordered choice ``order``; senders not listed get rate 0."""
    v = np.zeros(f.n)
    prev = 0
    prev_val = 0.0
    for i in order:
        cur = prev | 1 << i
        v[i] = f.values[cur] - prev_val
        prev, prev_val = cur, f.values[cur]
    return v


def polymatroid_vertices(f: RankFunction) -> RegionPolytope:
    """Vertices of {x >= 0 : x(S) <= f(S)} from all ordered choices of all sizes."""
    if f.n > MAX_VERTEX_N:
        raise SizeError(f"vertex enumeration limited to n <= {MAX_VERTEX_N}")
    rep = is_polymatroid(f)
    if not rep.passed:
        raise DomainError(f"not a polymatroid: {rep.first_violation}")
    pts = [np.zeros(f.n)]
    for k in range(1, f.n + 1):
        for order in itertools.permutations(range(f.n), k):
            pts.append(edmonds_vertex(f, order))
    return RegionPolytope(f.n, np.clip(np.array(pts), 0.0, None))


def in_polymatroid(f: RankFunction, x, tol: float = TOL) -> bool:
    x = np.asarray(x, dtype=float)
    if np.any(x < -tol):
        return False
    for s in range(1, 1 << f.n):
        if x[[i for i in range(f.n) if s >> i & 1]].sum() > f.values[s] + tol:
            return False
    return True


# ---------------------------------------------------------------- hulls and sums

def in_convex_hull(point, points: np.ndarray, tol: float = TOL) -> bool:
    """LP feasibility: is ``point`` a convex combination of rows of ``points``?"""
    pts = np.asarray(points, dtype=float)
    if pts.shape[0] == 0:
        return False
    k = pts.shape[0]
    a_eq = np.vstack([pts.T, np.ones((1, k))])
    b_eq = np.concatenate([np.asarray(point, dtype=float), [1.0]])
    res = linprog(np.zeros(k), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs",
                  options=_HIGHS_OPTIONS)
    if res.status != 0:
        return False
    return float(np.max(np.abs(a_eq @ res.x - b_eq))) <= tol * 10


_HIGHS_OPTIONS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


def _lp_prune(pts: np.ndarray, keep: list, tol: float) -> list:
    keep = list(keep)
    # dropping a redundant point never changes the hull, so one pass suffices
    for idx in list(keep):
        others = [j for j in keep if j != idx]
        if others and in_convex_hull(pts[idx], pts[others], tol):
            keep.remove(idx)
    return keep


def _qhull_candidates(pts: np.ndarray, tol: float) -> list | None:
    """Extreme-point candidates from qhull, or None when qhull cannot certify them."""
    n = pts.shape[1]
    if n < 2 or pts.shape[0] <= n + 1:
        return None
    try:
        hull = ConvexHull(pts)
    except QhullError:  # flat point sets: fall back to LP
        return None
    cand = sorted(int(i) for i in hull.vertices)
    rest = np.setdiff1d(np.arange(pts.shape[0]), cand)
    scale = max(1.0, float(np.max(np.abs(pts))))
    if rest.size:
        viol = pts[rest] @ hull.equations[:, :-1].T + hull.equations[:, -1]
        if np.max(viol) > tol * scale:
            return None
    return cand


def hull_vertices(points: np.ndarray, tol: float = TOL) -> np.ndarray:
    """Extreme points of conv(points), lexicographically ordered.

    qhull proposes candidates and the remaining points are checked against its
    facets; every candidate is then confirmed extreme by LP. Degenerate inputs
    go through the LP test point by point.
    """
    pts = _dedupe_sorted(np.asarray(points, dtype=float), tol)
    if pts.shape[1] == 1:
        return pts[[0, -1]] if pts.shape[0] > 1 and pts[-1, 0] - pts[0, 0] > tol else pts[:1]
    cand = _qhull_candidates(pts, tol)
    keep = _lp_prune(pts, range(pts.shape[0]) if cand is None else cand, tol)
    return pts[sorted(keep)]


def minkowski_sum(a: RegionPolytope, b: RegionPolytope) -> RegionPolytope:
    if a.n != b.n:
        raise ValidationError(f"dimension mismatch: {a.n} vs {b.n}")
    sums = (a.vertices[:, None, :] + b.vertices[None, :, :]).reshape(-1, a.n)
    return RegionPolytope(a.n, hull_vertices(sums))


def same_vertex_set(a: RegionPolytope, b: RegionPolytope, tol: float = TOL) -> tuple:
    """(equal, worst distance) between two vertex lists, matched nearest-neighbour."""
    if a.n != b.n:
        return False, float("inf")
    if len(a) != len(b):
        return False, float("inf")
    d = np.max(np.abs(a.vertices[:, None, :] - b.vertices[None, :, :]), axis=2)
    worst = max(float(d.min(axis=1).max()), float(d.min(axis=0).max()))
    return worst <= tol, worst


# ---------------------------------------------------------------- products

def pad_senders(mac: ClassicalMac, n: int) -> ClassicalMac:
    """Append trivial senders with a one-letter alphabet until there are ``n``."""
    extra = n - mac.n_senders
    if extra < 0:
        raise ValidationError("cannot remove senders by padding")
    t = mac.table.reshape(mac.input_sizes + (1,) * extra + (mac.output_size,))
    return ClassicalMac(t)


def pad_ensemble(ens: InputEnsemble, n: int) -> InputEnsemble:
    q = ens.q_pmf.size
    return InputEnsemble(ens.q_pmf, ens.cond + tuple(np.ones((q, 1)) for _ in range(n - ens.n_senders)))


def product_channel(a: ClassicalMac, b: ClassicalMac) -> ClassicalMac:
    """p((y_I, y_II) | x) = p_I(y_I | x_I) p_II(y_II | x_II), sender alphabets paired."""
    n = max(a.n_senders, b.n_senders)
    a, b = pad_senders(a, n), pad_senders(b, n)
    t = np.multiply.outer(a.table, b.table)
    # axes now: a inputs (n), ya, b inputs (n), yb -> interleave per sender
    order = []
    for i in range(n):
        order += [i, n + 1 + i]
    order += [n, 2 * n + 1]
    t = t.transpose(order)
    sizes = tuple(a.input_sizes[i] * b.input_sizes[i] for i in range(n))
    return ClassicalMac(t.reshape(*sizes, a.output_size * b.output_size))


def product_ensemble(ea: InputEnsemble, eb: InputEnsemble) -> InputEnsemble:
    """Independent ensembles on the two factors, with Q = (Q_I, Q_II)."""
    n = max(ea.n_senders, eb.n_senders)
    ea, eb = pad_ensemble(ea, n), pad_ensemble(eb, n)
    q = np.kron(ea.q_pmf, eb.q_pmf)
    cond = []
    for ca, cb in zip(ea.cond, eb.cond):
        c = np.einsum("qa,rb->qrab", ca, cb)
        cond.append(c.reshape(q.size, ca.shape[1] * cb.shape[1]))
    return InputEnsemble(q, tuple(cond))


def marginal_ensembles(ens: InputEnsemble, sizes_a: Sequence[int], sizes_b: Sequence[int]) -> tuple:
    """Split a product-channel ensemble into the factor marginals, keeping the same Q."""
    ca, cb = [], []
    for c, na, nb in zip(ens.cond, sizes_a, sizes_b):
        c = c.reshape(c.shape[0], na, nb)
        ca.append(c.sum(axis=2))
        cb.append(c.sum(axis=1))
    return InputEnsemble(ens.q_pmf, tuple(ca)), InputEnsemble(ens.q_pmf, tuple(cb))


# ---------------------------------------------------------------- additivity checks

@dataclass
class AdditivityReport:
    passed: bool
    worst_slack: float
    rank_sum_error: float
    product_vertices: RegionPolytope
    sum_vertices: RegionPolytope
    polymatroid_ok: bool
    detail: str = ""


def verify_additivity(a: ClassicalMac, b: ClassicalMac, ens_a: InputEnsemble,
                      ens_b: InputEnsemble, tol: float = TOL) -> AdditivityReport:
    """Region of the product channel under the product ensemble vs Minkowski sum of factor regions."""
    n = max(a.n_senders, b.n_senders)
    pa, pb = pad_senders(a, n), pad_senders(b, n)
    qa, qb = pad_ensemble(ens_a, n), pad_ensemble(ens_b, n)
    fa, fb = rank_function(pa, qa), rank_function(pb, qb)
    fp = rank_function(product_channel(pa, pb), product_ensemble(qa, qb))
    poly_ok = all(is_polymatroid(f).passed for f in (fa, fb, fp))
    v_prod = polymatroid_vertices(fp)
    v_sum = minkowski_sum(polymatroid_vertices(fa), polymatroid_vertices(fb))
    equal, worst = same_vertex_set(v_prod, v_sum, tol)
    rank_err = float(np.max(np.abs(fp.values - fa.values - fb.values)))
    detail = "" if equal else f"{len(v_prod)} product vertices vs {len(v_sum)} in the sum"
    return AdditivityReport(equal and poly_ok, worst, rank_err, v_prod, v_sum, poly_ok, detail)


@dataclass
class InclusionReport:
    passed: bool
    worst_rank_slack: float  # min over S of f_I(S) + f_II(S) - f_prod(S)
    vertices_dominated: bool
    product_vertices: RegionPolytope
    sum_vertices: RegionPolytope


def verify_inclusion(a: ClassicalMac, b: ClassicalMac, ens: InputEnsemble,
                     tol: float = TOL) -> InclusionReport:
    """Region of the product channel under a possibly correlated ensemble lies inside
    the Minkowski sum of the factor regions under the marginal ensembles."""
    n = max(a.n_senders, b.n_senders)
    pa, pb = pad_senders(a, n), pad_senders(b, n)
    prod = product_channel(pa, pb)
    if ens.n_senders != n:
        ens = pad_ensemble(ens, n)
    ea, eb = marginal_ensembles(ens, pa.input_sizes, pb.input_sizes)
    fa, fb = rank_function(pa, ea), rank_function(pb, eb)
    fp = rank_function(prod, ens)
    slack = float(np.min(fa.values + fb.values - fp.values))
    v_prod = polymatroid_vertices(fp)
    v_sum = minkowski_sum(polymatroid_vertices(fa), polymatroid_vertices(fb))
    dominated = all(in_convex_hull(v, v_sum.vertices, tol) for v in v_prod.vertices)
    return InclusionReport(slack >= -tol and dominated, slack, dominated, v_prod, v_sum)


# ---------------------------------------------------------------- convenience

def xor_mac() -> ClassicalMac:
    return ClassicalMac.deterministic((2, 2), 2, lambda a, b: a ^ b)


def random_mac(rng: np.random.Generator, input_sizes=(2, 2), output_size=2) -> ClassicalMac:
    t = rng.dirichlet(np.ones(output_size), size=int(np.prod(input_sizes)))
    return ClassicalMac.from_rows(input_sizes, output_size, t)


def random_ensemble(rng: np.random.Generator, input_sizes=(2, 2), q_size=1) -> InputEnsemble:
    q = rng.dirichlet(np.ones(q_size))
    return InputEnsemble(q, tuple(rng.dirichlet(np.ones(k), size=q_size) for k in input_sizes))

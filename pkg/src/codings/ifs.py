"""Parameterised IFS model S_i(x) = lambda_i x + (1 - lambda_i) p_i.

Model data (fixed points, ratios) is stored exactly as ``Fraction``s parsed
from decimal strings, so exact and floating point evaluation share one source.
Vector operations accept either float input (evaluated in float64) or
``Fraction`` input (evaluated exactly in object arrays).
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from decimal import Decimal
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import PreconditionError
from .symbolic import Word, champernowne_blocks

__all__ = [
    "FixedPointSet",
    "IfsModel",
    "HullCertificate",
    "Membership",
    "to_fraction",
    "vector",
    "forward_map",
    "inverse_map",
    "apply_word",
    "inverse_word",
    "project",
    "hull_condition",
    "homogeneous_hull_test",
    "p_k_membership",
    "m_k_lower_bound",
    "cycle_fixed_point",
    "affine_independence",
    "w_block_nondegeneracy",
    "hull_membership",
    "barycentric",
    "extremal_points",
    "hull_halfspaces",
    "find_hole_witnesses",
    "standard_simplex",
    "load_model",
    "dump_model",
    "format_exact",
]


# ---------------------------------------------------------------- numerics

def to_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, bool):
        raise TypeError("booleans are not coordinates")
    if isinstance(v, (int, float, Decimal)):
        return Fraction(v)
    if isinstance(v, np.integer):
        return Fraction(int(v))
    if isinstance(v, np.floating):
        return Fraction(float(v))
    if isinstance(v, str):
        return Fraction(v.strip())
    raise TypeError(f"cannot interpret {v!r} as a number")


def _is_exact(values) -> bool:
    return any(isinstance(v, (Fraction, str)) for v in values)


def vector(x, exact: bool | None = None) -> np.ndarray:
    """Coerce to a 1-D array: float64, or object dtype holding Fractions."""
    if isinstance(x, np.ndarray) and x.dtype != object and not exact:
        return np.asarray(x, dtype=float).reshape(-1)
    vals = list(np.asarray(x, dtype=object).reshape(-1))
    if exact is None:
        exact = _is_exact(vals)
    if exact:
        return np.array([to_fraction(v) for v in vals], dtype=object)
    return np.array([float(v) for v in vals], dtype=float)


def is_exact_vector(x: np.ndarray) -> bool:
    return x.dtype == object


def format_exact(v: Fraction) -> str:
    """Decimal string when the value has a finite decimal expansion, else 'p/q'."""
    v = to_fraction(v)
    den = v.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{v.numerator}/{v.denominator}"
    scale = max(twos, fives)
    digits = v.numerator * 10 ** scale // v.denominator
    s = str(abs(digits)).rjust(scale + 1, "0")
    out = s if scale == 0 else s[:-scale] + "." + s[-scale:]
    if scale:
        out = out.rstrip("0").rstrip(".")
    return ("-" if digits < 0 else "") + out


def format_decimal(v, digits: int = 40) -> str:
    """Finite decimal rendering with `digits` significant digits."""
    if isinstance(v, Fraction):
        from decimal import localcontext
        with localcontext() as ctx:
            ctx.prec = digits
            return str(Decimal(v.numerator) / Decimal(v.denominator))
    return repr(float(v))


def _exact_rank(rows: list[list[Fraction]]) -> int:
    m = [list(r) for r in rows]
    rank = 0
    cols = len(m[0]) if m else 0
    for c in range(cols):
        piv = next((r for r in range(rank, len(m)) if m[r][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][c] != 0:
                f = m[r][c] / m[rank][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def solve_exact(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> list[Fraction]:
    """Gauss-Jordan over Q for a small square system."""
    size = len(a)
    m = [list(map(to_fraction, row)) + [to_fraction(rhs)] for row, rhs in zip(a, b)]
    for c in range(size):
        piv = next((r for r in range(c, size) if m[r][c] != 0), None)
        if piv is None:
            raise PreconditionError("singular system")
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [v * inv for v in m[c]]
        for r in range(size):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [row[-1] for row in m]


# ------------------------------------------------------------------ models

@dataclass(frozen=True, init=False)
class FixedPointSet:
    """Distinct points p_0..p_n in R^d that affinely span R^d."""

    points: tuple[tuple[Fraction, ...], ...]

    def __init__(self, points: Iterable[Iterable]):
        pts = []
        for p in points:
            row = p if isinstance(p, (list, tuple, np.ndarray)) else [p]
            pts.append(tuple(to_fraction(v) for v in row))
        if not pts:
            raise PreconditionError("at least one fixed point is required")
        d = len(pts[0])
        if d < 1 or any(len(p) != d for p in pts):
            raise PreconditionError("fixed points must share a dimension d >= 1")
        if len(set(pts)) != len(pts):
            raise PreconditionError("fixed points must be distinct")
        diffs = [[a - b for a, b in zip(p, pts[0])] for p in pts[1:]]
        if len(pts) < d + 1 or _exact_rank(diffs) < d:
            raise PreconditionError(
                "fixed points lie in a (d-1)-dimensional affine subspace")
        object.__setattr__(self, "points", tuple(pts))

    @property
    def d(self) -> int:
        return len(self.points[0])

    @property
    def n(self) -> int:
        return len(self.points) - 1

    def __len__(self) -> int:
        return len(self.points)

    @property
    def array(self) -> np.ndarray:
        return np.array([[float(v) for v in p] for p in self.points], dtype=float)

    @property
    def exact(self) -> np.ndarray:
        return np.array(self.points, dtype=object)

    def point(self, i: int, exact: bool = False) -> np.ndarray:
        return vector(self.points[i], exact=exact)

    @property
    def diam(self) -> float:
        a = self.array
        return max(float(np.linalg.norm(p - q)) for p, q in itertools.combinations(a, 2))

    def centroid(self, exact: bool = False) -> np.ndarray:
        c = [sum(col, Fraction(0)) / len(self.points) for col in zip(*self.points)]
        return vector(c, exact=exact)

    @property
    def is_simplex(self) -> bool:
        return len(self.points) == self.d + 1


def standard_simplex(d: int) -> FixedPointSet:
    """e_0 = 0 and e_i the i-th unit vector."""
    pts = [[0] * d] + [[1 if j == i else 0 for j in range(d)] for i in range(d)]
    return FixedPointSet(pts)


@dataclass(frozen=True, init=False)
class IfsModel:
    """Fixed points plus contraction ratios (one shared ratio, or one per map)."""

    fixed_points: FixedPointSet
    ratios: Fraction | tuple[Fraction, ...]

    def __init__(self, fixed_points, ratios):
        if not isinstance(fixed_points, FixedPointSet):
            fixed_points = FixedPointSet(fixed_points)
        if isinstance(ratios, (list, tuple, np.ndarray)):
            rs = tuple(to_fraction(r) for r in ratios)
            if len(rs) != len(fixed_points):
                raise PreconditionError("need one ratio per fixed point")
            bad = [r for r in rs if not 0 < r < 1]
        else:
            rs = to_fraction(ratios)
            bad = [] if 0 < rs < 1 else [rs]
        if bad:
            raise PreconditionError(f"contraction ratios must lie in (0,1), got {float(bad[0])}")
        object.__setattr__(self, "fixed_points", fixed_points)
        object.__setattr__(self, "ratios", rs)

    @property
    def homogeneous(self) -> bool:
        return not isinstance(self.ratios, tuple)

    @property
    def d(self) -> int:
        return self.fixed_points.d

    @property
    def n(self) -> int:
        return self.fixed_points.n

    @property
    def lam(self) -> Fraction:
        if not self.homogeneous:
            raise PreconditionError("model is not homogeneous")
        return self.ratios

    def ratio(self, i: int, exact: bool = False):
        self._check_index(i)
        r = self.ratios if self.homogeneous else self.ratios[i]
        return r if exact else float(r)

    def ratio_list(self) -> list[Fraction]:
        return [self.ratios] * len(self.fixed_points) if self.homogeneous else list(self.ratios)

    def _check_index(self, i: int) -> None:
        if not 0 <= i <= self.n:
            raise PreconditionError(f"map index {i} outside 0..{self.n}")

    def with_ratios(self, ratios) -> "IfsModel":
        return IfsModel(self.fixed_points, ratios)

    def restrict(self, indices: Sequence[int]) -> "IfsModel":
        pts = [self.fixed_points.points[i] for i in indices]
        rs = self.ratios if self.homogeneous else [self.ratios[i] for i in indices]
        return IfsModel(pts, rs)


# --------------------------------------------------------------- the maps

def forward_map(ifs: IfsModel, i: int, x) -> np.ndarray:
    """S_i(x) = lambda_i x + (1 - lambda_i) p_i."""
    x = vector(x)
    exact = is_exact_vector(x)
    lam = ifs.ratio(i, exact)
    return lam * x + (1 - lam) * ifs.fixed_points.point(i, exact)


def inverse_map(ifs: IfsModel, i: int, x) -> np.ndarray:
    """T_i(x) = (x - (1 - lambda_i) p_i) / lambda_i, the inverse of S_i."""
    x = vector(x)
    exact = is_exact_vector(x)
    lam = ifs.ratio(i, exact)
    return (x - (1 - lam) * ifs.fixed_points.point(i, exact)) / lam


def apply_word(ifs: IfsModel, word: Iterable[int], x) -> np.ndarray:
    """S_{a_1} o ... o S_{a_m}(x)."""
    v = vector(x)
    for digit in reversed(list(word)):
        v = forward_map(ifs, digit, v)
    return v


def inverse_word(ifs: IfsModel, word: Iterable[int], x) -> np.ndarray:
    """T_a(x) = T_{a_m} o ... o T_{a_1}(x)."""
    v = vector(x)
    for digit in word:
        v = inverse_map(ifs, digit, v)
    return v


def project(ifs: IfsModel, prefix: Word | Iterable[int], exact: bool = False):
    """Truncated coding map.

    Returns ``(S_prefix(c), tail_radius)`` where ``c`` is the mean of the fixed
    points and ``tail_radius = prod(lambda_{a_j}) * Diam(conv F)``.  The image of
    every infinite extension of ``prefix`` lies within ``tail_radius`` of the
    returned point.
    """
    digits = list(prefix)
    centre = apply_word(ifs, digits, ifs.fixed_points.centroid(exact))
    log_scale = sum(math.log(ifs.ratio(a)) for a in digits)
    return centre, math.exp(log_scale) * ifs.fixed_points.diam


# ------------------------------------------------------- parameter regions

@dataclass(frozen=True)
class HullCertificate:
    satisfied: bool
    worst_subset: tuple[int, ...]
    margin: float
    exact_margin: Fraction

    def __post_init__(self):
        assert self.satisfied == (self.exact_margin >= 0)


def hull_condition(ifs: IfsModel) -> HullCertificate:
    """Minimum over (d+1)-subsets of the ratio sum, compared with d.

    The minimum is attained by the d+1 smallest ratios; ties go to the lowest
    indices, which is the lexicographically least minimising subset.
    """
    d = ifs.d
    rs = ifs.ratio_list()
    order = sorted(range(len(rs)), key=lambda i: (rs[i], i))
    subset = tuple(sorted(order[:d + 1]))
    margin = sum((rs[i] for i in subset), Fraction(0)) - d
    return HullCertificate(margin >= 0, subset, float(margin), margin)


def homogeneous_hull_test(lam, d: int) -> bool:
    """lambda >= d/(d+1), evaluated exactly."""
    return to_fraction(lam) >= Fraction(d, d + 1)


def p_k_membership(ifs: IfsModel, k: int) -> bool:
    """prod_i lambda_i^(k (n+1)^(k-1)) >= d/(d+1), evaluated exactly."""
    if k < 1:
        raise PreconditionError("k must be >= 1")
    e = k * (ifs.n + 1) ** (k - 1)
    prod = Fraction(1)
    for r in ifs.ratio_list():
        prod *= r
    return prod ** e >= Fraction(ifs.d, ifs.d + 1)


def m_k_lower_bound(n: int, k: int, d: int) -> float:
    """Left end of the homogeneous parameter interval [(d/(d+1))^(1/(k (n+1)^k)), 1)."""
    if n < 0 or k < 1 or d < 1:
        raise PreconditionError("need n >= 0, k >= 1, d >= 1")
    return (d / (d + 1)) ** (1.0 / (k * (n + 1) ** k))


def cycle_fixed_point(ifs: IfsModel, word: Word | Sequence[int], exact: bool = False) -> np.ndarray:
    """Fixed point of S_word, i.e. the image of word^infinity."""
    digits = list(word)
    if not digits:
        raise PreconditionError("word must be non-empty")
    zero = vector([0] * ifs.d, exact=exact)
    offset = apply_word(ifs, digits, zero)
    if exact:
        scale = Fraction(1)
        for a in digits:
            scale *= ifs.ratio(a, True)
        return offset / (1 - scale)
    one_minus = -math.expm1(sum(math.log(ifs.ratio(a)) for a in digits))
    return offset / one_minus


def affine_independence(points: Sequence, tol: float | None = None) -> tuple[bool, float]:
    """Determinant of the rows p_i - p_0; independent iff |det| > tol.

    The default tolerance is 1e-9 * Diam^d with Diam the diameter of the
    supplied points.
    """
    a = np.array([[float(v) for v in vector(p)] for p in points], dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] + 1:
        raise PreconditionError("need exactly d+1 points in R^d")
    d = a.shape[1]
    det = float(np.linalg.det(a[1:] - a[0])) if d > 0 else 1.0
    if tol is None:
        diam = max(float(np.linalg.norm(p - q)) for p, q in itertools.combinations(a, 2))
        tol = 1e-9 * diam ** d
    return abs(det) > tol, det


def w_block_nondegeneracy(ifs: IfsModel, k: int, tol: float | None = None) -> tuple[bool, float]:
    """Affine independence of the cycle fixed points of W_0, ..., W_d."""
    if ifs.n < ifs.d:
        raise PreconditionError(f"need n >= d blocks, have n={ifs.n} < d={ifs.d}")
    blocks = champernowne_blocks(ifs.n, k)
    fps = [cycle_fixed_point(ifs, blocks[i]) for i in range(ifs.d + 1)]
    return affine_independence(fps, tol)


# -------------------------------------------------------- hull membership

class Membership(str, Enum):
    EXTERIOR = "exterior"
    BOUNDARY = "boundary"
    INTERIOR = "interior"


def _points_of(F) -> list:
    if isinstance(F, IfsModel):
        F = F.fixed_points
    if isinstance(F, FixedPointSet):
        return list(F.points)
    return [tuple(np.atleast_1d(p)) for p in F]


def barycentric(simplex: Sequence, x) -> np.ndarray:
    """Barycentric coordinates of x with respect to d+1 points in R^d."""
    x = vector(x)
    if is_exact_vector(x):
        pts = [[to_fraction(v) for v in p] for p in simplex]
        d = len(pts[0])
        a = [[pts[j + 1][r] - pts[0][r] for j in range(d)] for r in range(d)]
        b = [x[r] - pts[0][r] for r in range(d)]
        w = solve_exact(a, b)
        return np.array([1 - sum(w, Fraction(0))] + w, dtype=object)
    pts = np.array([[float(v) for v in p] for p in simplex], dtype=float)
    a = (pts[1:] - pts[0]).T
    w = np.linalg.solve(a, x - pts[0])
    return np.concatenate([[1.0 - w.sum()], w])


def _max_min_weight(F, x) -> float:
    pts = np.array([[float(v) for v in p] for p in F], dtype=float)
    m, d = pts.shape
    c = np.zeros(m + 1)
    c[-1] = -1.0
    a_eq = np.zeros((d + 1, m + 1))
    a_eq[:d, :m] = pts.T
    a_eq[d, :m] = 1.0
    b_eq = np.concatenate([np.asarray(x, dtype=float), [1.0]])
    a_ub = np.zeros((m, m + 1))
    a_ub[:, :m] = -np.eye(m)
    a_ub[:, -1] = 1.0
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(m), A_eq=a_eq, b_eq=b_eq,
                  bounds=[(None, None)] * m + [(None, 1.0)], method="highs")
    if res.status != 0:
        raise RuntimeError(f"hull LP failed: {res.message}")
    return float(res.x[-1])


def hull_membership(F, x, tol: float = 1e-12) -> Membership:
    """Classify x against conv(F).

    The score is the largest achievable minimum weight over convex
    representations of x (a barycentric solve when F is a simplex, an LP
    otherwise): positive inside, zero on the boundary, negative outside.
    Scores within ``tol`` of zero count as boundary.
    """
    pts = _points_of(F)
    x = vector(x)
    d = len(pts[0])
    if len(pts) == d + 1:
        w = barycentric(pts, x)
        score = min(w)
        if is_exact_vector(x):
            tol = 0
    else:
        score = _max_min_weight(pts, x)
    if score > tol:
        return Membership.INTERIOR
    if score >= -tol:
        return Membership.BOUNDARY
    return Membership.EXTERIOR


def extremal_points(F, margin: float = 1e-10) -> list[int]:
    """Indices of points strictly separable from the hull of the others.

    For each p_i solve max t s.t. a.(p_i - p_j) >= t for j != i, |a|_inf <= 1;
    p_i is extremal iff the optimum exceeds margin * Diam.
    """
    pts = np.array([[float(v) for v in p] for p in _points_of(F)], dtype=float)
    m, d = pts.shape
    diam = max(float(np.linalg.norm(p - q)) for p, q in itertools.combinations(pts, 2))
    out = []
    for i in range(m):
        others = np.delete(pts, i, axis=0)
        diffs = pts[i] - others
        c = np.zeros(d + 1)
        c[-1] = -1.0
        a_ub = np.hstack([-diffs, np.ones((m - 1, 1))])
        res = linprog(c, A_ub=a_ub, b_ub=np.zeros(m - 1),
                      bounds=[(-1.0, 1.0)] * d + [(None, 1.0)], method="highs")
        if res.status == 0 and -res.fun > margin * diam:
            out.append(i)
    return out


def hull_halfspaces(F) -> tuple[np.ndarray, np.ndarray]:
    """Facet description conv(F) = {x : A x <= b} with unit-norm rows of A."""
    pts = np.array([[float(v) for v in p] for p in _points_of(F)], dtype=float)
    if pts.shape[1] == 1:
        return np.array([[-1.0], [1.0]]), np.array([-pts.min(), pts.max()])
    from scipy.spatial import ConvexHull
    eq = ConvexHull(pts).equations
    a, b = eq[:, :-1], -eq[:, -1]
    norms = np.linalg.norm(a, axis=1)
    a, b = a / norms[:, None], b / norms
    # merge duplicate facets produced by triangulated hulls
    keys = np.round(np.hstack([a, b[:, None]]), 12)
    _, idx = np.unique(keys, axis=0, return_index=True)
    idx.sort()
    return a[idx], b[idx]


# ------------------------------------------------------- no-holes search

def find_hole_witnesses(ratios, d: int, step) -> list[tuple[Fraction, ...]]:
    """Grid points x of the standard simplex with sum(x) > lambda_0 and
    x_i < 1 - lambda_i for every i >= 1.

    Such a point lies in no S_i(simplex); the search is exact on the grid
    {m * step}.
    """
    rs = [to_fraction(ratios)] * (d + 1) if not isinstance(ratios, (list, tuple)) \
        else [to_fraction(r) for r in ratios]
    step = to_fraction(step)
    steps = 1 / step
    if steps.denominator != 1:
        raise PreconditionError("grid step must divide 1")
    big_n = int(steps)
    # x_i < 1 - lambda_i  <=>  m_i < (1 - lambda_i) / step
    caps = [(1 - rs[i]) / step for i in range(1, d + 1)]
    out = []

    def rec(prefix, remaining):
        i = len(prefix)
        if i == d:
            if sum(prefix) * step > rs[0]:
                out.append(tuple(m * step for m in prefix))
            return
        for m in range(remaining + 1):
            if m >= caps[i]:
                break
            rec(prefix + [m], remaining - m)

    rec([], big_n)
    return out


# ------------------------------------------------------------------- JSON

def load_model(source) -> IfsModel:
    """Load {"d": int, "points": [[...]], "lambda": number | [numbers]}.

    Accepts a path, a JSON string or an already parsed dict.  Numbers are
    read as decimals so "0.95" means exactly 19/20.
    """
    if isinstance(source, dict):
        doc = source
    else:
        text = Path(source).read_text() if not str(source).lstrip().startswith("{") else str(source)
        doc = json.loads(text, parse_float=Decimal, parse_int=Decimal)
    try:
        points = doc["points"]
        lam = doc["lambda"]
    except KeyError as exc:
        raise PreconditionError(f"model document missing key {exc}") from None
    model = IfsModel(points, lam)
    if "d" in doc and int(doc["d"]) != model.d:
        raise PreconditionError(f"declared d={doc['d']} but points have dimension {model.d}")
    return model


def dump_model(model: IfsModel) -> dict:
    lam = format_exact(model.ratios) if model.homogeneous else [format_exact(r) for r in model.ratios]
    return {
        "d": model.d,
        "points": [[format_exact(v) for v in p] for p in model.fixed_points.points],
        "lambda": lam,
    }

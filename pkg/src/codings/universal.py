"""Constructive universal codings, Caratheodory simplices and explicit thresholds.

Stage construction (simplex frame, homogeneous lambda).  Given x in the corner
box (0, 1-lambda]^d and a target word b of length k, choose l and, for each
coordinate i, a set J_i of exponents s <= l-1 with s = i (mod d) such that

    sum_{s in J_i} lambda^(-s)  in  [Y_i - lambda^k, Y_i),
    Y = (x lambda^(-l) - (1-lambda) sum_j e_{b_j} lambda^(j-1)) / (1-lambda).

Writing digit i at position l-s+1 for s in J_i (zeros elsewhere) followed by b
gives a word a of length m = l+k with

    x = (1-lambda) sum_{j<=m} e_{a_j} lambda^(j-1) + lambda^m x_1,
    x_1 in (0, 1-lambda]^d,

so the construction can be repeated from x_1.  The exponent classes keep the
coordinates independent; each one-dimensional search is a depth-first subset
sum over the terms lambda^(-s).  All residuals are exact rationals.
"""

from __future__ import annotations

import functools
import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
import numpy as np
from scipy.optimize import linprog

from .errors import BudgetExhausted, PreconditionError, VerificationError
from .greedy import SimplexFrame, coding_stream, drive_to_corner, in_corner_box
from .ifs import (
    IfsModel,
    Membership,
    affine_independence,
    apply_word,
    barycentric,
    extremal_points,
    format_decimal,
    hull_membership,
    inverse_word,
    to_fraction,
    vector,
)
from .spectrum import PLASTIC
from .symbolic import Word, lex_words

__all__ = [
    "Stage",
    "UniversalCertificate",
    "CaratheodorySimplex",
    "universal_digit_block",
    "universal_coding_prefix",
    "chain_universal",
    "verify_certificate",
    "guaranteed_regime",
    "caratheodory_decompose",
    "interior_simplex_locate",
    "regular_polygon",
    "sample_interior",
    "thresholds",
    "threshold_table",
    "threshold_csv",
    "all_words",
]

DEFAULT_SEARCH_BUDGET = 2_000_000
TABLE_KS = tuple(range(2, 10))


# -------------------------------------------------------------- regime

def guaranteed_regime(lam, d: int) -> bool:
    """lambda in (2^(-1/2d), 1) with lambda^(-2d) not Pisot.

    For rational lambda the second clause is automatic: lambda^(-2d) is then a
    rational number in (1, 2), never an algebraic integer.  For a float the
    exact binary value is used, which is also rational.
    """
    lam = to_fraction(lam)
    return 0 < lam < 1 and lam ** (2 * d) > Fraction(1, 2)


# --------------------------------------------------------- stage search

def _subset_sum(terms: Sequence[float], lo: float, hi: float, budget: list) -> list[int] | None:
    """Indices of a subset of the descending positive terms with sum in [lo, hi).

    Depth-first, including each term before excluding it; a branch is cut when
    even all remaining terms cannot reach lo.  budget[0] counts nodes left.
    """
    suffix = np.concatenate([np.cumsum(terms[::-1])[::-1], [0.0]]) if len(terms) else np.zeros(1)
    stack: list = [(0, 0.0, None)]
    while stack:
        idx, s, chain = stack.pop()
        budget[0] -= 1
        if budget[0] < 0:
            return None
        if lo <= s < hi:
            out = []
            while chain is not None:
                out.append(chain[0])
                chain = chain[1]
            return out[::-1]
        if idx == len(terms) or s + suffix[idx] < lo:
            continue
        stack.append((idx + 1, s, chain))
        t = terms[idx]
        if s + t < hi:
            stack.append((idx + 1, s + t, (idx, chain)))
    return None


def _frame_inverse_word(y: list[Fraction], lam: Fraction, digits: Sequence[int]) -> list[Fraction]:
    out = list(y)
    for a in digits:
        if a:
            out[a - 1] -= 1 - lam
        out = [v / lam for v in out]
    return out


def _stage(y: list[Fraction], lam: Fraction, target: Sequence[int], budget: list,
           l_max: int) -> tuple[list[int], list[Fraction]]:
    """One construction stage in the simplex frame; returns (word, residual)."""
    d = len(y)
    k = len(target)
    if k == 0:
        return [], list(y)
    lamf = float(lam)
    width = lamf ** k
    # (1-lambda) sum_j e_{b_j} lambda^(j-1), per coordinate, divided by (1-lambda)
    shift = [0.0] * d
    for j, b in enumerate(target):
        if b:
            shift[b - 1] += lamf ** j
    yf = [float(v) for v in y]
    one_minus = 1.0 - lamf
    last_l = 0
    for l in range(1, l_max + 1):
        last_l = l
        scale = lamf ** (-l)
        big_y = [yf[i] * scale / one_minus - shift[i] for i in range(d)]
        if any(v <= 0 for v in big_y):
            continue
        margin = 1e-9 * max(1.0, max(big_y))
        chosen: list[list[int]] = []
        for axis in range(1, d + 1):
            exps = list(range(axis, l, d))[::-1]
            terms = [lamf ** (-s) for s in exps]
            hit = _subset_sum(terms, big_y[axis - 1] - width + margin, big_y[axis - 1] - margin, budget)
            if hit is None:
                break
            chosen.append([exps[t] for t in hit])
        if budget[0] < 0:
            raise BudgetExhausted(f"search budget exhausted at l={l}", last_attempt=l)
        if len(chosen) < d:
            continue
        word = [0] * l
        for axis, exps in enumerate(chosen, start=1):
            for s in exps:
                assert 1 <= s <= l - 1
                word[l - s] = axis
        p = max((s for exps in chosen for s in exps), default=0)
        assert p < l, "lattice word reaches the first position"
        word += list(target)
        residual = _frame_inverse_word(y, lam, word)
        if all(0 < v <= 1 - lam for v in residual):
            return word, residual
    raise BudgetExhausted(f"no admissible l up to l_max={l_max}", last_attempt=last_l)


def _check_stage_model(ifs: IfsModel) -> None:
    if not ifs.homogeneous:
        raise PreconditionError("the universal construction needs a homogeneous ratio")
    if ifs.n != ifs.d:
        raise PreconditionError("the universal construction runs on d+1 fixed points; use chain_universal")


def universal_digit_block(ifs: IfsModel, x, target, search_budget: int = DEFAULT_SEARCH_BUDGET,
                          l_max: int = 20_000) -> tuple[Word, np.ndarray]:
    """Extension word ending in `target` and the residual it leaves.

    x must lie in the corner box (0, 1-lambda]^d of the simplex frame.  Returns
    ``(a, x_1)`` with ``x = S_a(x_1)`` and x_1 again in the corner box; both x_1
    and the arithmetic are exact rationals (x_1 in original coordinates).
    """
    _check_stage_model(ifs)
    frame = SimplexFrame.from_points(ifs.fixed_points)
    lam = ifs.lam
    y = list(frame.to_frame(vector(x, exact=True)))
    if not in_corner_box(y, lam):
        raise PreconditionError(f"x must lie in the corner box (0, {float(1 - lam)}]^d")
    digits = list(target)
    if any(not 0 <= b <= ifs.n for b in digits):
        raise PreconditionError("target digit outside the alphabet")
    word, residual = _stage(y, lam, digits, [search_budget], l_max)
    return Word(word, ifs.n), frame.from_frame(np.array(residual, dtype=object))


# ---------------------------------------------------------- certificates

@dataclass(frozen=True)
class Stage:
    """State after a construction stage; coordinates are in the certificate frame."""

    target: Word | None
    length: int
    residual: tuple[Fraction, ...]
    anchor: tuple[Fraction, ...]
    side: Fraction

    @property
    def box(self) -> tuple[np.ndarray, float]:
        """(center, side) of the half-open cube anchor + (0, side]^d."""
        c = np.array([float(a + self.side / 2) for a in self.anchor])
        return c, float(self.side)


@dataclass(frozen=True)
class UniversalCertificate:
    """A prefix of a coding of x containing every target word.

    ``frame_indices`` names the d+1 fixed points spanning the frame in which
    the stage boxes are cubes.  At every stage ``x = S_{prefix[:length]}(r)``
    with ``r`` the stage residual, which lies in the corner box.
    """

    model: IfsModel
    x: tuple[Fraction, ...]
    prefix: Word
    targets: tuple[Word, ...]
    stages: tuple[Stage, ...]
    frame_indices: tuple[int, ...]
    guaranteed: bool

    @property
    def residual(self) -> np.ndarray:
        return np.array(self.stages[-1].residual, dtype=object)

    @property
    def frame(self) -> SimplexFrame:
        return SimplexFrame.from_points(self.model.restrict(self.frame_indices).fixed_points)

    def residual_point(self, stage: int = -1) -> np.ndarray:
        """Stage residual in original coordinates."""
        return self.frame.from_frame(np.array(self.stages[stage].residual, dtype=object))

    @property
    def containment_boxes(self) -> list[tuple[np.ndarray, float]]:
        return [s.box for s in self.stages]

    def to_dict(self) -> dict:
        fmt = lambda v: format_decimal(v, 40)  # noqa: E731
        return {
            "lambda": fmt(self.model.lam),
            "x": [fmt(v) for v in self.x],
            "prefix": str(self.prefix),
            "length": len(self.prefix),
            "targets": [str(t) for t in self.targets],
            "frame_indices": list(self.frame_indices),
            "guaranteed": self.guaranteed,
            "stages": [{
                "target": None if s.target is None else str(s.target),
                "length": s.length,
                "center": [fmt(a + s.side / 2) for a in s.anchor],
                "side": fmt(s.side),
                "residual": [fmt(v) for v in s.residual],
            } for s in self.stages],
            "residual": [fmt(v) for v in self.stages[-1].residual],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _make_stage(target, length, y0, residual, lam) -> Stage:
    lam_m = lam ** length
    anchor = tuple(a - lam_m * r for a, r in zip(y0, residual))
    return Stage(target, length, tuple(residual), anchor, (1 - lam) * lam_m)


def universal_coding_prefix(ifs: IfsModel, x, targets: Iterable, budget: int = DEFAULT_SEARCH_BUDGET,
                            l_max: int = 20_000, verify: bool = True) -> UniversalCertificate:
    """Coding prefix of an interior point x containing every target word.

    x is first driven into the corner box by the quasi-greedy rules, then one
    stage is appended per target.  Targets already present in the prefix are
    not rebuilt.
    """
    _check_stage_model(ifs)
    lam = ifs.lam
    n = ifs.n
    words = tuple(t if isinstance(t, Word) else Word(t, n) for t in targets)
    xv = vector(x, exact=True)
    if hull_membership(ifs, xv) is not Membership.INTERIOR:
        raise PreconditionError("x must lie in the interior of conv(F)")
    frame = SimplexFrame.from_points(ifs.fixed_points)
    y0 = list(frame.to_frame(xv))
    trace = drive_to_corner(ifs, xv)
    digits = list(trace.digits)
    y = list(frame.to_frame(trace.terminal))
    stages = [_make_stage(None, len(digits), y0, y, lam)]
    remaining = [budget]
    for w in words:
        if len(w) == 0 or Word(digits, n).contains(w):
            continue
        ext, y = _stage(y, lam, list(w), remaining, l_max)
        digits += ext
        stages.append(_make_stage(w, len(digits), y0, y, lam))
    cert = UniversalCertificate(ifs, tuple(xv), Word(digits, n), words, tuple(stages),
                                tuple(range(n + 1)), guaranteed_regime(lam, ifs.d))
    if verify:
        verify_certificate(cert)
    return cert


def chain_universal(ifs: IfsModel, x, restricted_digits: Iterable[int], bridge_word,
                    targets: Iterable, budget: int = DEFAULT_SEARCH_BUDGET,
                    l_max: int = 20_000, verify: bool = True) -> UniversalCertificate:
    """Universal prefix over the full alphabet from d+1 restricted maps and a bridge A.

    The restricted maps B span a simplex whose interior contains S_A(conv F).
    A target w using other digits is reached by steering the orbit into
    S_{A w A}(conv B): a restricted word v with S_v(conv B) inside that simplex
    is built as a stage target, and the stage's final v is replaced by A w A,
    which maps the orbit back into int(conv B).
    """
    n = ifs.n
    restricted = sorted(set(restricted_digits))
    bridge = list(bridge_word)
    words = tuple(t if isinstance(t, Word) else Word(t, n) for t in targets)
    if restricted == list(range(n + 1)) and not bridge:
        return universal_coding_prefix(ifs, x, words, budget, l_max, verify)
    if not ifs.homogeneous:
        raise PreconditionError("chaining needs a homogeneous ratio")
    if len(restricted) != ifs.d + 1:
        raise PreconditionError(f"need exactly d+1 = {ifs.d + 1} restricted digits")
    sub = ifs.restrict(restricted)  # raises if the points do not span R^d
    lam = ifs.lam
    frame = SimplexFrame.from_points(sub.fixed_points)
    verts = sub.fixed_points.points
    for j, p in enumerate(ifs.fixed_points.points):
        img = apply_word(ifs, bridge, vector(p, exact=True))
        if min(barycentric(verts, img)) <= 0:
            raise PreconditionError(
                f"bridge word fails: S_A(p_{j}) is not in the interior of the restricted simplex")
    relabel = {r: i for i, r in enumerate(restricted)}
    xv = vector(x, exact=True)
    if min(barycentric(verts, xv)) <= 0:
        raise PreconditionError("x must lie in the interior of the restricted simplex")
    y0 = list(frame.to_frame(xv))
    digits: list[int] = []
    stages: list[Stage] = []
    remaining = [budget]
    cur = xv  # original coordinates, x = S_digits(cur)
    # inradius of the restricted simplex measured from its centroid
    centroid_b = sub.fixed_points.centroid(exact=False)
    a_half, b_half = _simplex_halfspaces(sub.fixed_points.array)
    r_b = float(np.min(b_half - a_half @ centroid_b))
    diam_b = sub.fixed_points.diam

    def to_corner():
        nonlocal cur
        trace = drive_to_corner(sub, cur)
        digits.extend(restricted[a] for a in trace.digits)
        cur = trace.terminal
        y = list(frame.to_frame(cur))
        if not stages or stages[-1].length < len(digits):
            stages.append(_make_stage(None, len(digits), y0, y, lam))
        return y

    for w in words:
        if len(w) == 0 or Word(digits, n).contains(w):
            continue
        y = to_corner()
        if all(a in relabel for a in w):
            ext, y = _stage(y, lam, [relabel[a] for a in w], remaining, l_max)
            digits.extend(restricted[a] for a in ext)
            cur = frame.from_frame(np.array(y, dtype=object))
            stages.append(_make_stage(w, len(digits), y0, y, lam))
            continue
        awa = bridge + list(w) + bridge
        z = apply_word(ifs, awa, sub.fixed_points.centroid(exact=True))
        r = float(lam) ** len(awa) * r_b
        v_len = max(1, math.ceil(math.log(r / (2 * diam_b)) / math.log(float(lam))))
        v = list(coding_stream(sub, z, v_len))
        ext, y = _stage(y, lam, v, remaining, l_max)
        digits.extend(restricted[a] for a in ext[:len(ext) - len(v)])
        # the orbit point S_v(residual) lies in S_{AwA}(conv B)
        inside = apply_word(sub, v, frame.from_frame(np.array(y, dtype=object)))
        digits.extend(awa)
        cur = inverse_word(ifs, awa, inside)
        if min(barycentric(verts, cur)) <= 0:
            raise VerificationError("bridged orbit left the interior of the restricted simplex")
    to_corner()
    cert = UniversalCertificate(ifs, tuple(xv), Word(digits, n), words, tuple(stages),
                                tuple(restricted), guaranteed_regime(lam, ifs.d))
    if verify:
        verify_certificate(cert)
    return cert


def _subword(hay: Sequence[int], needle: Sequence[int]) -> bool:
    h = "," + ",".join(map(str, hay)) + ","
    return ("," + ",".join(map(str, needle)) + ",") in h if needle else True


def verify_certificate(cert: UniversalCertificate, tol: float = 1e-12, dps: int = 50) -> bool:
    """Independent check of a certificate; raises VerificationError on failure.

    Each stage identity x = S_{prefix[:m]}(r) is re-evaluated by composing the
    original maps in mpmath, the corner-box and nesting conditions are checked
    exactly, and every target is located by string search.
    """
    model = cert.model
    prefix = list(cert.prefix)
    for t in cert.targets:
        if not _subword(prefix, list(t)):
            raise VerificationError(f"target {t} does not occur in the prefix")
    lam = model.lam
    diam = model.fixed_points.diam
    frame = cert.frame
    y = frame.to_frame(np.array(cert.x, dtype=object))
    pts = model.fixed_points.points
    ends = {st.length for st in cert.stages}
    last_side = None
    with mpmath.workdps(dps):
        mp = lambda v: mpmath.mpf(v.numerator) / v.denominator  # noqa: E731
        lam_mp = mp(lam)
        x_mp = [mp(to_fraction(v)) for v in cert.x]
        # S_{a_1..a_m}(r) = lambda^m r + (1-lambda) sum_j lambda^(j-1) p_{a_j}
        anchors, acc, power = {}, [mpmath.mpf(0)] * model.d, mpmath.mpf(1)
        if 0 in ends:
            anchors[0] = (list(acc), power)
        for j, a in enumerate(prefix, start=1):
            acc = [c + (1 - lam_mp) * power * mp(q) for c, q in zip(acc, pts[a])]
            power *= lam_mp
            if j in ends:
                anchors[j] = (list(acc), power)
        for idx, st in enumerate(cert.stages):
            if not all(0 < v <= 1 - lam for v in st.residual):
                raise VerificationError(f"stage {idx} residual is outside the corner box")
            if last_side is not None and not st.side < last_side:
                raise VerificationError(f"stage {idx} box does not shrink")
            last_side = st.side
            r = frame.from_frame(np.array(st.residual, dtype=object))
            acc, power = anchors[st.length]
            err = max(abs(c + power * mp(rc) - xc) for c, rc, xc in zip(acc, r, x_mp))
            if err > tol * diam:
                raise VerificationError(f"stage {idx} identity off by {float(err):.3e}")
            if not all(0 < yc - ac <= st.side for yc, ac in zip(y, st.anchor)):
                raise VerificationError(f"stage {idx} box does not contain x")
    return True


# ----------------------------------------------------------- Caratheodory

@dataclass(frozen=True)
class CaratheodorySimplex:
    indices: tuple[int, ...]
    witness: np.ndarray
    extremal_flags: tuple[bool, ...]

    @property
    def min_weight(self) -> float:
        return float(np.min(self.witness))

    def points(self, F) -> np.ndarray:
        pts = _float_points(F)
        return pts[list(self.indices)]


def _float_points(F) -> np.ndarray:
    if isinstance(F, IfsModel):
        F = F.fixed_points
    if hasattr(F, "array"):
        return F.array
    return np.array([[float(v) for v in np.atleast_1d(p)] for p in F], dtype=float)


@functools.lru_cache(maxsize=64)
def _extremal_cached(key: tuple) -> tuple[int, ...]:
    return tuple(extremal_points([list(p) for p in key]))


def _extremal(pts: np.ndarray) -> list[int]:
    return list(_extremal_cached(tuple(map(tuple, pts.tolist()))))


def _simplex_halfspaces(pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    from .ifs import hull_halfspaces
    return hull_halfspaces(pts)


def _best_simplex(pts: np.ndarray, ext: list[int], x: np.ndarray):
    d = pts.shape[1]
    diam = max(float(np.linalg.norm(p - q)) for p, q in itertools.combinations(pts, 2))
    best = None
    for combo in itertools.combinations(ext, d + 1):
        sub = pts[list(combo)]
        ok, det = affine_independence(sub)
        if not ok:
            continue
        w = barycentric(sub, x)
        score = float(np.min(w))
        if best is None or score > best[0] + 1e-15:
            best = (score, combo, w)
    return best, diam


def _lp_basic(pts: np.ndarray, ext: list[int], x: np.ndarray) -> tuple[list[int], np.ndarray]:
    sub = pts[ext]
    m, d = sub.shape
    a_eq = np.vstack([sub.T, np.ones(m)])
    b_eq = np.concatenate([x, [1.0]])
    res = linprog(np.zeros(m), A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * m, method="highs-ds")
    if res.status != 0:
        raise PreconditionError("x lies outside conv(F)")
    w = res.x
    support = [i for i in range(m) if w[i] > 1e-14]
    # Caratheodory reduction if the solver returned a non-basic point
    while len(support) > 1:
        mat = np.vstack([sub[support].T, np.ones(len(support))])
        _, sv, vt = np.linalg.svd(mat)
        if len(support) <= mat.shape[0] and sv[-1] > 1e-12 * sv[0]:
            break
        mu = vt[-1]
        if not np.any(mu > 0):
            mu = -mu
        pos = mu > 0
        ratio = np.where(pos, w[support] / np.where(pos, mu, 1), np.inf)
        j = int(np.argmin(ratio))
        w[support] = w[support] - ratio[j] * mu
        w[support[j]] = 0.0
        support = [i for i in support if w[i] > 1e-14]
    return [ext[i] for i in support], w[support]


def caratheodory_decompose(F, x, method: str = "auto", tol: float = 1e-12) -> CaratheodorySimplex:
    """d+1 extremal, affinely independent points of F whose hull contains x.

    ``method="enumerate"`` scans all extremal (d+1)-subsets and keeps the one
    maximising the smallest barycentric weight.  ``method="lp"`` takes a basic
    solution of the weight LP (support on at most d+1 affinely independent
    extremal points, x possibly on a face) and pads it with extremal points
    off the current affine span.  ``auto`` enumerates when that is cheap.
    """
    pts = _float_points(F)
    x = np.asarray(vector(x, exact=False), dtype=float)
    d = pts.shape[1]
    if hull_membership(pts, x, tol=tol) is Membership.EXTERIOR:
        raise PreconditionError("x lies outside conv(F)")
    ext = _extremal(pts)
    if method == "auto":
        method = "enumerate" if math.comb(len(ext), d + 1) <= 5000 else "lp"
    if method == "enumerate":
        best, _ = _best_simplex(pts, ext, x)
        if best is None or best[0] < -tol:
            raise PreconditionError("x lies outside conv(F)")
        _, combo, w = best
        return CaratheodorySimplex(tuple(combo), np.asarray(w, dtype=float), (True,) * (d + 1))
    if method != "lp":
        raise PreconditionError(f"unknown method {method!r}")
    support, weights = _lp_basic(pts, ext, x)
    chosen = list(support)
    for j in ext:
        if len(chosen) == d + 1:
            break
        if j in chosen:
            continue
        trial = pts[chosen + [j]]
        rank = np.linalg.matrix_rank(trial[1:] - trial[0], tol=1e-10) if len(chosen) else 0
        if rank == len(chosen):
            chosen.append(j)
    if len(chosen) != d + 1:
        raise VerificationError("could not pad the support to an affinely independent simplex")
    order = sorted(range(d + 1), key=lambda i: chosen[i])
    chosen = [chosen[i] for i in order]
    w = barycentric(pts[chosen], x)
    return CaratheodorySimplex(tuple(chosen), np.asarray(w, dtype=float), (True,) * (d + 1))


def interior_simplex_locate(F, x, tol: float = 1e-10) -> CaratheodorySimplex | None:
    """An extremal (d+1)-subset with x strictly inside its hull, or None.

    Strict means every barycentric weight exceeds tol.
    """
    pts = _float_points(F)
    x = np.asarray(vector(x, exact=False), dtype=float)
    best, _ = _best_simplex(pts, _extremal(pts), x)
    if best is None or best[0] <= tol:
        return None
    _, combo, w = best
    return CaratheodorySimplex(tuple(combo), np.asarray(w, dtype=float), (True,) * len(combo))


def regular_polygon(m: int, radius: float = 1.0) -> np.ndarray:
    t = 2 * np.pi * np.arange(m) / m
    return radius * np.column_stack([np.cos(t), np.sin(t)])


def sample_interior(F, count: int, seed: int = 0, tol: float = 1e-10) -> np.ndarray:
    """Seeded uniform samples from int(conv F) by rejection from the bounding box."""
    pts = _float_points(F)
    a, b = _simplex_halfspaces(pts)
    rng = np.random.default_rng(seed)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    out: list[np.ndarray] = []
    while len(out) < count:
        cand = rng.uniform(lo, hi, size=(max(16, 2 * (count - len(out))), pts.shape[1]))
        ok = np.all(cand @ a.T < b - tol, axis=1)
        out.extend(cand[ok])
    return np.array(out[:count]).reshape(count, pts.shape[1])


# ------------------------------------------------------------- thresholds

def thresholds(kind: str, *, d: int | None = None, k: int | None = None, n: int | None = None) -> float:
    """Explicit parameter thresholds.

    d_plus_one(d)               2^(-1/2d)
    d_plus_one_unconditional(d) P^(-1/2d)
    explicit_k(k, n)            max((1/2)^(1/(k (n+1)^k)), P^(-1/2))
    q_table(k)                  min(2^(1/(k 2^k)), P^(1/2))
    with P the real root of x^3 - x - 1.
    """
    def need(name, v):
        if v is None or v < 1:
            raise PreconditionError(f"{kind} needs {name} >= 1")
        return v
    if kind == "d_plus_one":
        return 2.0 ** (-1.0 / (2 * need("d", d)))
    if kind == "d_plus_one_unconditional":
        return PLASTIC ** (-1.0 / (2 * need("d", d)))
    if kind == "explicit_k":
        k, n = need("k", k), need("n", n)
        return max(0.5 ** (1.0 / (k * (n + 1) ** k)), PLASTIC ** -0.5)
    if kind == "q_table":
        k = need("k", k)
        return min(2.0 ** (1.0 / (k * 2 ** k)), PLASTIC ** 0.5)
    raise PreconditionError(f"unknown threshold kind {kind!r}")


def threshold_table(ks: Iterable[int] = TABLE_KS) -> list[tuple[int, float]]:
    return [(k, thresholds("q_table", k=k)) for k in ks]


def threshold_csv(ks: Iterable[int] = TABLE_KS) -> str:
    lines = ["k,q_max"]
    lines += [f"{k},{v:.10f}" for k, v in threshold_table(ks)]
    return "\n".join(lines) + "\n"


def all_words(n: int, max_len: int) -> list[Word]:
    """Every word of length 1..max_len over {0..n}."""
    return [w for length in range(1, max_len + 1) for w in lex_words(n, length)]

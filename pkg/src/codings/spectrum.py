"""Spectra Z_n(q) = {sum_j a_j q^j : a_j in {0..n}}, their gaps, and Pisot checks.

Two arithmetic modes are provided.  Given a monic minimal polynomial for q,
points are kept as exact residues in Z[q] (integer coefficient vectors modulo
the polynomial) and only evaluated numerically for ordering; duplicates merge
exactly.  Given a bare float q, sums are float64 and points closer than a
tolerance merge, which flags the result as approximate.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import mpmath
import numpy as np
import sympy

from .errors import BudgetExhausted, PreconditionError

__all__ = [
    "SpectrumSet",
    "GapStats",
    "PisotCandidate",
    "Regime",
    "PLASTIC",
    "parse_poly",
    "dominant_real_root",
    "enumerate_spectrum",
    "gap_stats",
    "max_gap_bracket",
    "is_pisot",
    "feng_regime",
    "square_root_polynomial",
    "z_lattice",
    "epsilon_dense_check",
    "density_cutoff",
    "spectrum_to_csv",
    "cached_spectrum",
]


def _plastic() -> float:
    with mpmath.workdps(40):
        return float(mpmath.findroot(lambda x: x ** 3 - x - 1, 1.3247))


#: real root of x^3 - x - 1, the smallest Pisot number
PLASTIC = _plastic()


# ----------------------------------------------------------- polynomials

def parse_poly(poly) -> tuple[int, ...]:
    """Integer coefficients, highest degree first ("1,-1,-1" is x^2 - x - 1)."""
    if isinstance(poly, str):
        parts = [p for p in poly.replace(" ", "").split(",") if p]
        coeffs = []
        for p in parts:
            v = Fraction(p)
            if v.denominator != 1:
                raise PreconditionError(f"non-integer coefficient {p}")
            coeffs.append(int(v))
    else:
        coeffs = []
        for c in poly:
            if isinstance(c, float) and not c.is_integer():
                raise PreconditionError(f"non-integer coefficient {c}")
            if Fraction(c).denominator != 1:
                raise PreconditionError(f"non-integer coefficient {c}")
            coeffs.append(int(c))
    while coeffs and coeffs[0] == 0:
        coeffs.pop(0)
    if len(coeffs) < 2:
        raise PreconditionError("polynomial must have degree >= 1")
    return tuple(coeffs)


def _roots(coeffs: Sequence[int], dps: int = 50) -> list:
    with mpmath.workdps(dps):
        return mpmath.polyroots([mpmath.mpf(c) for c in coeffs], maxsteps=400, extraprec=4 * dps)


def dominant_real_root(poly, dps: int = 50) -> mpmath.mpf:
    """Largest real root of the polynomial, as an mpf at `dps` digits."""
    coeffs = parse_poly(poly)
    with mpmath.workdps(dps):
        real = [mpmath.re(r) for r in _roots(coeffs, dps) if abs(mpmath.im(r)) < mpmath.mpf(10) ** (-dps // 2)]
        if not real:
            raise PreconditionError(f"polynomial {coeffs} has no real root")
        # polish on the polynomial itself
        x0 = max(real)
        return mpmath.findroot(lambda x: mpmath.polyval(list(coeffs), x), x0)


# ------------------------------------------------------------- spectrum

@dataclass(frozen=True)
class SpectrumSet:
    """Sorted points of Z_n(q) in [lo, bound]; lo = 0 unless a window was requested.

    ``codes[i]`` (when present) encodes a digit string realising ``points[i]``:
    a_j is the j-th base-(n+1) digit of the code.  In exact mode ``residues[i]``
    is the point as an element of Z[q].
    """

    q: float
    n: int
    bound: float
    points: np.ndarray
    lo: float = 0.0
    exact: bool = False
    approximate: bool = False
    tol: float = 0.0
    poly: tuple[int, ...] | None = None
    codes: np.ndarray | None = field(default=None, repr=False)
    residues: tuple | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.points)

    def digits(self, index: int) -> list[int]:
        """Digits a_0, a_1, ... of the representation kept for points[index]."""
        if self.codes is None:
            raise PreconditionError("digit certificates were not retained for this spectrum")
        code, out = int(self.codes[index]), []
        while code:
            code, a = divmod(code, self.n + 1)
            out.append(a)
        return out or [0]

    def between(self, lo: float, hi: float) -> np.ndarray:
        i = np.searchsorted(self.points, lo, side="left")
        j = np.searchsorted(self.points, hi, side="right")
        return self.points[i:j]


def _top_degree(q: float, hi: float) -> int:
    if hi < 1:
        return -1
    m = int(math.floor(math.log(hi) / math.log(q)))
    while q ** (m + 1) <= hi:
        m += 1
    while m >= 0 and q ** m > hi:
        m -= 1
    return m


def _enumerate_float(q, n, lo, hi, tol, max_points):
    top = _top_degree(q, hi)
    powers = q ** np.arange(top + 1, dtype=float)
    below = np.concatenate([[0.0], n * np.cumsum(powers)])  # below[j] = n * sum_{i<j} q^i
    track = (n + 1) ** (top + 1) < 2 ** 62
    s = np.zeros(1)
    codes = np.zeros(1, dtype=np.int64) if track else None
    merged = False
    digits = np.arange(n + 1)
    for j in range(top, -1, -1):
        cand = (s[None, :] + (digits * powers[j])[:, None]).ravel()
        keep = (cand <= hi) & (cand + below[j] >= lo)
        cand = cand[keep]
        if track:
            cc = (codes[None, :] + (digits.astype(np.int64) * (n + 1) ** j)[:, None]).ravel()[keep]
        order = np.argsort(cand, kind="stable")
        cand = cand[order]
        if track:
            cc = cc[order]
        if len(cand):
            if tol > 0:
                cells = np.floor(cand / tol)
                first = np.concatenate([[True], cells[1:] != cells[:-1]])
                rep = np.maximum.accumulate(np.where(first, np.arange(len(cand)), 0))
                merged |= bool(np.any(cand[~first] != cand[rep[~first]]))
            else:
                first = np.concatenate([[True], np.diff(cand) > 0])
            cand = cand[first]
            if track:
                cc = cc[first]
        if len(cand) > max_points:
            raise BudgetExhausted(
                f"{len(cand)} partial sums at degree {j} exceed max_points={max_points}; "
                "raise the merge tolerance or narrow the window", last_attempt=j)
        s = cand
        if track:
            codes = cc
    return s, codes, merged


class _ZqRing:
    """Arithmetic in Z[q] = Z[x]/(f) for monic f."""

    def __init__(self, coeffs: tuple[int, ...], prec_bits: int):
        if coeffs[0] != 1:
            raise PreconditionError("exact mode needs a monic polynomial")
        self.f = coeffs
        self.deg = len(coeffs) - 1
        self.prec = prec_bits
        with mpmath.workprec(prec_bits):
            self.q = dominant_real_root(coeffs, dps=int(prec_bits * 0.31) + 10)
            self.qpow = [self.q ** i for i in range(self.deg)]

    def power(self, j: int) -> tuple[int, ...]:
        # residue of x^j, coefficients of 1, q, ..., q^{deg-1}
        r = [0] * self.deg
        r[0] = 1
        for _ in range(j):
            carry = r[-1]
            r = [0] + r[:-1]
            # q^deg = -(f_1 q^{deg-1} + ... + f_deg)
            for i in range(self.deg):
                r[i] -= carry * self.f[self.deg - i]
        return tuple(r)

    def value(self, r) -> mpmath.mpf:
        with mpmath.workprec(self.prec):
            return mpmath.fsum(c * p for c, p in zip(r, self.qpow))

    def le(self, r, bound: Fraction) -> bool:
        if all(c == 0 for c in r[1:]):
            return r[0] <= bound
        with mpmath.workprec(self.prec):
            return self.value(r) <= mpmath.mpf(bound.numerator) / bound.denominator

    def ge(self, r, bound: Fraction) -> bool:
        if all(c == 0 for c in r[1:]):
            return r[0] >= bound
        with mpmath.workprec(self.prec):
            return self.value(r) >= mpmath.mpf(bound.numerator) / bound.denominator


def _enumerate_exact(ring: _ZqRing, n, lo: Fraction, hi: Fraction, max_points):
    q = float(ring.q)
    top = _top_degree(q, float(hi))
    while top >= 0 and not ring.le(ring.power(top), hi):
        top -= 1
    while ring.le(ring.power(top + 1), hi):
        top += 1
    powers = [ring.power(j) for j in range(top + 1)]
    below = [tuple([0] * ring.deg)]
    for j in range(top + 1):
        below.append(tuple(b + n * p for b, p in zip(below[-1], powers[j])))
    states = {tuple([0] * ring.deg): 0}
    for j in range(top, -1, -1):
        nxt = {}
        for r, code in states.items():
            for a in range(n + 1):
                c = tuple(x + a * y for x, y in zip(r, powers[j]))
                if c in nxt:
                    continue
                if not ring.le(c, hi):
                    break  # larger digits only increase the sum
                if not ring.ge(tuple(x + y for x, y in zip(c, below[j])), lo):
                    continue
                nxt[c] = code + a * (n + 1) ** j
        if len(nxt) > max_points:
            raise BudgetExhausted(f"{len(nxt)} exact states exceed max_points={max_points}", last_attempt=j)
        states = nxt
    vals = [(ring.value(r), r, code) for r, code in states.items()]
    vals.sort(key=lambda t: t[0])
    return vals


def enumerate_spectrum(q: float | None = None, n: int = 1, bound: float = 1.0, *,
                       poly=None, window: tuple[float, float] | None = None,
                       tol: float | None = None, max_points: int = 5_000_000,
                       precision: int = 53) -> SpectrumSet:
    """Points of Z_n(q) in [0, bound] (or in `window` when given).

    Digits are chosen from the top degree down; a partial sum is discarded as
    soon as it exceeds the upper end, or when even the largest completion
    cannot reach the lower end, so the enumeration is exhaustive.

    Float mode merges points closer than ``tol`` (default ``1e-10 * q^M`` with
    ``M`` the top degree) and keeps one representative per merged cluster;
    kept points are always genuine elements of the set.  Exact mode (``poly``
    given) merges only equal elements of Z[q].
    """
    if n < 1:
        raise PreconditionError("digit bound n must be >= 1")
    if bound <= 0:
        raise PreconditionError("bound must be positive")
    if window is None:
        lo, hi = 0.0, bound
    else:
        lo, hi = window
        if not 0 <= lo <= hi <= bound:
            raise PreconditionError(f"window {window} is not inside [0, {bound}]")
    if poly is not None:
        coeffs = parse_poly(poly)
        ring = _ZqRing(coeffs, max(precision, 160))
        qf = float(ring.q)
        if qf <= 1:
            raise PreconditionError(f"dominant root {qf} is not > 1")
        if q is not None and abs(q - qf) > 1e-9 * qf:
            raise PreconditionError(f"q={q} is not the dominant root {qf} of the polynomial")
        vals = _enumerate_exact(ring, n, Fraction(lo), Fraction(hi), max_points)
        pts = np.array([float(v) for v, _, _ in vals], dtype=float)
        codes = np.array([c for _, _, c in vals], dtype=object)
        return SpectrumSet(qf, n, float(bound), pts, lo=float(lo), exact=True, approximate=False,
                           tol=0.0, poly=coeffs, codes=codes,
                           residues=tuple(r for _, r, _ in vals))
    if q is None:
        raise PreconditionError("give q or a polynomial")
    q = float(q)
    if q <= 1:
        raise PreconditionError(f"q must exceed 1, got {q}")
    if tol is None:
        tol = 1e-10 * q ** max(_top_degree(q, hi), 0)
    pts, codes, merged = _enumerate_float(q, n, float(lo), float(hi), tol, max_points)
    return SpectrumSet(q, n, float(bound), pts, lo=float(lo), exact=False, approximate=merged,
                       tol=float(tol), codes=codes)


# ---------------------------------------------------------------- gaps

@dataclass(frozen=True)
class GapStats:
    """Finite-window proxies for the liminf/limsup of consecutive gaps."""

    min_gap: float
    max_gap: float
    window: tuple[float, float]
    count: int
    approximate: bool = False
    argmax: tuple[float, float] | None = None


def _exact_gaps(spec: SpectrumSet, i: int, j: int) -> np.ndarray:
    ring = _ZqRing(spec.poly, 160)
    res = spec.residues[i:j]
    return np.array([float(ring.value(tuple(b - a for a, b in zip(r0, r1))))
                     for r0, r1 in zip(res[:-1], res[1:])], dtype=float)


def gap_stats(spec: SpectrumSet, window: tuple[float, float] | None = None) -> GapStats:
    """Min and max of consecutive differences among points inside window."""
    lo, hi = window if window is not None else (spec.lo, spec.bound)
    if lo < spec.lo - 1e-12 or hi > spec.bound + 1e-12 or lo > hi:
        raise PreconditionError(f"window ({lo}, {hi}) is not inside [{spec.lo}, {spec.bound}]")
    i = int(np.searchsorted(spec.points, lo, side="left"))
    j = int(np.searchsorted(spec.points, hi, side="right"))
    if j - i < 2:
        raise PreconditionError(f"window ({lo}, {hi}) holds {j - i} point(s); need at least 2")
    gaps = _exact_gaps(spec, i, j) if spec.exact else np.diff(spec.points[i:j])
    k = int(np.argmax(gaps))
    return GapStats(float(gaps.min()), float(gaps.max()), (float(lo), float(hi)), j - i,
                    spec.approximate, (float(spec.points[i + k]), float(spec.points[i + k + 1])))


def max_gap_bracket(q: float, n: int, window: tuple[float, float], tol: float,
                    max_points: int = 5_000_000) -> tuple[float, float]:
    """Rigorous (lower, upper) bracket for the largest gap of Z_n(q) inside window.

    The upper bound comes from a thinned enumeration: its points are genuine,
    so every true gap sits inside one of its gaps.  The lower bound is the
    largest gap found by an unthinned enumeration inside the widest thinned
    gap, which is itself a true gap.
    """
    lo, hi = window
    coarse = enumerate_spectrum(q, n, hi, window=(lo, hi), tol=tol, max_points=max_points)
    stats = gap_stats(coarse, (lo, hi))
    a, b = stats.argmax
    upper = stats.max_gap
    fine = enumerate_spectrum(q, n, hi, window=(a, b), tol=0.0, max_points=max_points)
    lower = float(np.diff(fine.points).max()) if len(fine) >= 2 else upper
    return lower, upper


def spectrum_to_csv(spec: SpectrumSet) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "value", "gap_to_next"])
    pts = spec.points
    for i, v in enumerate(pts):
        gap = repr(float(pts[i + 1] - v)) if i + 1 < len(pts) else ""
        w.writerow([i, repr(float(v)), gap])
    return buf.getvalue()


def cached_spectrum(cache_dir: str | Path, q: float | None = None, n: int = 1, bound: float = 1.0,
                    *, poly=None, precision: int = 53, **kwargs) -> SpectrumSet:
    """enumerate_spectrum memoised in an .npz file keyed by (poly or q, n, bound, precision)."""
    key_src = repr((parse_poly(poly) if poly is not None else repr(float(q)), n, repr(float(bound)),
                    precision, sorted(kwargs.items())))
    key = hashlib.sha256(key_src.encode()).hexdigest()[:24]
    path = Path(cache_dir) / f"spectrum-{key}.npz"
    if path.exists():
        with np.load(path, allow_pickle=True) as z:
            meta = z["meta"].item()
            return SpectrumSet(points=z["points"], codes=z["codes"] if z["codes"].size else None,
                               residues=tuple(map(tuple, meta.pop("residues"))) if meta.get("residues") else None,
                               **{k: v for k, v in meta.items() if k != "residues"})
    spec = enumerate_spectrum(q, n, bound, poly=poly, precision=precision, **kwargs)
    path.parent.mkdir(parents=True, exist_ok=True)
    meta = dict(q=spec.q, n=spec.n, bound=spec.bound, lo=spec.lo, exact=spec.exact,
                approximate=spec.approximate, tol=spec.tol, poly=spec.poly,
                residues=[list(r) for r in spec.residues] if spec.residues else None)
    np.savez(path, points=spec.points,
             codes=spec.codes if spec.codes is not None else np.array([]),
             meta=np.array(meta, dtype=object))
    return spec


# ----------------------------------------------------------------- Pisot

@dataclass(frozen=True)
class PisotCandidate:
    poly: tuple[int, ...]
    dominant_root: float
    conjugate_moduli: tuple[float, ...]
    certified: str  # "pisot" | "not_pisot" | "inconclusive"
    margin: float
    irreducible: bool


def is_pisot(poly, margin: float = 1e-9) -> PisotCandidate:
    """Certify whether the dominant root of a monic integer polynomial is Pisot.

    Roots come from a high-precision solver.  Pisot requires exactly one root
    of modulus above 1, real and positive, with all others below 1 - margin;
    any modulus within margin of 1 makes the answer inconclusive.
    """
    coeffs = parse_poly(poly)
    if coeffs[0] != 1:
        raise PreconditionError("polynomial must be monic")
    x = sympy.Symbol("x")
    _, factors = sympy.factor_list(sympy.Poly(list(coeffs), x))
    irreducible = len(factors) == 1 and factors[0][1] == 1
    roots = _roots(coeffs)
    moduli = [float(abs(r)) for r in roots]
    top = max(range(len(roots)), key=lambda i: moduli[i])
    dom = roots[top]
    others = tuple(sorted(m for i, m in enumerate(moduli) if i != top))
    dominant = float(mpmath.re(dom))
    if any(abs(m - 1) <= margin for m in moduli):
        status = "inconclusive"
    else:
        big = [r for r, m in zip(roots, moduli) if m > 1]
        ok = (len(big) == 1 and abs(float(mpmath.im(big[0]))) <= margin
              and float(mpmath.re(big[0])) > 1)
        status = "pisot" if ok else "not_pisot"
    if not irreducible:
        sub = [is_pisot([int(c) for c in f.all_coeffs()], margin)
               for f, _ in factors if f.degree() >= 1 and f.LC() == 1]
        if status == "pisot" or any(s.certified == "pisot" for s in sub):
            status = "inconclusive"
    return PisotCandidate(coeffs, dominant, others, status, margin, irreducible)


class Regime(str, Enum):
    GUARANTEED_L_ZERO = "guaranteed_L_zero"
    OUTSIDE_HYPOTHESIS = "outside_hypothesis"
    INCONCLUSIVE = "inconclusive"


def square_root_polynomial(poly) -> tuple[int, ...]:
    """Minimal polynomial of q^2 from the minimal polynomial f of q.

    f(x) f(-x) is even, so it is g(x^2) up to sign; the factor of g vanishing
    at q^2 is returned.
    """
    coeffs = parse_poly(poly)
    x, y = sympy.symbols("x y")
    f = sympy.Poly(list(coeffs), x)
    h = sympy.expand(f.as_expr() * f.as_expr().subs(x, -x))
    g = sympy.Poly(sympy.expand(h).subs(x ** 2, y), y)
    if g.free_symbols - {y}:
        g = sympy.Poly(sympy.Poly(h, x).as_expr().replace(x, sympy.sqrt(y)), y)
    q2 = dominant_real_root(coeffs) ** 2
    _, factors = sympy.factor_list(g)
    best = min(factors, key=lambda fe: abs(complex(fe[0].eval(sympy.Float(str(q2), 40)))))
    out = [int(c) for c in best[0].all_coeffs()]
    if out[0] < 0:
        out = [-c for c in out]
    return tuple(out)


def feng_regime(q: float, n: int, poly=None, margin: float = 1e-9) -> Regime:
    """Whether the vanishing-gap theorem applies to (q, n).

    Guaranteed when q < sqrt(n+1) and q^2 is certified non-Pisot via the
    supplied minimal polynomial of q, or unconditionally when q is below
    sqrt of the smallest Pisot number.  A bare decimal q above that cutoff is
    inconclusive: non-Pisotness cannot be read off a decimal.
    """
    if q <= 1:
        raise PreconditionError(f"q must exceed 1, got {q}")
    if q >= math.sqrt(n + 1):
        return Regime.OUTSIDE_HYPOTHESIS
    if q < math.sqrt(PLASTIC):
        return Regime.GUARANTEED_L_ZERO
    if poly is None:
        return Regime.INCONCLUSIVE
    cand = is_pisot(square_root_polynomial(poly), margin)
    if cand.certified == "not_pisot":
        return Regime.GUARANTEED_L_ZERO
    if cand.certified == "pisot":
        return Regime.OUTSIDE_HYPOTHESIS
    return Regime.INCONCLUSIVE


# ------------------------------------------------------- coordinate lattices

def z_lattice(lam, d: int, axis: int, depth: int) -> np.ndarray:
    """Sorted sums (1-lambda) sum_j a_j lambda^(-j), a_j in {0,1}, over the
    exponents j = axis, axis+d, ..., j <= depth*d."""
    lam = float(lam)
    if not 0 < lam < 1:
        raise PreconditionError("lambda must lie in (0,1)")
    if not 1 <= axis <= d:
        raise PreconditionError(f"axis must be in 1..{d}")
    pts = np.zeros(1)
    for j in range(axis, depth * d + 1, d):
        pts = np.concatenate([pts, pts + (1 - lam) * lam ** (-j)])
    return np.unique(pts)


def lattice_exponents(d: int, axis: int, depth: int) -> list[int]:
    return list(range(axis, depth * d + 1, d))


def epsilon_dense_check(points, interval: tuple[float, float], eps: float) -> bool:
    """True iff every t in [lo, hi] lies within eps of some point."""
    lo, hi = interval
    if not lo < hi:
        raise PreconditionError("interval must satisfy lo < hi")
    pts = np.asarray(points, dtype=float)
    i = int(np.searchsorted(pts, lo - eps, side="left"))
    j = int(np.searchsorted(pts, hi + eps, side="right"))
    near = pts[i:j]
    if len(near) == 0 or near[0] > lo + eps or near[-1] < hi - eps:
        return False
    return bool(np.all(np.diff(near) <= 2 * eps))


def density_cutoff(points, width: float, eps: float, step: float | None = None,
                   start: float = 0.0) -> float | None:
    """Smallest scanned C >= start with points eps-dense on [C, C + width]."""
    pts = np.asarray(points, dtype=float)
    step = step if step is not None else eps
    c = start
    while c + width <= pts[-1] + eps:
        if epsilon_dense_check(pts, (c, c + width), eps):
            return c
        c += step
    return None

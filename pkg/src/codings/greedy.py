"""Quasi-greedy codings.

For a homogeneous system on d+1 affinely independent fixed points with
lambda >= d/(d+1), the attractor is the simplex conv(F) and every interior
point can be steered into the corner box (0, 1-lambda]^d by inverse maps.
Everything runs in the normalised frame e_0 = 0, e_i = unit vectors, reached by
the affine change of coordinates sending p_i to e_i (the maps commute with it).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import BudgetExhausted, PreconditionError, VerificationError
from .ifs import (
    FixedPointSet,
    IfsModel,
    format_decimal,
    hull_halfspaces,
    inverse_map,
    is_exact_vector,
    solve_exact,
    vector,
)
from .symbolic import Word

__all__ = [
    "SimplexFrame",
    "GreedyTrace",
    "quasi_greedy_step",
    "drive_to_corner",
    "coding_stream",
    "in_corner_box",
]

DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class SimplexFrame:
    """Affine coordinates y with x = p_0 + sum_i y_i (p_i - p_0)."""

    origin: tuple[Fraction, ...]
    basis: tuple[tuple[Fraction, ...], ...]  # row i = p_{i+1} - p_0
    inverse: tuple[tuple[Fraction, ...], ...]  # y = inverse @ (x - p_0)

    @classmethod
    def from_points(cls, fps: FixedPointSet) -> "SimplexFrame":
        if not fps.is_simplex:
            raise PreconditionError("a simplex frame needs exactly d+1 fixed points")
        d = fps.d
        p0 = fps.points[0]
        rows = tuple(tuple(a - b for a, b in zip(p, p0)) for p in fps.points[1:])
        # columns of the frame matrix are the rows above
        mat = [[rows[j][r] for j in range(d)] for r in range(d)]
        inv_cols = [solve_exact(mat, [Fraction(int(r == c)) for r in range(d)]) for c in range(d)]
        inverse = tuple(tuple(inv_cols[c][r] for c in range(d)) for r in range(d))
        return cls(p0, rows, inverse)

    @property
    def d(self) -> int:
        return len(self.origin)

    def to_frame(self, x) -> np.ndarray:
        x = vector(x)
        if is_exact_vector(x):
            diff = [a - b for a, b in zip(x, self.origin)]
            return np.array([sum((m * v for m, v in zip(row, diff)), Fraction(0))
                             for row in self.inverse], dtype=object)
        inv = np.array(self.inverse, dtype=float)
        return inv @ (x - np.array(self.origin, dtype=float))

    def from_frame(self, y) -> np.ndarray:
        y = vector(y)
        if is_exact_vector(y):
            out = list(self.origin)
            for coef, row in zip(y, self.basis):
                out = [o + coef * r for o, r in zip(out, row)]
            return np.array(out, dtype=object)
        return np.array(self.origin, dtype=float) + y @ np.array(self.basis, dtype=float)


@dataclass(frozen=True)
class GreedyTrace:
    """Digits a with the orbit x, T_{a_1}(x), ... (original coordinates)."""

    digits: Word
    visited: tuple[np.ndarray, ...]
    terminal: np.ndarray

    def to_json(self) -> str:
        return json.dumps({
            "digits": str(self.digits),
            "points": [[format_decimal(v) for v in p] for p in self.visited],
            "terminal": [format_decimal(v) for v in self.terminal],
        })


# ------------------------------------------------------------ frame rules

def _frame_slacks(y) -> list:
    """Facet slacks of the standard simplex: y_1..y_d and 1 - sum(y)."""
    return list(y) + [1 - sum(y)]


def _frame_inverse(y, i: int, lam):
    out = y / lam
    if i:
        out = out.copy()
        out[i - 1] -= (1 - lam) / lam
    return out


def _in_frame_interior(y, tol) -> bool:
    return min(_frame_slacks(y)) > tol


def _in_frame_simplex(y, tol) -> bool:
    return min(_frame_slacks(y)) >= -tol


def in_corner_box(y, lam) -> bool:
    """y in (0, 1-lambda]^d, frame coordinates."""
    return all(0 < v <= 1 - lam for v in y)


def _frame_step(y, lam, tol) -> tuple[int, int]:
    """(digit, rule) chosen by the three quasi-greedy rules."""
    d = len(y)
    if _in_frame_interior(y, tol):
        for i in range(1, d + 1):
            if _in_frame_interior(_frame_inverse(y, i, lam), tol):
                return i, 1
        if not in_corner_box(y, lam):
            raise VerificationError(f"rule 2 fired outside the corner box at {list(map(float, y))}")
        return 0, 2
    for i in range(d + 1):
        if _in_frame_simplex(_frame_inverse(y, i, lam), tol):
            return i, 3
    raise VerificationError("no inverse map keeps a boundary point in the simplex")


def _check_frame_model(ifs: IfsModel) -> None:
    if not ifs.homogeneous:
        raise PreconditionError("quasi-greedy rules need a homogeneous ratio")
    if ifs.n != ifs.d:
        raise PreconditionError(f"quasi-greedy rules need d+1 = {ifs.d + 1} fixed points, got {ifs.n + 1}")
    if ifs.lam < Fraction(ifs.d, ifs.d + 1):
        raise PreconditionError(
            f"lambda = {float(ifs.lam)} is below d/(d+1) = {ifs.d / (ifs.d + 1):.6f}")


def _prepare(ifs: IfsModel, x, tol):
    _check_frame_model(ifs)
    frame = SimplexFrame.from_points(ifs.fixed_points)
    x = vector(x)
    exact = is_exact_vector(x)
    y = frame.to_frame(x)
    lam = ifs.ratio(0, exact)
    return frame, y, lam, (0 if exact else tol)


def quasi_greedy_step(ifs: IfsModel, x, tol: float = DEFAULT_TOL) -> int:
    """Next digit for x.

    Rule 1: x interior and T_i(x) interior for some i >= 1 -> smallest such i.
    Rule 2: x interior otherwise -> 0 (x is then in the corner box).
    Rule 3: x on the boundary -> smallest i with T_i(x) in the simplex.
    """
    frame, y, lam, tol = _prepare(ifs, x, tol)
    if not _in_frame_simplex(y, tol):
        raise PreconditionError("x lies outside conv(F)")
    return _frame_step(y, lam, tol)[0]


def drive_to_corner(ifs: IfsModel, x, step_budget: int = 100_000,
                    tol: float = DEFAULT_TOL) -> GreedyTrace:
    """Apply quasi-greedy inverse maps until the orbit enters (0, 1-lambda]^d.

    Box membership is judged in frame coordinates; for the standard simplex
    these coincide with x itself.
    """
    frame, y, lam, tol = _prepare(ifs, x, tol)
    if not _in_frame_interior(y, tol):
        raise PreconditionError("drive_to_corner needs x in the interior of conv(F)")
    digits: list[int] = []
    frames = [y]
    while not in_corner_box(y, lam):
        if len(digits) >= step_budget:
            raise BudgetExhausted(
                f"no corner hit within {step_budget} steps; the point may be numerically "
                "degenerate or the frame preconditions violated",
                last_attempt=Word(digits, ifs.n))
        digit, _ = _frame_step(y, lam, tol)
        y = _frame_inverse(y, digit, lam)
        digits.append(digit)
        frames.append(y)
    visited = tuple(frame.from_frame(v) for v in frames)
    return GreedyTrace(Word(digits, ifs.n), visited, visited[-1])


# -------------------------------------------------------------- streams

def _clamp_to_simplex(y):
    """Remove rounding excursions outside the standard simplex."""
    y = np.maximum(y, 0.0)
    s = y.sum()
    return y / s if s > 1.0 else y


def _quasi_greedy_stream(ifs: IfsModel, x, length: int, tol: float) -> list[int]:
    frame, y, lam, tol = _prepare(ifs, x, tol)
    if not _in_frame_simplex(y, max(tol, 1e-12) if tol else 0):
        raise PreconditionError("x lies outside conv(F)")
    exact = y.dtype == object
    if not exact:
        y = _clamp_to_simplex(y)
    out = []
    for _ in range(length):
        digit, _ = _frame_step(y, lam, tol)
        y = _frame_inverse(y, digit, lam)
        if not exact:
            y = _clamp_to_simplex(y)
        out.append(digit)
    return out


def _deepest_stream(ifs: IfsModel, x, length: int, tol: float) -> list[int]:
    a, b = hull_halfspaces(ifs.fixed_points)
    x = np.asarray(vector(x, exact=False), dtype=float)
    if np.min(b - a @ x) < -tol * ifs.fixed_points.diam:
        raise PreconditionError("x lies outside conv(F)")
    out = []
    for _ in range(length):
        # take the preimage lying deepest inside conv(F)
        best, best_depth, best_y = None, -np.inf, None
        for i in range(ifs.n + 1):
            y = inverse_map(ifs, i, x)
            depth = float(np.min(b - a @ y))
            if depth > best_depth:
                best, best_depth, best_y = i, depth, y
        if best_depth < -1e-9 * ifs.fixed_points.diam:
            raise VerificationError("no inverse map keeps the orbit in conv(F); is the hull condition met?")
        out.append(best)
        x = best_y
    return out


def coding_stream(ifs: IfsModel, x, length: int, tol: float = DEFAULT_TOL) -> Word:
    """A length-`length` prefix of a coding of x whose whole orbit stays in conv(F).

    Simplex frames with a homogeneous ratio >= d/(d+1) use the quasi-greedy
    rules; any other system meeting the hull condition picks at each step the
    preimage with the largest facet slack.
    """
    from .ifs import hull_condition

    if length < 0:
        raise PreconditionError("length must be >= 0")
    if not hull_condition(ifs).satisfied:
        raise PreconditionError("hull condition fails; conv(F) is not the attractor")
    if ifs.homogeneous and ifs.n == ifs.d:
        digits = _quasi_greedy_stream(ifs, x, length, tol)
    else:
        digits = _deepest_stream(ifs, x, length, tol)
    return Word(digits, ifs.n)


def orbit(ifs: IfsModel, x, digits: Sequence[int]) -> list[np.ndarray]:
    """x, T_{a_1}(x), T_{a_2}T_{a_1}(x), ..."""
    pts = [vector(x)]
    for a in digits:
        pts.append(inverse_map(ifs, a, pts[-1]))
    return pts

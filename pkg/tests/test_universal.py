import dataclasses
import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from codings.errors import PreconditionError, VerificationError
from codings.ifs import IfsModel, Membership, hull_membership, project
from codings.spectrum import PLASTIC
from codings.symbolic import Word
from codings.universal import (
    all_words,
    caratheodory_decompose,
    chain_universal,
    guaranteed_regime,
    interior_simplex_locate,
    regular_polygon,
    sample_interior,
    threshold_csv,
    thresholds,
    universal_coding_prefix,
    universal_digit_block,
    verify_certificate,
)

LINE = IfsModel([[0], [1]], "0.95")
TRIANGLE = IfsModel([[0, 0], [1, 0], [0, 1]], "0.9")
SQUARE = [[0, 0], [1, 0], [0, 1], [1, 1]]


def line_identity(lam, digits, residual):
    # F = {0, 1}: S_a(r) = (1-lam) sum_j a_j lam^(j-1) + lam^m r
    head = sum((1 - lam) * lam ** j for j, a in enumerate(digits) if a == 1)
    return head + lam ** len(digits) * residual


# ----------------------------------------------------------------- regime

@pytest.mark.parametrize("lam,d,expected", [
    ("0.95", 1, True), ("0.7", 1, False), ("0.71", 1, True),
    ("0.85", 2, True), ("0.84", 2, False), ("1", 1, False),
])
def test_guaranteed_regime(lam, d, expected):
    assert guaranteed_regime(lam, d) is expected


# ----------------------------------------------------------------- stages

def test_empty_target_is_a_no_op():
    word, residual = universal_digit_block(LINE, [Fraction(3, 100)], [])
    assert len(word) == 0 and residual[0] == Fraction(3, 100)


def test_stage_example():
    x = Fraction(3, 100)
    word, residual = universal_digit_block(LINE, [x], [1, 1])
    assert str(word).endswith("11")
    r = residual[0]
    assert 0 < r <= Fraction(1, 20)
    assert line_identity(Fraction(19, 20), list(word), r) == x


@pytest.mark.parametrize("target", [[0], [1], [0, 1, 0], [1, 1, 1, 0]])
def test_stage_identity_exact(target):
    x = Fraction(1, 41)
    word, residual = universal_digit_block(LINE, [x], target)
    assert list(word)[-len(target):] == target
    assert 0 < residual[0] <= Fraction(1, 20)
    assert line_identity(Fraction(19, 20), list(word), residual[0]) == x


@pytest.mark.parametrize("x", ["0", "0.06", "-0.01"])
def test_stage_needs_corner_box(x):
    with pytest.raises(PreconditionError):
        universal_digit_block(LINE, [Fraction(x)], [1])


def test_stage_rejects_foreign_digit():
    with pytest.raises(PreconditionError):
        universal_digit_block(LINE, [Fraction(1, 50)], [2])


# ----------------------------------------------------------- certificates

def test_certificate_triangle():
    targets = all_words(2, 2)
    cert = universal_coding_prefix(TRIANGLE, [0.3, 0.3], targets)
    text = str(cert.prefix)
    assert all(str(t) in text for t in targets)
    assert cert.guaranteed
    assert verify_certificate(cert)
    centre, radius = project(TRIANGLE, cert.prefix)
    assert np.linalg.norm(centre - [0.3, 0.3]) <= radius + 1e-12


def test_single_digit_targets_skip_stages():
    cert = universal_coding_prefix(LINE, [0.5], [[0], [1]])
    # the drive to the corner already contains both digits or one stage adds the missing one
    assert len(cert.stages) <= 2
    assert "0" in str(cert.prefix) and "1" in str(cert.prefix)


def test_stage_sides_shrink_and_boxes_contain_x():
    cert = universal_coding_prefix(LINE, [Fraction(7, 10)], all_words(1, 3))
    sides = [s.side for s in cert.stages]
    assert all(b < a for a, b in zip(sides, sides[1:]))
    for centre, side in cert.containment_boxes:
        assert abs(centre[0] - 0.7) <= side / 2 + 1e-15
    r = cert.residual_point()[0]
    assert line_identity(Fraction(19, 20), list(cert.prefix), r) == Fraction(7, 10)


def test_certificate_json():
    cert = universal_coding_prefix(LINE, [Fraction(1, 3)], [[1, 0, 1]])
    data = json.loads(cert.to_json())
    assert data["prefix"] == str(cert.prefix)
    assert data["length"] == len(cert.prefix)
    assert data["targets"] == ["101"]
    assert data["x"][0].startswith("0.3333333333")
    assert len(data["stages"]) == len(cert.stages)


def test_verifier_catches_tampering():
    cert = universal_coding_prefix(LINE, [Fraction(2, 3)], [[1, 1, 0]])
    digits = list(cert.prefix)
    digits[0] = 1 - digits[0]
    bad = dataclasses.replace(cert, prefix=Word(digits, 1))
    with pytest.raises(VerificationError):
        verify_certificate(bad)
    missing = dataclasses.replace(cert, targets=(Word([0] * 300, 1),))
    with pytest.raises(VerificationError):
        verify_certificate(missing)


@pytest.mark.parametrize("x", [[0.0], [1.0], [1.2]])
def test_prefix_needs_interior_point(x):
    with pytest.raises(PreconditionError):
        universal_coding_prefix(LINE, x, [[1]])


def test_prefix_needs_homogeneous_simplex():
    with pytest.raises(PreconditionError):
        universal_coding_prefix(IfsModel([[0], [1]], ["0.9", "0.95"]), [0.5], [[1]])
    with pytest.raises(PreconditionError):
        universal_coding_prefix(IfsModel([[0], [0.4], [1]], "0.95"), [0.5], [[1]])


@settings(max_examples=25, deadline=None)
@given(x=st.fractions(Fraction(1, 1000), Fraction(999, 1000)),
       targets=st.lists(st.lists(st.integers(0, 1), min_size=1, max_size=4), min_size=1, max_size=4))
def test_certificates_always_verify(x, targets):
    cert = universal_coding_prefix(LINE, [x], targets, verify=False)
    assert verify_certificate(cert)
    assert line_identity(Fraction(19, 20), list(cert.prefix), cert.residual_point()[0]) == x


# ---------------------------------------------------------------- chains

CHAIN = IfsModel([[0], ["0.4"], [1]], "0.97")


def test_chain_example():
    targets = all_words(2, 2)
    cert = chain_universal(CHAIN, [0.5], [0, 2], [1], targets)
    text = str(cert.prefix)
    assert all(str(t) in text for t in targets)
    assert cert.frame_indices == (0, 2)
    centre, radius = project(CHAIN, cert.prefix)
    assert abs(centre[0] - 0.5) <= radius + 1e-12


def test_chain_delegates_for_full_alphabet():
    a = chain_universal(LINE, [Fraction(1, 3)], [0, 1], [], [[1, 0]])
    b = universal_coding_prefix(LINE, [Fraction(1, 3)], [[1, 0]])
    assert a.prefix == b.prefix


def test_chain_rejects_weak_bridge():
    with pytest.raises(PreconditionError, match="bridge word fails"):
        chain_universal(CHAIN, [0.5], [0, 2], [], [[1]])


def test_chain_needs_d_plus_one_digits():
    with pytest.raises(PreconditionError):
        chain_universal(CHAIN, [0.5], [0], [1], [[1]])


# ---------------------------------------------------------- Caratheodory

@pytest.mark.parametrize("method", ["enumerate", "lp", "auto"])
def test_square_decomposition(method):
    simplex = caratheodory_decompose(SQUARE, [0.25, 0.25], method=method)
    assert simplex.indices == (0, 1, 2)
    assert np.allclose(simplex.witness, [0.5, 0.25, 0.25])


def test_vertex_decomposition():
    simplex = caratheodory_decompose(SQUARE, [1, 1], method="enumerate")
    assert 3 in simplex.indices
    assert simplex.witness[simplex.indices.index(3)] == pytest.approx(1.0)


def test_decomposition_skips_non_extremal_points():
    F = SQUARE + [[0.5, 0.5]]
    simplex = caratheodory_decompose(F, [0.4, 0.45])
    assert 4 not in simplex.indices


def test_decomposition_errors():
    with pytest.raises(PreconditionError):
        caratheodory_decompose(SQUARE, [2, 2])
    with pytest.raises(PreconditionError):
        caratheodory_decompose(SQUARE, [0.5, 0.5], method="magic")


@settings(max_examples=50, deadline=None)
@given(m=st.integers(3, 9), seed=st.integers(0, 2 ** 16), method=st.sampled_from(["enumerate", "lp"]))
def test_decomposition_weights(m, seed, method):
    F = regular_polygon(m)
    x = sample_interior(F, 1, seed=seed)[0]
    simplex = caratheodory_decompose(F, x, method=method)
    w = simplex.witness
    assert len(simplex.indices) == 3 == len(set(simplex.indices))
    assert np.all(w >= -1e-12) and w.sum() == pytest.approx(1.0)
    assert np.allclose(w @ F[list(simplex.indices)], x, atol=1e-12)


def test_hexagon_centre_located():
    found = interior_simplex_locate(regular_polygon(6), [0.0, 0.0])
    assert found is not None
    assert sorted(found.indices) in ([0, 2, 4], [1, 3, 5])
    assert np.allclose(found.witness, 1 / 3)


def test_triangle_locate():
    found = interior_simplex_locate([[0, 0], [3, 0], [0, 3]], [1, 1])
    assert found.indices == (0, 1, 2)
    assert np.allclose(found.witness, 1 / 3)


def test_square_centre_has_no_interior_simplex():
    assert interior_simplex_locate(SQUARE, [0.5, 0.5]) is None
    assert interior_simplex_locate(SQUARE, [0.4, 0.45]) is not None


def test_sample_interior_is_seeded_and_interior():
    F = regular_polygon(5)
    a = sample_interior(F, 50, seed=3)
    assert np.array_equal(a, sample_interior(F, 50, seed=3))
    assert all(hull_membership(F, x) is Membership.INTERIOR for x in a)


# ------------------------------------------------------------- thresholds

@pytest.mark.parametrize("kind,kwargs,expected", [
    ("d_plus_one", dict(d=1), 2 ** -0.5),
    ("d_plus_one", dict(d=3), 2 ** (-1 / 6)),
    ("d_plus_one_unconditional", dict(d=1), PLASTIC ** -0.5),
    ("explicit_k", dict(k=1, n=1), PLASTIC ** -0.5),
    ("explicit_k", dict(k=3, n=1), 0.5 ** (1 / 24)),
    ("q_table", dict(k=2), 2 ** (1 / 8)),
    ("q_table", dict(k=1), PLASTIC ** 0.5),
])
def test_thresholds(kind, kwargs, expected):
    assert thresholds(kind, **kwargs) == pytest.approx(expected, rel=1e-15)


def test_threshold_d_plus_one_value():
    assert round(thresholds("d_plus_one", d=1), 5) == 0.70711


def test_threshold_errors():
    with pytest.raises(PreconditionError):
        thresholds("nonsense", d=1)
    with pytest.raises(PreconditionError):
        thresholds("explicit_k", k=2)


def test_threshold_csv():
    lines = threshold_csv().strip().splitlines()
    assert lines[0] == "k,q_max"
    assert [int(r.split(",")[0]) for r in lines[1:]] == list(range(2, 10))


def test_all_words():
    assert [str(w) for w in all_words(1, 2)] == ["0", "1", "00", "01", "10", "11"]

import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from codings.errors import PreconditionError
from codings.ifs import (
    FixedPointSet,
    IfsModel,
    Membership,
    affine_independence,
    apply_word,
    cycle_fixed_point,
    dump_model,
    extremal_points,
    find_hole_witnesses,
    format_exact,
    forward_map,
    homogeneous_hull_test,
    hull_condition,
    hull_halfspaces,
    hull_membership,
    inverse_map,
    load_model,
    m_k_lower_bound,
    p_k_membership,
    project,
    standard_simplex,
    w_block_nondegeneracy,
)
from codings.symbolic import champernowne_blocks

from oracles import simplex_grid

UNIT = IfsModel([[0], [1]], "0.5")


# ------------------------------------------------------------ models

def test_fixed_points_reject_collinear_set():
    with pytest.raises(PreconditionError):
        FixedPointSet([[0, 0], [1, 1], [2, 2]])


def test_fixed_points_reject_duplicates():
    with pytest.raises(PreconditionError):
        FixedPointSet([[0], [0], [1]])


@pytest.mark.parametrize("ratios", ["1", "0", "-0.1", ["0.5", "1.2"]])
def test_model_rejects_bad_ratios(ratios):
    with pytest.raises(PreconditionError):
        IfsModel([[0], [1]], ratios)


def test_model_index_check():
    with pytest.raises(PreconditionError):
        forward_map(UNIT, 2, [0.1])


def test_json_round_trip(tmp_path):
    model = IfsModel([["0", "0"], ["1", "0"], ["0.5", "0.8660254"]], ["0.9", "0.95", "1/3"])
    path = tmp_path / "m.json"
    path.write_text(json.dumps(dump_model(model)))
    again = load_model(path)
    assert again == model
    assert dump_model(again)["lambda"] == ["0.9", "0.95", "1/3"]


def test_json_numbers_are_read_as_decimals():
    model = load_model('{"d": 1, "points": [[0], [1]], "lambda": 0.95}')
    assert model.lam == Fraction(19, 20)


def test_json_dimension_mismatch():
    with pytest.raises(PreconditionError):
        load_model({"d": 2, "points": [[0], [1]], "lambda": "0.5"})


@pytest.mark.parametrize("value,text", [(Fraction(1, 8), "0.125"), (Fraction(-3, 2), "-1.5"),
                                        (Fraction(1, 3), "1/3"), (Fraction(7), "7")])
def test_format_exact(value, text):
    assert format_exact(value) == text
    assert Fraction(text) == value


# ---------------------------------------------------------------- maps

def test_map_fixes_its_point():
    model = IfsModel([[0, 0], [2, 0], [0, 3]], "0.7")
    for i in range(3):
        p = model.fixed_points.point(i)
        assert np.allclose(forward_map(model, i, p), p)


def test_inverse_example():
    model = IfsModel([[0], [1]], "0.8")
    assert inverse_map(model, 1, [0.5])[0] == pytest.approx(0.375)
    assert inverse_map(model, 1, [Fraction(1, 2)])[0] == Fraction(3, 8)


coords = st.floats(-50, 50, allow_nan=False)


@settings(max_examples=200)
@given(x=st.lists(coords, min_size=2, max_size=2), y=st.lists(coords, min_size=2, max_size=2),
       i=st.integers(0, 2), lam=st.floats(0.3, 0.99))
def test_contraction_and_round_trip(x, y, i, lam):
    model = IfsModel([[0, 0], [3, 0], [1, 2]], lam)
    x, y = np.array(x), np.array(y)
    sx, sy = forward_map(model, i, x), forward_map(model, i, y)
    dist = np.linalg.norm(x - y)
    assert np.linalg.norm(sx - sy) == pytest.approx(model.ratio(i) * dist, rel=1e-12, abs=1e-12)
    back = inverse_map(model, i, sx)
    scale = max(np.max(np.abs(x)), 3.0, np.max(np.abs(sx)))
    assert np.max(np.abs(back - x)) <= 10 * np.finfo(float).eps * scale


def test_exact_round_trip():
    model = IfsModel([[0, 0], [1, 0], [0, 1]], "0.37")
    x = np.array([Fraction(1, 7), Fraction(-2, 3)], dtype=object)
    for i in range(3):
        assert list(inverse_map(model, i, forward_map(model, i, x))) == list(x)


# ----------------------------------------------------------- projection

def test_project_binary_example():
    centre, radius = project(UNIT, [1, 0])
    assert centre[0] == pytest.approx(0.625) and radius == pytest.approx(0.25)


def test_project_empty_prefix():
    model = IfsModel([[0, 0], [1, 0], [0, 1]], "0.9")
    centre, radius = project(model, [])
    assert np.allclose(centre, [1 / 3, 1 / 3])
    assert radius == pytest.approx(math.sqrt(2))


@pytest.mark.parametrize("m", [1, 5, 20])
def test_project_constant_prefix_converges(m):
    model = IfsModel([[0, 0], [1, 0], [0, 1]], "0.8")
    centre, radius = project(model, [2] * m)
    assert radius == pytest.approx(0.8 ** m * math.sqrt(2))
    assert np.linalg.norm(centre - [0, 1]) <= radius


@settings(max_examples=60)
@given(prefix=st.lists(st.integers(0, 2), max_size=10),
       ext1=st.lists(st.integers(0, 2), max_size=12), ext2=st.lists(st.integers(0, 2), max_size=12))
def test_project_tail_bound(prefix, ext1, ext2):
    model = IfsModel([[0, 0], [2, 0], [0, 1]], ["0.6", "0.7", "0.8"])
    c1, _ = project(model, prefix + ext1)
    c2, _ = project(model, prefix + ext2)
    _, radius = project(model, prefix)
    assert np.linalg.norm(c1 - c2) <= radius * (1 + 1e-12)


# ------------------------------------------------------- hull condition

def test_hull_condition_boundary_case():
    cert = hull_condition(IfsModel([[0], [1]], ["0.5", "0.5"]))
    assert cert.satisfied and cert.exact_margin == 0


def test_hull_condition_fails_in_plane():
    cert = hull_condition(IfsModel([[0, 0], [1, 0], [0, 1]], "0.6"))
    assert not cert.satisfied
    assert cert.margin == pytest.approx(-0.2)


def test_hull_condition_worst_pair():
    cert = hull_condition(IfsModel([[0], [1], [2]], ["0.3", "0.4", "0.8"]))
    assert not cert.satisfied
    assert cert.worst_subset == (0, 1)
    assert cert.exact_margin == Fraction(-3, 10)


def test_hull_condition_tie_break():
    cert = hull_condition(IfsModel([[0], [1], [2], [3]], ["0.6", "0.5", "0.5", "0.5"]))
    assert cert.worst_subset == (1, 2)


@given(lam=st.fractions(Fraction(1, 100), Fraction(99, 100)), d=st.integers(1, 3))
def test_homogeneous_hull_matches_scalar_test(lam, d):
    model = IfsModel(standard_simplex(d), lam)
    assert hull_condition(model).satisfied == homogeneous_hull_test(lam, d) == (lam >= Fraction(d, d + 1))


@pytest.mark.parametrize("d,step", [(1, Fraction(1, 100)), (2, Fraction(1, 50)), (3, Fraction(1, 20))])
def test_no_holes_when_condition_holds(d, step):
    for lam in (Fraction(d, d + 1), Fraction(d, d + 1) + Fraction(1, 50)):
        assert find_hole_witnesses(lam, d, step) == []


def test_hole_witnesses_match_brute_force():
    lam, step = Fraction(1, 2), Fraction(1, 20)
    expected = []
    for m in simplex_grid(2, 20):
        x = tuple(mi * step for mi in m)
        if sum(x) > lam and all(xi < 1 - lam for xi in x):
            expected.append(x)
    assert sorted(find_hole_witnesses(lam, 2, step)) == sorted(expected)
    assert expected


# ---------------------------------------------------- parameter regions

def test_p_k_near_one():
    model = IfsModel([[0], [1], [2]], Fraction(1) - Fraction(1, 10 ** 9))
    assert p_k_membership(model, 3)


def test_p_k_boundary_exact():
    # lambda = 2^(-1/2) is irrational; bracket it by rationals
    below = IfsModel([[0], [1]], "0.7071")
    above = IfsModel([[0], [1]], "0.70711")
    assert not p_k_membership(below, 1)
    assert p_k_membership(above, 1)


def test_p_k_far_below():
    assert not p_k_membership(IfsModel([[0], [1]], "0.5"), 2)


@pytest.mark.parametrize("n,k,d,expected", [(1, 1, 1, 2 ** -0.5), (1, 2, 1, 0.5 ** (1 / 8))])
def test_m_k_lower_bound(n, k, d, expected):
    assert m_k_lower_bound(n, k, d) == pytest.approx(expected, rel=1e-15)


def test_m_k_increases_to_one():
    values = [m_k_lower_bound(1, k, 2) for k in range(1, 8)]
    assert all(a < b < 1 for a, b in zip(values, values[1:]))


# ---------------------------------------------------------- fixed points

def test_cycle_single_map():
    model = IfsModel([[0, 0], [1, 0], [0, 1]], "0.4")
    assert np.allclose(cycle_fixed_point(model, [2]), [0, 1])


def test_cycle_binary_example():
    assert cycle_fixed_point(UNIT, [1, 0], exact=True)[0] == Fraction(2, 3)
    assert cycle_fixed_point(UNIT, [1, 0])[0] == pytest.approx(2 / 3)


@pytest.mark.parametrize("lam", ["0.3", "0.75", "0.95"])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_cycle_points_of_blocks_scale(lam, k):
    model = IfsModel([[0], [1]], lam)
    blocks = champernowne_blocks(1, k)
    w0 = cycle_fixed_point(model, blocks[0], exact=True)[0]
    w1 = cycle_fixed_point(model, blocks[1], exact=True)[0]
    assert w0 == model.lam ** k * w1
    assert w0 < w1


def test_affine_independence():
    ok, det = affine_independence([[0, 0], [1, 0], [0, 1]])
    assert ok and det == pytest.approx(1.0)
    ok, det = affine_independence([[0, 0], [1, 1], [2, 2]])
    assert not ok and det == pytest.approx(0.0)
    with pytest.raises(PreconditionError):
        affine_independence([[0, 0], [1, 0]])


@pytest.mark.parametrize("lam", ["0.1", "0.5", "0.9", "0.999"])
@pytest.mark.parametrize("k", [1, 2, 4])
def test_block_nondegeneracy_on_line(lam, k):
    model = IfsModel([[-1], [0.3], [2]], lam)
    ok, det = w_block_nondegeneracy(model, k)
    assert ok and det > 0


def test_block_nondegeneracy_triangle():
    ok, det = w_block_nondegeneracy(IfsModel([[0, 0], [1, 0], [0, 1]], "0.95"), 1)
    assert ok and abs(det) > 1e-9


def test_block_nondegeneracy_needs_enough_maps():
    model = IfsModel([[0, 0], [1, 0], [0, 1]], "0.9")
    # n = d = 2 is enough; fewer blocks than d+1 cannot arise because F spans R^d
    assert w_block_nondegeneracy(model, 2)[0]


# ------------------------------------------------------------ membership

SQUARE = [[0, 0], [1, 0], [0, 1], [1, 1]]


@pytest.mark.parametrize("F,x,expected", [
    ([[0, 0], [1, 0], [0, 1]], [1 / 3, 1 / 3], Membership.INTERIOR),
    ([[0, 0], [1, 0], [0, 1]], [1, 0], Membership.BOUNDARY),
    ([[0, 0], [1, 0], [0, 1]], [0.7, 0.7], Membership.EXTERIOR),
    (SQUARE, [0.5, 0.5], Membership.INTERIOR),
    (SQUARE, [1, 1], Membership.BOUNDARY),
    (SQUARE, [0.5, 1.0], Membership.BOUNDARY),
    (SQUARE, [1.2, 0.5], Membership.EXTERIOR),
])
def test_hull_membership(F, x, expected):
    assert hull_membership(F, x) is expected


def test_hull_membership_exact_simplex():
    F = [[0, 0], [1, 0], [0, 1]]
    x = [Fraction(1, 2), Fraction(1, 2)]
    assert hull_membership(F, x) is Membership.BOUNDARY


def test_extremal_points_drop_interior_and_edge_points():
    F = SQUARE + [[0.5, 0.5], [0.5, 0]]
    assert extremal_points(F) == [0, 1, 2, 3]


def test_halfspaces_describe_square():
    a, b = hull_halfspaces(SQUARE)
    assert len(a) == 4
    assert np.all(a @ np.array([0.5, 0.5]) < b)
    assert np.any(a @ np.array([1.5, 0.5]) > b)

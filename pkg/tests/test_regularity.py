import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linprog

from cubeflip.complex import Triangulation, corner_cut_triangulations, make_corner_cut
from cubeflip.enumeration import flip_graph_triangulations
from cubeflip.flips import apply_flip, flippable_moves
from cubeflip.kernel import CUBE3, CUBE4, bits
from cubeflip.lp import Unbounded, check_optimality, maximize
from cubeflip.regularity import affine_interpolation, is_regular, corner_cut_heights, verify_certificate
from cubeflip.symmetry import apply, cube_group

F = CUBE4.face

# -- exact simplex -------------------------------------------------------------


@given(
    st.integers(1, 4).flatmap(
        lambda n: st.tuples(
            st.lists(st.lists(st.integers(-4, 6), min_size=n, max_size=n), min_size=1, max_size=5),
            st.lists(st.integers(-3, 5), min_size=n, max_size=n),
        )
    ),
    st.data(),
)
def test_simplex_matches_floating_point_solver(Ac, data):
    A, c = Ac
    b = data.draw(st.lists(st.integers(0, 8), min_size=len(A), max_size=len(A)))
    ref = linprog([-v for v in c], A_ub=A, b_ub=b, bounds=[(0, None)] * len(c), method="highs")
    if ref.status == 3:
        with pytest.raises(Unbounded):
            maximize(A, b, c)
        return
    res = maximize(A, b, c)
    assert check_optimality(A, b, c, res)
    assert float(res.value) == pytest.approx(-ref.fun, abs=1e-7)


def test_simplex_rejects_infeasible_origin():
    with pytest.raises(ValueError):
        maximize([[1]], [-1], [1])


# -- certificates ----------------------------------------------------------------


def test_corner_cut_heights_certify_every_corner_cut():
    for T in corner_cut_triangulations():
        w = corner_cut_heights(T)
        assert verify_certificate(T, w)


def test_corner_cut_height_values():
    T = make_corner_cut("E", "ap")
    w = corner_cut_heights(T)
    assert w["a"] == w["p"] == 0
    assert all(w[x] == 1 for x in "dfgjkm")
    assert all(w[x] == 2 for x in "bcehilno")


@pytest.mark.parametrize("cell,vector", [
    ("adfgp", (Fraction(1, 2), Fraction(1, 2), Fraction(1, 2), Fraction(-3, 2))),
    ("abdfj", (2, -1, -1, -1)),
])
def test_linear_maps_of_the_two_cell_types(cell, vector):
    T = make_corner_cut("E", "ap")
    w = corner_cut_heights(T)
    heights = [w[lab] for lab in CUBE4.labels]
    mask = F(cell)
    for i in bits(mask):
        assert sum(a * b for a, b in zip(CUBE4.coords[i], vector)) == heights[i]
    for q, val in affine_interpolation(CUBE4, mask, heights).items():
        assert val == sum(a * b for a, b in zip(CUBE4.coords[q], vector))
        assert val < heights[q]


def test_zero_heights_fail():
    T = make_corner_cut("E", "ap")
    assert not verify_certificate(T, {lab: 0 for lab in CUBE4.labels})


def test_all_cube3_triangulations_are_regular():
    trias = flip_graph_triangulations(CUBE3)
    assert len(trias) == 74
    for T in trias:
        w = is_regular(T)
        assert w is not None and verify_certificate(T, w)


def _float_local_folding_slack(T):
    """Independent route: strict local convexity across interior facets
    (equivalent to regularity when every point is a vertex), solved in
    floating point."""
    cfg = T.cfg
    n = len(cfg)
    pts = np.array([[float(v) for v in p] for p in cfg.coords])
    rows = []
    facets = {}
    for c in T.cells:
        for v in bits(c):
            facets.setdefault(c & ~(1 << v), []).append((c, v))
    for f, pair in facets.items():
        if len(pair) != 2:
            continue
        (c1, v1), (_, v2) = pair
        idx = bits(c1)
        M = np.hstack([pts[idx], np.ones((len(idx), 1))])
        target = np.append(pts[v2], 1.0)
        lam = np.linalg.solve(M.T, target)  # v2 as affine combination of c1's vertices
        row = np.zeros(n + 1)
        for k, i in enumerate(idx):
            row[i] += lam[k]
        row[v2] -= 1.0
        row[-1] = 1.0  # interp + s <= w(v2)
        rows.append(row)
    A = np.array(rows)
    res = linprog(np.append(np.zeros(n), -1.0), A_ub=A, b_ub=np.zeros(len(rows)),
                  bounds=[(None, None)] * n + [(None, 1.0)], method="highs")
    return -res.fun


def test_non_regular_triangulation_found_by_walk_scan(corner_cuts):
    rng = random.Random(0)
    T = corner_cuts[0]
    found = None
    for _ in range(60):
        for _ in range(20):
            T = apply_flip(T, rng.choice(flippable_moves(T)))
        if is_regular(T) is None:
            found = T
            break
    assert found is not None
    assert _float_local_folding_slack(found) < 1e-9
    # isometry invariance of the decision
    for g in random.Random(1).sample(cube_group(), 3):
        assert is_regular(apply(g, found)) is None


def test_regular_walk_triangulations_agree_with_float_route(walk_corpus):
    for T in walk_corpus[:6]:
        w = is_regular(T)
        slack = _float_local_folding_slack(T)
        if w is None:
            assert slack < 1e-9
        else:
            assert verify_certificate(T, w)
            assert slack > 1e-9


def test_regularity_is_isometry_invariant(walk_corpus):
    G = cube_group()
    rng = random.Random(5)
    for T in walk_corpus[:4]:
        base = is_regular(T) is not None
        g = rng.choice(G)
        assert (is_regular(apply(g, T)) is not None) == base


def test_witness_shapes():
    T = make_corner_cut("O", "el")
    w = is_regular(T)
    assert set(w) == set(CUBE4.labels)
    assert verify_certificate(T, [w[x] for x in CUBE4.labels])
    assert Triangulation(CUBE4, T.cells) == T

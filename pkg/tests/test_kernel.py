import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cubeflip.kernel import (
    CUBE3,
    CUBE4,
    Circuit,
    Config,
    NotACircuit,
    UnknownLabel,
    WrongCardinality,
    affine_rank,
    bits,
    circuits_through,
    determinant,
    enumerate_circuits,
    nullspace,
    radon_partition,
    rank,
    signed_volume,
)


def leibniz(m):
    n = len(m)
    total = Fraction(0)
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        prod = Fraction(1)
        for i in range(n):
            prod *= m[i][perm[i]]
        total += -prod if inv % 2 else prod
    return total


fractions = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(fractions, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_determinant_matches_permutation_expansion(m):
    assert determinant(m) == leibniz(m)


@given(st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=1, max_size=6))
def test_rank_matches_numpy(rows):
    assert rank(rows) == np.linalg.matrix_rank(np.array(rows, dtype=float))


@given(st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=2, max_size=6))
def test_nullspace_vectors_are_in_the_kernel(cols):
    for vec in nullspace(cols):
        for row in range(3):
            assert sum(vec[k] * cols[k][row] for k in range(len(cols))) == 0


def test_affine_rank_examples():
    assert affine_rank(CUBE4.face("abcei"), CUBE4) == 5
    assert affine_rank(CUBE4.face("admp"), CUBE4) == 3
    assert affine_rank(0, CUBE4) == 0
    with pytest.raises(UnknownLabel):
        CUBE4.face("az")


def test_signed_volume_examples():
    assert abs(signed_volume(CUBE4.face("abcei"), CUBE4)) == Fraction(1, 24)
    assert abs(signed_volume(CUBE4.face("apdfg"), CUBE4)) == Fraction(1, 12)
    with pytest.raises(WrongCardinality):
        signed_volume(CUBE4.face("admp"), CUBE4)


@given(st.permutations(list("apdfg")), st.integers(0, 3))
def test_signed_volume_alternates(order, i):
    swapped = list(order)
    swapped[i], swapped[i + 1] = swapped[i + 1], swapped[i]
    assert signed_volume(swapped, CUBE4) == -signed_volume(order, CUBE4)


def test_radon_examples():
    z = radon_partition(CUBE4.face("bcfg"), CUBE4)
    assert {z.neg, z.pos} == {CUBE4.face("bg"), CUBE4.face("cf")}
    z = radon_partition(CUBE4.face("abef"), CUBE4)
    assert {z.neg, z.pos} == {CUBE4.face("af"), CUBE4.face("be")}
    with pytest.raises(NotACircuit):
        radon_partition(CUBE4.face("abc"), CUBE4)
    with pytest.raises(NotACircuit):
        radon_partition(CUBE4.face("abcd" + "e"), CUBE4)  # contains the circuit abcd


def test_cube_has_admp_circuit():
    by = CUBE4.circuits_by_support
    z = by[CUBE4.face("admp")]
    assert {z.neg, z.pos} == {CUBE4.face("ap"), CUBE4.face("dm")}


def test_simplex_has_no_circuits():
    cfg = Config.from_points("wxyz", [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])
    assert enumerate_circuits(cfg) == []


def test_circuits_through_orientation():
    za = circuits_through(CUBE4, "a")
    bit = 1 << CUBE4.label_index("a")
    assert all(z.neg & bit for z in za)
    supports = {z.support: z for z in za}
    assert supports[CUBE4.face("abef")].neg == CUBE4.face("af")
    assert CUBE4.face("bcfg") not in supports
    assert len(za) == sum(1 for z in CUBE4.circuits if z.support & bit)


def _float_circuits(cfg):
    """Independent route: numpy ranks and SVD kernel signs."""
    hom = np.array([[1.0] + [float(v) for v in p] for p in cfg.coords])
    d = cfg.affine_dim
    out = {}
    for k in range(2, d + 3):
        for idx in itertools.combinations(range(len(cfg)), k):
            m = hom[list(idx)].T
            if np.linalg.matrix_rank(m) != k - 1:
                continue
            if any(np.linalg.matrix_rank(np.delete(m, j, axis=1)) != k - 1 for j in range(k)):
                continue
            vec = np.linalg.svd(m)[2][-1]
            neg = sum(1 << i for i, v in zip(idx, vec) if v < 0)
            pos = sum(1 << i for i, v in zip(idx, vec) if v > 0)
            out[sum(1 << i for i in idx)] = frozenset((neg, pos))
    return out


@pytest.mark.parametrize("cfg", [CUBE3, CUBE4], ids=["cube3", "cube4"])
def test_circuits_match_float_oracle(cfg):
    oracle = _float_circuits(cfg)
    mine = {z.support: frozenset((z.neg, z.pos)) for z in cfg.circuits}
    assert mine == oracle


@given(st.sets(st.integers(0, 15), min_size=2, max_size=6))
def test_float_fast_path_agrees_with_exact_kernel(idx):
    from cubeflip.kernel import _float_kernel_circuit, _kernel_circuit

    idx = sorted(idx)
    H = np.array([[float(v) for v in h] for h in CUBE4.homogeneous])
    fast = _float_kernel_circuit(idx, CUBE4, H)
    if fast is not False:
        assert fast == _kernel_circuit(idx, CUBE4)


def test_circuit_counts():
    # counts fixed by the float oracle above
    assert len(CUBE3.circuits) == 20
    assert len(CUBE4.circuits) == 1348
    assert len(circuits_through(CUBE4, "a")) == 483


def test_circuit_invariants_cube4():
    for z in CUBE4.circuits:
        assert z.neg and z.pos and z.neg & z.pos == 0 and z.neg | z.pos == z.support
        k = len(bits(z.support))
        assert affine_rank(z.support, CUBE4) == k - 1
        for i in bits(z.support):
            assert affine_rank(z.support & ~(1 << i), CUBE4) == k - 1


@given(st.permutations(range(16)))
def test_radon_independent_of_point_order(perm):
    labels = [CUBE4.labels[i] for i in perm]
    coords = [CUBE4.coords[i] for i in perm]
    shuffled = Config(tuple(labels), tuple(coords))
    for sup in ("admp", "bcfg", "abef", "abcdefgh"[:4]):
        mask = shuffled.face(sup)
        z = radon_partition(mask, shuffled)
        ref = radon_partition(CUBE4.face(sup), CUBE4)
        assert {frozenset(shuffled.names(z.neg)), frozenset(shuffled.names(z.pos))} == {
            frozenset(CUBE4.names(ref.neg)),
            frozenset(CUBE4.names(ref.pos)),
        }


def test_circuit_helpers():
    z = Circuit(0b111, 0b001, 0b110)
    assert z.flipped() == Circuit(0b111, 0b110, 0b001)
    assert z.other_side(0b001) == 0b110
    assert z.oriented(1).neg == 0b110
    with pytest.raises(ValueError):
        z.other_side(0b011)

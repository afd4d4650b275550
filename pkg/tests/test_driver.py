import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cubeflip.complex import (
    Triangulation,
    corner_cut_triangulations,
    corner_simplex,
    is_corner_cut,
    make_corner_cut,
    sigma_graph,
    validate,
)
from cubeflip.contraction import link_context, star_volume_D, vertex_set_V
from cubeflip.driver import (
    U1_MINUS,
    U1_PLUS,
    FlipPath,
    NotU1,
    PreconditionFailed,
    escape_U1,
    flip_to_corner_cut,
    greedy_corner_reduce,
    insert_corner,
    random_walk,
    s_embedding,
    u1_frame,
)
from cubeflip.enumeration import complete_triangulation
from cubeflip.flips import is_flippable
from cubeflip.kernel import CUBE4
from cubeflip.symmetry import apply, cube_group

F = CUBE4.face
CORNER_CUTS = sorted(corner_cut_triangulations(), key=lambda t: t.cells)


@pytest.fixture(scope="module")
def u1_minus_T():
    return complete_triangulation(CUBE4, [F("a" + t) for t in U1_MINUS])


@pytest.fixture(scope="module")
def u1_plus_T():
    return complete_triangulation(CUBE4, [F("a" + t) for t in U1_PLUS])


def test_trivial_paths():
    T = make_corner_cut("E", "ap")
    assert len(flip_to_corner_cut(T)) == 0
    assert len(insert_corner(T, "b")) == 0
    assert len(greedy_corner_reduce(T, "b")) == 0


def test_escape_in_the_canonical_frame(u1_minus_T):
    T = u1_minus_T
    validate(T)
    assert u1_frame(T, "a") == tuple(range(16))
    assert is_corner_cut(T) is None
    path = escape_U1(T, "a")
    path.replay()
    supports = [m.circuit.support for m in path.moves]
    assert supports[-2:] == [F("bcfg"), F("abef")]
    assert [m.removed for m in path.moves[-2:]] == [F("cf"), F("af")]
    # state right before the first escape flip
    before = FlipPath.from_moves(T, path.moves[:-2])
    assert sigma_graph(before.end, 4) == {F("el")}
    assert corner_simplex("d") in before.end.cells
    assert vertex_set_V(path.end, "a") == vertex_set_V(T, "a") & ~F("f")
    # the escape flips keep faces avoiding a and f
    for c in before.end.faces:
        if not c & F("af"):
            assert c in path.end.faces
    # the whole path keeps faces avoiding a, d and f
    for c in T.faces:
        if not c & F("adf"):
            assert c in path.end.faces
    rest = greedy_corner_reduce(path.end, "a")
    assert corner_simplex("a") in rest.end.cells


def test_escape_from_the_mirror_link(u1_plus_T):
    T = u1_plus_T
    g = u1_frame(T, "a")
    assert g is not None and g != tuple(range(16))
    path = insert_corner(T, "a")
    path.replay()
    assert corner_simplex("a") in path.end.cells


@given(st.integers(0, 383))
def test_escape_is_equivariant(u1_minus_T, gi):
    g = cube_group()[gi]
    T = apply(g, u1_minus_T)
    x = CUBE4.labels[g[0]]
    path = escape_U1(T, x)
    path.replay(check=False)
    greedy = greedy_corner_reduce(path.end, x)
    assert corner_simplex(x) in greedy.end.cells


def test_not_u1():
    with pytest.raises(NotU1):
        escape_U1(make_corner_cut("E", "ap"), "a")


def test_insert_corner_precondition():
    T = make_corner_cut("E", "ap")
    assert s_embedding(T, "a") is None
    with pytest.raises(PreconditionFailed):
        insert_corner(T, "a")


def test_greedy_postconditions(walk_corpus):
    for T in walk_corpus[:6]:
        for x in "adgk":
            path = greedy_corner_reduce(T, x)
            path.replay(check=False)
            end = path.end
            ctx, L = link_context(end, x)
            assert not any(is_flippable(L, zc, zc.neg) for _, zc in ctx.circuits)
            xi = CUBE4.label_index(x)
            for c in T.faces:
                if not c >> xi & 1:
                    assert c in end.faces
            assert star_volume_D(end, x) <= star_volume_D(T, x)
            if s_embedding(T, x) is not None:
                assert corner_simplex(x) in end.cells or u1_frame(end, x) is not None


@given(st.integers(0, 2**32 - 1), st.integers(5, 60))
def test_flip_to_corner_cut_from_random_walks(seed, steps):
    rng = random.Random(seed)
    start = rng.choice(CORNER_CUTS)
    T = random_walk(start, steps, rng).end
    path = flip_to_corner_cut(T)
    assert path.start == T
    assert is_corner_cut(path.end) is not None
    assert path.replay() == path.end


def test_path_concatenation_checks():
    a = make_corner_cut("E", "ap")
    b = make_corner_cut("O", "el")
    p = FlipPath(a)
    with pytest.raises(ValueError):
        p.extend(FlipPath(b))
    bogus = FlipPath(a, [], b)
    with pytest.raises(ValueError):
        bogus.replay()
    assert isinstance(Triangulation(CUBE4, a.cells), Triangulation)

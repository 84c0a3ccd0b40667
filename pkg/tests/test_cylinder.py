import random

import pytest

from suspwalls import cylinder as cyl
from suspwalls.cover import Cell, Cover, CVertex
from suspwalls.cylinder import (
    CylinderBall,
    HCell,
    KVertex,
    Square,
    VCell,
    act_hcell,
    act_square,
    act_vertex,
    fiber_words,
    orbit_map,
    square_boundary_closes,
    square_boundary_word,
    square_corners,
    square_top,
    vertical_source,
    vertical_target,
)
from suspwalls.words import (EMPTY, GroupElement, multiply, normalize,
                             reduce_word, IDENTITY)

from helpers import identity_rose


@pytest.fixture(scope="module")
def fp(fp_rep):
    return Cover(fp_rep)


@pytest.fixture(scope="module")
def fp_ball(fp):
    return CylinderBall(fp, rho_v=1, rho_h=3)


def K(w, g, base="v0"):
    return KVertex(tuple(w), CVertex(tuple(g), base))


# ---------------------------------------------------------------------------
# building


def test_zero_vertical_radius_has_no_squares(fp):
    ball = CylinderBall(fp, rho_v=0, rho_h=2)
    assert ball.fibers == [()]
    assert not ball.squares


def test_fiber_enumeration():
    assert len(fiber_words(2, 2)) == 1 + 4 + 12


def test_fp_square_tops_spell_the_image(fp, fp_ball):
    s = Square((), Cell((), "x3"), 1)
    assert [(c.edge, sg) for c, sg in square_top(fp, s)] == [("x3", 1), ("x1", 1)]
    assert s in fp_ball.squares[(), 1]


def test_square_count_matches_realized_cells(fp, fp_ball):
    expected = len(list(cyl.iter_ball_cells(fp, 3)))
    for (w, j), lst in fp_ball.squares.items():
        assert len(lst) == expected == len(fp_ball.core_cells)


def test_resource_cap(fp):
    with pytest.raises(cyl.ResourceCap):
        CylinderBall(fp, rho_v=2, rho_h=6, vertex_cap=1000)


# ---------------------------------------------------------------------------
# coordinates, the action, the orbit map


def test_vertex_element_round_trip(fp):
    u = K((1,), (3, 1))
    g = u.element(fp)
    # t1 * x3 x1 = x3 * t1
    assert g == GroupElement((3,), (1,))


def test_vertical_cells_connect_fibers(fp):
    u = K((), ())
    up = vertical_target(fp, u, 2)
    assert up == K((2,), ())
    assert vertical_source(fp, up, 2) == u


def test_vertical_source_round_trip(fp):
    rng = random.Random(3)
    for _ in range(40):
        g = reduce_word([rng.choice([1, -1, 2, -2, 3, -3]) for _ in range(4)])
        u = K((rng.choice([1, 2]),), g)
        for j in (1, 2):
            assert vertical_target(fp, vertical_source(fp, u, j), j) == u


def random_element(rng, sigma, size=3):
    from suspwalls.words import Letter
    letters = []
    for _ in range(size):
        if rng.random() < 0.5:
            letters.append(Letter(rng.randint(1, sigma.n), rng.choice((1, -1)),
                                  "horizontal"))
        else:
            letters.append(Letter(rng.randint(1, sigma.k), rng.choice((1, -1)),
                                  "vertical"))
    return normalize(letters, sigma)


def test_action_matches_group_law(fp):
    rng = random.Random(7)
    for _ in range(60):
        g = random_element(rng, fp.sigma)
        u = K(reduce_word([rng.choice([1, -1, 2, -2]) for _ in range(2)]),
              reduce_word([rng.choice([1, -1, 3, -3]) for _ in range(3)]))
        assert act_vertex(fp, g, u).element(fp) == multiply(g, u.element(fp), fp.sigma)


def test_deck_action_preserves_squares_and_orbit_map(fp, fp_ball):
    """Translates of squares are squares with translated tops, vertical
    cells keep their direction, and the orbit map is equivariant."""
    rng = random.Random(11)
    squares = list(fp_ball.all_squares())
    for _ in range(50):
        g = random_element(rng, fp.sigma, size=3)
        s = rng.choice(squares)
        gs = act_square(fp, g, s)
        want = [act_hcell(fp, g, HCell(cyl.concat(s.w, (s.j,)), c)) for c, _ in
                square_top(fp, s)]
        got = [HCell(cyl.concat(gs.w, (gs.j,)), c) for c, _ in square_top(fp, gs)]
        assert got == want
        assert orbit_map(gs) == tuple(cyl.concat(g.v, w) for w in orbit_map(s))
        u = K(s.w, s.bottom.g)
        assert orbit_map(act_vertex(fp, g, u)) == cyl.concat(g.v, orbit_map(u))
        vc = VCell(s.w, K(s.w, s.bottom.g).pos, s.j)
        gvc = cyl.act_vcell(fp, g, vc)
        assert gvc.j == vc.j


def test_orbit_map_values(fp):
    assert orbit_map(K((), ())) == ()
    assert orbit_map(K((1, 2), (3,))) == (1, 2)
    vc = VCell((1,), CVertex((), "v0"), 2)
    assert orbit_map(vc) == ((1,), (1, 2))


def test_square_corners_project_to_edge_ends(fp, fp_ball):
    for s in list(fp_ball.all_squares())[:200]:
        a, b, fa, fb = square_corners(fp, s)
        assert orbit_map(a) == orbit_map(b) == s.w
        assert orbit_map(fa) == orbit_map(fb) == cyl.concat(s.w, (s.j,))


# ---------------------------------------------------------------------------
# boundaries


def test_all_ball_squares_close(fp, fp_ball):
    for s in fp_ball.all_squares():
        assert square_boundary_closes(fp, s)


def test_boundary_words_normalize_to_identity(fp, fp_ball):
    rng = random.Random(13)
    squares = list(fp_ball.all_squares())
    for s in rng.sample(squares, 80):
        word = square_boundary_word(fp, s)
        assert normalize(word, fp.sigma) == IDENTITY


def test_top_occurrence_counts(fp, fp_ball):
    """The number of j-squares with a fixed cell in their top equals the
    number of times its label occurs in the f_j images, counted by brute
    enumeration over the realized squares."""
    counts = {}
    for s in fp_ball.all_squares():
        wj = cyl.concat(s.w, (s.j,))
        for c, _sign in square_top(fp, s):
            counts[wj, c, s.j] = counts.get((wj, c, s.j), 0) + 1
    for edge in ("x1", "x2", "x3"):
        for j in (1, 2):
            E = Cell((), edge)
            got = counts.get(((j,), E, j), 0)
            assert got == len(fp.rep.occurrences(j, edge)), (edge, j)


# ---------------------------------------------------------------------------
# distances


def test_distance_reflexive(fp_ball):
    assert fp_ball.graph_distance(K((), ()), K((), ())) == 0


def test_distance_one_vertical(fp_ball):
    assert fp_ball.graph_distance(K((), ()), K((1,), ())) == 1


def test_distance_via_square_relation(fp_ball):
    # fiber t1, position x3 x1: reachable as x3 then the vertical cell
    assert fp_ball.graph_distance(K((), ()), K((1,), (3, 1))) == 2


def test_distance_exactness_margin(fp_ball):
    assert fp_ball.distance_is_exact(0)
    assert not fp_ball.distance_is_exact(4)


def test_identity_rose_ball_runs():
    cv = Cover(identity_rose(2, 1))
    ball = CylinderBall(cv, rho_v=1, rho_h=2)
    assert ball.square_count((), 1) == len(ball.core_cells)
    for s in ball.all_squares():
        assert square_boundary_closes(cv, s)
        assert len(square_top(cv, s)) == 1

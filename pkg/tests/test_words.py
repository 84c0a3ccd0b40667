import random

import pytest
from hypothesis import given, settings, strategies as st

from suspwalls import words as W
from suspwalls.words import (
    EMPTY,
    IDENTITY,
    GroupElement,
    Letter,
    SigmaSpec,
    concat,
    inv_word,
    invert,
    multiply,
    normalize,
    reduce_word,
)


def fp_sigma():
    return SigmaSpec(n=3, k=2, images=[
        [(1,), (2,), (3, 1)],
        [(1,), (2,), (3, 2)],
    ])


def f4_sigma():
    return SigmaSpec(n=4, k=2, images=[
        [(1,), (2,), (3, 1), (4, 1)],
        [(1,), (2,), (3, 2, 1), (4, 3, 2, 1)],
    ])


# ---------------------------------------------------------------------------
# free reduction


def slow_reduce(w):
    """Independent oracle: one cancellation pass at a time, to a fixpoint."""
    w = list(w)
    changed = True
    while changed:
        changed = False
        for i in range(len(w) - 1):
            if w[i] == -w[i + 1]:
                del w[i:i + 2]
                changed = True
                break
    return tuple(w)


def test_reduce_cancellation():
    assert reduce_word((1, -1, 2)) == (2,)


def test_reduce_empty():
    assert reduce_word(()) == ()


def test_reduce_nested():
    w = (3, 1, -1, -3, 2)
    assert reduce_word(w) == slow_reduce(w) == (2,)


letters = st.integers(min_value=-3, max_value=3).filter(lambda a: a != 0)
raw_words = st.lists(letters, max_size=24).map(tuple)


@given(raw_words)
def test_reduce_matches_slow_oracle(w):
    assert reduce_word(w) == slow_reduce(w)


@given(raw_words)
def test_reduce_idempotent_and_short(w):
    r = reduce_word(w)
    assert reduce_word(r) == r
    assert len(r) <= len(w)


@settings(max_examples=1000)
@given(raw_words)
def test_reduce_word_times_inverse(w):
    assert concat(w if W.is_reduced(w) else reduce_word(w), inv_word(reduce_word(w))) == EMPTY


# ---------------------------------------------------------------------------
# the vertical action


def test_apply_sigma_fp_table():
    sig = fp_sigma()
    assert sig.apply((1,), (3,)) == (3, 1)
    assert sig.apply((2,), (3,)) == (3, 2)


def test_apply_sigma_f4_table():
    sig = f4_sigma()
    assert sig.apply((2,), (4,)) == (4, 3, 2, 1)


def test_apply_sigma_identity_word():
    sig = fp_sigma()
    assert sig.apply((), (1,)) == (1,)


def test_apply_sigma_inverse_tables():
    sig = fp_sigma()
    assert sig.apply((-1,), (3,)) == (3, -1)
    sig4 = f4_sigma()
    assert sig4.apply((-2,), (4,)) == (4, -3)
    for j in (1, 2):
        for i in (1, 2, 3, 4):
            assert sig4.apply((-j,), sig4.apply((j,), (i,))) == (i,)


def test_sigma_rejects_out_of_range():
    with pytest.raises(W.AutomorphismError):
        SigmaSpec(n=2, k=1, images=[[(1,), (2, 3)]])


def test_sigma_rejects_non_invertible():
    with pytest.raises(W.AutomorphismError):
        SigmaSpec(n=2, k=1, images=[[(1,), (1,)]], search_bound=5)


def test_sigma_explicit_inverse_escape_hatch():
    sig = SigmaSpec(n=2, k=1, images=[[(1,), (2, 1)]],
                    inverse_images=[[(1,), (2, -1)]])
    assert sig.apply((-1,), (2,)) == (2, -1)


vertical_words = st.lists(
    st.integers(min_value=-2, max_value=2).filter(lambda a: a != 0),
    max_size=5).map(reduce_word)
horizontal_words = st.lists(letters, max_size=8).map(reduce_word)


@given(vertical_words, vertical_words, horizontal_words)
def test_apply_sigma_composition(t, u, w):
    sig = fp_sigma()
    assert sig.apply(concat(t, u), w) == sig.apply(t, sig.apply(u, w))


# ---------------------------------------------------------------------------
# normal forms: rewriting oracle


def oracle_normal_forms(sig, mixed, cap=4000):
    """All terminal forms reachable by relator rewriting, explored in
    every order.  Moves: free cancellation, and pushing a vertical
    letter right across a horizontal one via t^e x = sigma(t)^-e(x) t^e.
    """
    def moves(word):
        for i in range(len(word) - 1):
            (k1, a), (k2, b) = word[i], word[i + 1]
            if k1 == k2 and a == -b:
                yield word[:i] + word[i + 2:]
            if k1 == "v" and k2 == "h":
                img = sig.apply_letter(-a, (b,))
                mid = tuple(("h", c) for c in img) + (("v", a),)
                yield word[:i] + mid + word[i + 2:]

    start = tuple(("h", l.value) if l.kind == "horizontal" else ("v", l.value)
                  for l in mixed)
    seen = {start}
    stack = [start]
    terminals = set()
    while stack:
        cur = stack.pop()
        nxt = [m for m in moves(cur)]
        if not nxt:
            terminals.add(cur)
            continue
        for m in nxt:
            if m not in seen:
                seen.add(m)
                if len(seen) > cap:
                    raise RuntimeError("oracle exploded")
                stack.append(m)
    return terminals


def as_element(terminal):
    h = tuple(a for k, a in terminal if k == "h")
    v = tuple(a for k, a in terminal if k == "v")
    return GroupElement(h, v)


def check_against_oracle(sig, mixed):
    terminals = oracle_normal_forms(sig, mixed)
    assert len(terminals) == 1, f"rewriting not confluent: {terminals}"
    assert normalize(mixed, sig) == as_element(next(iter(terminals)))


def test_normalize_t1_x3_fp():
    sig = fp_sigma()
    got = normalize(W.mixed_letters(sig, "t1", "x3"), sig)
    # t x = sigma(t)^-1(x) t
    assert got == GroupElement((3, -1), (1,))
    check_against_oracle(sig, W.mixed_letters(sig, "t1", "x3"))


def test_normalize_already_in_hv_form():
    sig = fp_sigma()
    assert normalize(W.mixed_letters(sig, "x2", "t1"), sig) == GroupElement((2,), (1,))


def test_normalize_two_spellings_of_relator_agree():
    sig = fp_sigma()
    a = normalize(W.mixed_letters(sig, "x3", "t1"), sig)
    b = normalize(W.mixed_letters(sig, "t1", "x3", "x1"), sig)
    assert a == b == GroupElement((3,), (1,))
    check_against_oracle(sig, W.mixed_letters(sig, "t1", "x3", "x1"))


def test_all_relators_normalize_to_identity():
    for sig in (fp_sigma(), f4_sigma()):
        for i in range(1, sig.n + 1):
            for j in range(1, sig.k + 1):
                assert normalize(W.relator(sig, i, j), sig) == IDENTITY


def random_mixed(rng, sig, size):
    out = []
    for _ in range(size):
        if rng.random() < 0.5:
            out.append(Letter(rng.randint(1, sig.n), rng.choice((1, -1)), "horizontal"))
        else:
            out.append(Letter(rng.randint(1, sig.k), rng.choice((1, -1)), "vertical"))
    return out


def test_normalize_matches_oracle_on_short_words():
    rng = random.Random(7)
    sig = fp_sigma()
    for _ in range(60):
        check_against_oracle(sig, random_mixed(rng, sig, rng.randint(0, 6)))


def test_normalize_is_multiplicative():
    rng = random.Random(11)
    sig = f4_sigma()
    for _ in range(100):
        a = random_mixed(rng, sig, rng.randint(0, 5))
        b = random_mixed(rng, sig, rng.randint(0, 5))
        ga, gb = normalize(a, sig), normalize(b, sig)
        assert multiply(ga, gb, sig) == normalize(a + b, sig)


# ---------------------------------------------------------------------------
# the group law


def test_identity_multiplication():
    sig = fp_sigma()
    g = GroupElement((1, 2), (1,))
    assert multiply(IDENTITY, g, sig) == g
    assert multiply(g, IDENTITY, sig) == g


def test_inverse_cancels():
    sig = fp_sigma()
    g = GroupElement((1,), EMPTY)
    assert multiply(g, invert(g, sig), sig) == IDENTITY


def test_relator_as_element_equality():
    sig = fp_sigma()
    left = multiply(GroupElement(EMPTY, (1,)), GroupElement((3,), EMPTY), sig)
    right = GroupElement((3, 1), (1,))
    assert left != right  # t1 x3 = (x3 x1^-1) t1, not (x3 x1) t1
    other = multiply(GroupElement((3,), EMPTY), GroupElement(EMPTY, (1,)), sig)
    assert other == GroupElement((3,), (1,))
    # and x3 t1 = t1 sigma(t1)(x3):
    assert multiply(GroupElement(EMPTY, (1,)),
                    GroupElement(sig.apply((1,), (3,)), EMPTY), sig) == other


def random_element(rng, sig, size=4):
    return normalize(random_mixed(rng, sig, size), sig)


def test_multiply_associative_500_triples():
    rng = random.Random(23)
    sig = fp_sigma()
    for _ in range(500):
        a, b, c = (random_element(rng, sig) for _ in range(3))
        assert multiply(multiply(a, b, sig), c, sig) == multiply(a, multiply(b, c, sig), sig)


def test_invert_involution_and_inverse_law():
    rng = random.Random(29)
    sig = f4_sigma()
    for _ in range(200):
        g = random_element(rng, sig)
        assert invert(invert(g, sig), sig) == g
        assert multiply(g, invert(g, sig), sig) == IDENTITY
        assert multiply(invert(g, sig), g, sig) == IDENTITY


def test_vh_form_round_trip():
    rng = random.Random(31)
    sig = fp_sigma()
    for _ in range(100):
        g = random_element(rng, sig)
        v, h = g.vh(sig)
        assert W.from_vh(sig, v, h) == g


# ---------------------------------------------------------------------------
# serialization


def test_letter_round_trip():
    assert W.parse_word(["x1", "X1", "x2"], "horizontal") == (2,)
    assert W.format_word((3, -1), "horizontal") == ["x3", "X1"]
    assert W.format_word((2, -2), "vertical") == ["t2", "T2"]
    with pytest.raises(ValueError):
        W.parse_letter("y1", "horizontal")

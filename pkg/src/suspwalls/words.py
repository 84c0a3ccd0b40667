"""Words in free groups and normal forms in F_n |x F_k.

Letters are nonzero integers: ``+i`` is the i-th generator, ``-i`` its
inverse.  Horizontal words live in F_n = <x_1..x_n>, vertical words in
F_k = <t_1..t_k>, and a word is always a tuple of letters.  A group
element is kept in the normal form ``h * v`` with ``h`` horizontal and
``v`` vertical.

The defining relations of the suspension are read off the square
boundaries ``x_i t_j sigma(t_j)(x_i)^-1 t_j^-1``, which force

    t_j^-1 x t_j = sigma(t_j)(x).

Vertical letters are pushed to the right with that rule.  For vertical
*words* we fix the composition order

    apply_sigma(t + u, w) == apply_sigma(t, apply_sigma(u, w))

so that all declared relators normalize to the identity (the single
place where the convention is pinned down; everything else derives from
it).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

Word = tuple  # tuple of nonzero ints

EMPTY: Word = ()


class AutomorphismError(ValueError):
    """A generator-image table does not define an automorphism."""


def reduce_word(letters: Iterable[int]) -> Word:
    """Freely reduce a letter sequence (stack cancellation)."""
    out: list[int] = []
    for a in letters:
        if a == 0:
            raise ValueError("0 is not a letter")
        if out and out[-1] == -a:
            out.pop()
        else:
            out.append(a)
    return tuple(out)


def concat(*words: Sequence[int]) -> Word:
    out: list[int] = []
    for w in words:
        for a in w:
            if out and out[-1] == -a:
                out.pop()
            else:
                out.append(a)
    return tuple(out)


def inv_word(w: Sequence[int]) -> Word:
    return tuple(-a for a in reversed(w))


def is_reduced(w: Sequence[int]) -> bool:
    return all(w[i] != -w[i + 1] for i in range(len(w) - 1))


def common_prefix_len(a: Sequence[int], b: Sequence[int]) -> int:
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return n


# ---------------------------------------------------------------------------
# serialization: "x1", "X1" (inverse), "t2", "T2"

def parse_letter(tok: str, kind: str) -> int:
    prefix = "x" if kind == "horizontal" else "t"
    if not tok or tok[0].lower() != prefix or not tok[1:].isdigit():
        raise ValueError(f"bad {kind} letter {tok!r}")
    base = int(tok[1:])
    if base < 1:
        raise ValueError(f"bad {kind} letter {tok!r}")
    return base if tok[0].islower() else -base


def parse_word(tokens: Iterable[str], kind: str) -> Word:
    return reduce_word(parse_letter(t, kind) for t in tokens)


def format_letter(a: int, kind: str) -> str:
    prefix = "x" if kind == "horizontal" else "t"
    s = f"{prefix}{abs(a)}"
    return s if a > 0 else s[0].upper() + s[1:]


def format_word(w: Sequence[int], kind: str) -> list[str]:
    return [format_letter(a, kind) for a in w]


@dataclass(frozen=True)
class Letter:
    """A single signed generator, tagged horizontal or vertical.

    Only used at the serialization boundary; the engine works on bare
    int tuples.
    """

    base: int
    sign: int
    kind: str  # "horizontal" | "vertical"

    def __post_init__(self):
        if self.base < 1 or self.sign not in (1, -1):
            raise ValueError(f"bad letter {self}")
        if self.kind not in ("horizontal", "vertical"):
            raise ValueError(f"bad letter kind {self.kind!r}")

    @property
    def value(self) -> int:
        return self.sign * self.base

    def check_rank(self, n: int, k: int) -> None:
        rank = n if self.kind == "horizontal" else k
        if self.base > rank:
            raise ValueError(f"letter {self} out of rank {rank}")


def _abelianized_det(table: list, n: int) -> int:
    """Exact determinant of the exponent-sum matrix (n is tiny, so
    cofactor expansion is fine)."""
    if n == 0:
        return 1
    m = [[0] * n for _ in range(n)]
    for i, w in enumerate(table):
        for a in w:
            m[i][abs(a) - 1] += 1 if a > 0 else -1

    def det(rows, cols):
        if len(cols) == 1:
            return m[rows[0]][cols[0]]
        total = 0
        for p, c in enumerate(cols):
            v = m[rows[0]][c]
            if v:
                total += (-1) ** p * v * det(rows[1:], cols[:p] + cols[p + 1:])
        return total

    return det(tuple(range(n)), tuple(range(n)))


# ---------------------------------------------------------------------------
# the vertical action on horizontal words


@dataclass
class SigmaSpec:
    """Images of the horizontal generators under each vertical generator.

    ``images[j-1][i-1]`` is the reduced horizontal word sigma(t_j)(x_i).
    Inverse images are found by peeling the triangular shape of
    unipotent image tables; a bounded breadth-first search over short
    words is the fallback, and explicitly supplied inverses bypass both.
    """

    n: int
    k: int
    images: list  # list of k lists of n Words
    inverse_images: Optional[list] = None
    search_bound: int = 32

    def __post_init__(self):
        if len(self.images) != self.k:
            raise AutomorphismError(f"expected {self.k} image tables")
        for tab in self.images:
            if len(tab) != self.n:
                raise AutomorphismError(f"expected {self.n} images per table")
            for w in tab:
                for a in w:
                    if not 1 <= abs(a) <= self.n:
                        raise AutomorphismError(f"generator index {a} out of range")
                if not is_reduced(w):
                    raise AutomorphismError(f"image {w} is not reduced")
        if self.inverse_images is None:
            self.inverse_images = [self._invert_table(j) for j in range(1, self.k + 1)]
        self._check_inverses()

    # -- single-letter action

    def letter_image(self, j: int, a: int) -> Word:
        """sigma(t_j)^sign(j) applied to the single horizontal letter a."""
        tab = self.images[abs(j) - 1] if j > 0 else self.inverse_images[abs(j) - 1]
        w = tab[abs(a) - 1]
        return w if a > 0 else inv_word(w)

    def apply_letter(self, j: int, w: Sequence[int]) -> Word:
        out: list[int] = []
        for a in w:
            for b in self.letter_image(j, a):
                if out and out[-1] == -b:
                    out.pop()
                else:
                    out.append(b)
        return tuple(out)

    def apply(self, t: Sequence[int], w: Sequence[int]) -> Word:
        """sigma(t)(w) with apply(t+u, w) == apply(t, apply(u, w))."""
        w = tuple(w)
        for a in reversed(t):
            w = self.apply_letter(a, w)
        return w

    def conj(self, v: Sequence[int], w: Sequence[int]) -> Word:
        """v w v^-1 as a horizontal word, for vertical v."""
        w = tuple(w)
        for a in reversed(v):
            w = self.apply_letter(-a, w)
        return w

    # -- inverses

    def _invert_table(self, j: int) -> list:
        table = self.images[j - 1]
        inv: dict[int, Word] = {}

        def translate(word: Sequence[int]) -> Optional[Word]:
            out: list[int] = []
            for a in word:
                if abs(a) not in inv:
                    return None
                piece = inv[abs(a)] if a > 0 else inv_word(inv[abs(a)])
                out.extend(piece)
            return reduce_word(out)

        if abs(_abelianized_det(table, self.n)) != 1:
            raise AutomorphismError(
                f"sigma(t_{j}) is not an automorphism (abelianized determinant != +-1)")

        progress = True
        while progress and len(inv) < self.n:
            progress = False
            for i in range(1, self.n + 1):
                if i in inv:
                    continue
                img = table[i - 1]
                spots = [p for p, a in enumerate(img) if a == i]
                if len(spots) != 1 or any(abs(a) == i for a in img if a != i):
                    continue
                p = spots[0]
                pre = translate(inv_word(img[:p]))
                suf = translate(inv_word(img[p + 1:]))
                if pre is None or suf is None:
                    continue
                inv[i] = concat(pre, (i,), suf)
                progress = True
        if len(inv) < self.n:
            self._bfs_invert(j, table, inv)
        out = [inv[i] for i in range(1, self.n + 1)]
        return out

    def _bfs_invert(self, j: int, table: list, inv: dict) -> None:
        missing = [i for i in range(1, self.n + 1) if i not in inv]
        targets = {(i,): i for i in missing}
        seen = {EMPTY}
        frontier: list[Word] = [EMPTY]
        length = 0
        node_cap = 200_000
        while targets and length < self.search_bound and len(seen) < node_cap:
            length += 1
            nxt = []
            for w in frontier:
                for a in range(-self.n, self.n + 1):
                    if a == 0 or (w and w[-1] == -a):
                        continue
                    cand = w + (a,)
                    if cand in seen:
                        continue
                    seen.add(cand)
                    nxt.append(cand)
                    img = self.apply_letter(j, cand)
                    if img in targets:
                        inv[targets.pop(img)] = cand
                        if not targets:
                            return
            frontier = nxt
        if targets:
            raise AutomorphismError(
                f"no inverse image for x_{sorted(targets.values())} under "
                f"sigma(t_{j}) within {self.search_bound} letters"
            )

    def _check_inverses(self) -> None:
        for j in range(1, self.k + 1):
            for i in range(1, self.n + 1):
                if self.apply_letter(j, self.apply_letter(-j, (i,))) != (i,):
                    raise AutomorphismError(f"sigma(t_{j}) inverse table is wrong at x_{i}")


# ---------------------------------------------------------------------------
# group elements


class GroupElement(NamedTuple):
    """Element of F_n |x F_k in the h*v normal form (both parts reduced)."""

    h: Word
    v: Word

    def vh(self, spec: SigmaSpec) -> tuple:
        """The same element as v * h', with h' = v^-1 h v."""
        return self.v, spec.conj(inv_word(self.v), self.h)

    def is_identity(self) -> bool:
        return not self.h and not self.v

    def __str__(self):
        toks = format_word(self.h, "horizontal") + format_word(self.v, "vertical")
        return ".".join(toks) if toks else "1"


IDENTITY = GroupElement(EMPTY, EMPTY)


def from_vh(spec: SigmaSpec, v: Sequence[int], h: Sequence[int]) -> GroupElement:
    return GroupElement(spec.conj(v, h), reduce_word(v))


def normalize(mixed: Iterable[Letter], spec: SigmaSpec) -> GroupElement:
    """Push vertical letters right across horizontal ones.

    ``(h, v) . x = (h * (v x v^-1), v)`` and ``(h, v) . t = (h, v t)``.
    """
    h: Word = EMPTY
    v: Word = EMPTY
    for letter in mixed:
        letter.check_rank(spec.n, spec.k)
        if letter.kind == "horizontal":
            h = concat(h, spec.conj(v, (letter.value,)))
        else:
            v = concat(v, (letter.value,))
    return GroupElement(h, v)


def multiply(a: GroupElement, b: GroupElement, spec: SigmaSpec) -> GroupElement:
    return GroupElement(concat(a.h, spec.conj(a.v, b.h)), concat(a.v, b.v))


def invert(a: GroupElement, spec: SigmaSpec) -> GroupElement:
    vi = inv_word(a.v)
    return GroupElement(spec.conj(vi, inv_word(a.h)), vi)


def horizontal(w: Sequence[int]) -> GroupElement:
    return GroupElement(reduce_word(w), EMPTY)


def vertical(w: Sequence[int]) -> GroupElement:
    return GroupElement(EMPTY, reduce_word(w))


def mixed_letters(spec: SigmaSpec, *tokens: str) -> list[Letter]:
    """Parse tokens like "x1", "T2" into Letters (convenience for tests)."""
    out = []
    for tok in tokens:
        kind = "horizontal" if tok[0].lower() == "x" else "vertical"
        a = parse_letter(tok, kind)
        out.append(Letter(abs(a), 1 if a > 0 else -1, kind))
    return out


def relator(spec: SigmaSpec, i: int, j: int) -> list[Letter]:
    """The square boundary word x_i t_j sigma(t_j)(x_i)^-1 t_j^-1."""
    out = [Letter(i, 1, "horizontal"), Letter(j, 1, "vertical")]
    for a in inv_word(spec.images[j - 1][i - 1]):
        out.append(Letter(abs(a), 1 if a > 0 else -1, "horizontal"))
    out.append(Letter(j, -1, "vertical"))
    return out

"""Finite balls of the mapping cylinder.

The cylinder fibers over the Cayley tree of the vertical free group: the
preimage of a vertical word ``w`` is a copy of the horizontal universal
cover.  We store every fiber in its own tree coordinates, in which a
point of fiber ``w`` at tree position ``(h, v)`` is the group element
``w * h`` (vertical part first).  In these coordinates the horizontal
cells of every fiber look identical, and the vertical cell at a vertex
leads to the image of that vertex under the lifted map of its direction:

    (w, u)  --t_j-->  (w t_j, F_j(u)).

A square is determined by its bottom cell and direction; its top is the
lifted image path of the bottom, one fiber up.
"""

from __future__ import annotations

from collections import defaultdict, deque
from typing import Iterable, NamedTuple, Optional, Sequence

from .cover import Cell, Cover, CVertex
from .rep import BfhRep
from .words import (EMPTY, GroupElement, Word, concat, from_vh, inv_word,
                    reduce_word)


class KVertex(NamedTuple):
    w: Word       # vertical word (fiber index)
    pos: CVertex  # fiber coordinates

    def element(self, cover: Cover) -> GroupElement:
        return from_vh(cover.sigma, self.w, self.pos.g)


class HCell(NamedTuple):
    w: Word
    cell: Cell


class VCell(NamedTuple):
    w: Word
    pos: CVertex
    j: int


class Square(NamedTuple):
    w: Word
    bottom: Cell
    j: int


class ResourceCap(RuntimeError):
    pass


def vertical_target(cover: Cover, u: KVertex, j: int) -> KVertex:
    return KVertex(concat(u.w, (j,)), cover.map_vertex(j, u.pos))


def vertical_source(cover: Cover, u: KVertex, j: int) -> KVertex:
    """The unique vertex whose outgoing j-cell ends at u."""
    spine = cover.rep.spine[j - 1][u.pos.base]
    g = cover.sigma_word(-j, concat(u.pos.g, inv_word(spine)))
    v = KVertex(concat(u.w, (-j,)), CVertex(g, u.pos.base))
    return v


def act_vertex(cover: Cover, g: GroupElement, u: KVertex) -> KVertex:
    v0, h0 = g.vh(cover.sigma)
    carried = cover.sigma.conj(inv_word(u.w), h0)
    return KVertex(concat(v0, u.w), CVertex(concat(carried, u.pos.g), u.pos.base))


def act_hcell(cover: Cover, g: GroupElement, c: HCell) -> HCell:
    v0, h0 = g.vh(cover.sigma)
    carried = cover.sigma.conj(inv_word(c.w), h0)
    return HCell(concat(v0, c.w), Cell(concat(carried, c.cell.g), c.cell.edge))


def act_vcell(cover: Cover, g: GroupElement, c: VCell) -> VCell:
    u = act_vertex(cover, g, KVertex(c.w, c.pos))
    return VCell(u.w, u.pos, c.j)


def act_square(cover: Cover, g: GroupElement, s: Square) -> Square:
    c = act_hcell(cover, g, HCell(s.w, s.bottom))
    return Square(c.w, c.cell, s.j)


def square_top(cover: Cover, s: Square) -> list:
    """Oriented cells of the top path, in fiber w*t_j."""
    return cover.map_cell(s.j, s.bottom)


def square_corners(cover: Cover, s: Square) -> tuple:
    a, b = cover.endpoints(s.bottom)
    bot = (KVertex(s.w, a), KVertex(s.w, b))
    top = (vertical_target(cover, bot[0], s.j), vertical_target(cover, bot[1], s.j))
    return bot + top


def square_boundary_closes(cover: Cover, s: Square) -> bool:
    """Walk bottom, right vertical, reversed top, left vertical."""
    a, b, fa, fb = square_corners(cover, s)
    path = square_top(cover, s)
    start = cover.endpoints(*path[0])[0] if path else cover.map_vertex(s.j, b.pos)
    end = cover.endpoints(*path[-1])[1] if path else start
    return (start, end) == (fa.pos, fb.pos)


def square_boundary_word(cover: Cover, s: Square):
    """Letters read along the boundary, as mixed Letter objects.

    Only meaningful over a one-vertex graph, where every corner carries
    the same base vertex and the letters multiply to the identity.
    """
    from .words import Letter
    rep = cover.rep
    out = []
    lab = rep.label[s.bottom.edge]
    if lab:
        out.append(Letter(lab, 1, "horizontal"))
    out.append(Letter(s.j, 1, "vertical"))
    for c, sign in reversed(square_top(cover, s)):
        lab = rep.label[c.edge]
        if lab:
            out.append(Letter(lab, -sign, "horizontal"))
    out.append(Letter(s.j, -1, "vertical"))
    return out


def orbit_map(x):
    """Vertical part of a vertex or cell; vertical cells and squares map
    to the edge they fill."""
    if isinstance(x, (KVertex, HCell)):
        return x.w
    if isinstance(x, (VCell, Square)):
        return (x.w, concat(x.w, (x.j,)))
    raise TypeError(type(x))


def fiber_words(rho_v: int, k: int) -> list:
    """All reduced vertical words of length <= rho_v, BFS order."""
    out = [EMPTY]
    frontier = [EMPTY]
    for _ in range(rho_v):
        nxt = []
        for w in frontier:
            for a in range(-k, k + 1):
                if a == 0 or (w and w[-1] == -a):
                    continue
                nxt.append(w + (a,))
        out.extend(nxt)
        frontier = nxt
    return out


def iter_ball_cells(cover: Cover, radius: int):
    """Cells of the radius ball around the fiber center, streamed in BFS
    discovery order (each cell joins depth d to depth d+1)."""
    center = cover.basepoint
    seen = {center}
    frontier = [center]
    for _ in range(radius):
        nxt = []
        for v in frontier:
            for cell, _sign, far in cover.neighbors(v):
                if far not in seen:
                    seen.add(far)
                    nxt.append(far)
                    yield cell
        frontier = nxt


def square_directions(rho_v: int, k: int) -> list:
    """(fiber, direction) pairs whose square fibers both fit in rho_v."""
    out = []
    for w in fiber_words(rho_v, k):
        for j in range(1, k + 1):
            if len(concat(w, (j,))) <= rho_v:
                out.append((w, j))
    return out


class CylinderBall:
    """Realized portion: every fiber of depth <= rho_v carries the
    radius rho_h ball around its center, grown by whatever square tops
    spill past it.  Effective radii per fiber are recorded."""

    def __init__(self, rep_or_cover, rho_v: int, rho_h: int,
                 vertex_cap: int = 2_000_000):
        cover = rep_or_cover if isinstance(rep_or_cover, Cover) else Cover(rep_or_cover)
        self.cover = cover
        self.rho_v = rho_v
        self.rho_h = rho_h
        self.fibers = fiber_words(rho_v, cover.rep.k)
        self.core_vertices: set = set()
        self.core_cells: list = []
        dist = {cover.basepoint: 0}
        frontier = [cover.basepoint]
        self.core_vertices.add(cover.basepoint)
        for _ in range(rho_h):
            nxt = []
            for v in frontier:
                for cell, _sign, far in cover.neighbors(v):
                    if far not in dist:
                        dist[far] = dist[v] + 1
                        self.core_vertices.add(far)
                        self.core_cells.append(cell)
                        nxt.append(far)
            frontier = nxt
        self.center_dist = dist

        if (len(self.core_vertices) + len(self.core_cells)) * len(self.fibers) > vertex_cap:
            raise ResourceCap(
                f"ball would realize more than {vertex_cap} vertices")

        # fiber -> extra vertices swallowed by square tops
        self._fiber_set = set(self.fibers)
        self.extra: dict = defaultdict(set)
        self.squares: dict = {}
        for w, j in square_directions(rho_v, cover.rep.k):
            lst = []
            wj = concat(w, (j,))
            for cell in self.core_cells:
                s = Square(w, cell, j)
                for c, sign in square_top(cover, s):
                    for vert in cover.endpoints(c, sign):
                        if vert not in self.core_vertices:
                            self.extra[wj].add(vert)
                lst.append(s)
            self.squares[w, j] = lst
        self.effective_rho_h = {
            w: max([rho_h] + [cover.distance(cover.basepoint, v)
                              for v in self.extra.get(w, ())])
            for w in self.fibers}

    # -- membership ---------------------------------------------------------

    def has_vertex(self, u: KVertex) -> bool:
        return (u.w in self._fiber_set
                and (u.pos in self.core_vertices or u.pos in self.extra.get(u.w, ())))

    def vertices(self):
        for w in self.fibers:
            for pos in self.core_vertices:
                yield KVertex(w, pos)
            for pos in self.extra.get(w, ()):
                yield KVertex(w, pos)

    def all_squares(self):
        for lst in self.squares.values():
            yield from lst

    def square_count(self, w: Word, j: int) -> int:
        return len(self.squares.get((w, j), ()))

    def stats(self) -> dict:
        return {
            "rho_v": self.rho_v,
            "rho_h": self.rho_h,
            "fibers": len(self.fibers),
            "core_vertices_per_fiber": len(self.core_vertices),
            "extra_vertices": {" ".join(map(str, w)): len(v)
                               for w, v in sorted(self.extra.items()) if v},
            "squares": {f"{' '.join(map(str, w)) or 'e'}|t{j}": len(lst)
                        for (w, j), lst in sorted(self.squares.items())},
        }

    # -- the 1-skeleton -----------------------------------------------------

    def neighbors(self, u: KVertex):
        cv = self.cover
        for cell, sign, far in cv.neighbors(u.pos):
            far_v = KVertex(u.w, far)
            if self.has_vertex(far_v):
                yield HCell(u.w, cell), far_v
        for j in range(1, cv.rep.k + 1):
            up = vertical_target(cv, u, j)
            if self.has_vertex(up):
                yield VCell(u.w, u.pos, j), up
            down = vertical_source(cv, u, j)
            if self.has_vertex(down):
                yield VCell(down.w, down.pos, j), down

    def graph_distance(self, a: KVertex, b: KVertex) -> int:
        path = self.geodesic_path(a, b)
        return len(path)

    def geodesic_path(self, a: KVertex, b: KVertex) -> list:
        if not (self.has_vertex(a) and self.has_vertex(b)):
            raise KeyError("vertex outside the realized ball")
        if a == b:
            return []
        prev = {a: None}
        frontier = deque([a])
        while frontier:
            u = frontier.popleft()
            for cell, far in self.neighbors(u):
                if far not in prev:
                    prev[far] = (u, cell)
                    if far == b:
                        frontier.clear()
                        break
                    frontier.append(far)
        if b not in prev:
            raise KeyError("vertices not connected inside the ball")
        out = []
        cur = b
        while prev[cur] is not None:
            u, cell = prev[cur]
            out.append(cell)
            cur = u
        return list(reversed(out))

    def distance_is_exact(self, d: int) -> bool:
        return 2 * d <= min(self.rho_v, self.rho_h)

"""The universal cover of the representative graph, worked symbolically.

A vertex is a pair ``(g, v)``: the lift of the graph vertex ``v`` inside
the maximal-tree copy labelled by the reduced horizontal word ``g``.  A
1-cell is ``Cell(g, edge)``, the lift of ``edge`` whose positively
oriented start lies in copy ``g``; essential cells cross into the copy
``g * x`` carrying their generator label, tree and exceptional cells
stay inside one copy.

Because addresses are canonical, geodesics, sides, crowns, twins and the
Bt/Bot maps are all computed exactly, with no ball truncation: the
radius arguments accepted by the checkers are recorded in reports but
the answers are closed form.  Balls are still materialized on demand for
rendering and for the brute-force oracles in the test suite.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

from .rep import BfhRep
from .words import EMPTY, Word, concat, inv_word, reduce_word


class CVertex(NamedTuple):
    g: Word
    base: str


class Cell(NamedTuple):
    g: Word
    edge: str


OrientedCell = tuple  # (Cell, +1|-1)


class TwinPair(NamedTuple):
    incoming: Cell
    outgoing: Cell
    label: int
    shift: Word  # conjugate of a generator power, sends incoming to outgoing


class TwinError(ValueError):
    """The crown of a subtree failed to split into twin pairs."""


class Cover:
    def __init__(self, rep: BfhRep):
        if rep.sigma is None:
            raise ValueError(f"representative has no action: {rep.sigma_error}")
        self.rep = rep
        self.sigma = rep.sigma
        self.basepoint = CVertex(EMPTY, rep.basepoint)
        self._sigma_cache: dict = {}
        # base-lift data for the occurrence solves: for host edge h and
        # occurrence position p under f_i, the copy of the p-th cell of
        # F_i(identity lift of h)
        self._occ_cells: dict = {}

    # -- incidence ---------------------------------------------------------

    def label_letter(self, edge: str, sign: int = 1) -> int:
        lab = self.rep.label[edge]
        return sign * lab if lab else 0

    def ivertex(self, cell: Cell) -> CVertex:
        e = self.rep.fgraph.by_id[cell.edge]
        return CVertex(cell.g, e.src)

    def tvertex(self, cell: Cell) -> CVertex:
        e = self.rep.fgraph.by_id[cell.edge]
        lab = self.rep.label[cell.edge]
        g = concat(cell.g, (lab,)) if lab else cell.g
        return CVertex(g, e.dst)

    def endpoints(self, cell: Cell, sign: int = 1) -> tuple:
        a, b = self.ivertex(cell), self.tvertex(cell)
        return (a, b) if sign > 0 else (b, a)

    def neighbors(self, v: CVertex) -> list:
        """Oriented cells leaving v, as (cell, sign, far vertex)."""
        out = []
        for e in self.rep.fgraph.edges:
            if e.src == v.base:
                cell = Cell(v.g, e.id)
                out.append((cell, 1, self.tvertex(cell)))
            if e.dst == v.base:
                lab = self.rep.label[e.id]
                g = concat(v.g, (-lab,)) if lab else v.g
                cell = Cell(g, e.id)
                out.append((cell, -1, self.ivertex(cell)))
        return out

    # -- translations and the lifted maps -----------------------------------

    def translate_vertex(self, h: Sequence[int], v: CVertex) -> CVertex:
        return CVertex(concat(h, v.g), v.base)

    def translate_cell(self, h: Sequence[int], cell: Cell) -> Cell:
        return Cell(concat(h, cell.g), cell.edge)

    def sigma_word(self, i: int, g: Word) -> Word:
        key = (i, g)
        got = self._sigma_cache.get(key)
        if got is None:
            got = self._sigma_cache[key] = self.sigma.apply_letter(i, g)
        return got

    def map_vertex(self, i: int, v: CVertex) -> CVertex:
        """The lift F_i fixing the basepoint."""
        return CVertex(concat(self.sigma_word(i, v.g), self.rep.spine[i - 1][v.base]),
                       v.base)

    def walk(self, start: CVertex, path) -> list:
        """Lift an edge path of the graph starting at a given vertex."""
        out = []
        cur = start
        for eid, sign in path:
            lab = self.rep.label[eid]
            if sign > 0:
                cell = Cell(cur.g, eid)
            else:
                g = concat(cur.g, (-lab,)) if lab else cur.g
                cell = Cell(g, eid)
            a, b = self.endpoints(cell, sign)
            if a != cur:
                raise ValueError(f"path does not start at {cur}")
            out.append((cell, sign))
            cur = b
        return out

    def map_cell(self, i: int, cell: Cell, sign: int = 1) -> list:
        start = self.endpoints(cell, sign)[0]
        return self.walk(self.map_vertex(i, start),
                         self.rep.map_image(i, cell.edge, sign))

    # -- geodesics -----------------------------------------------------------

    def geodesic(self, u: CVertex, w: CVertex) -> list:
        """The unique reduced path between two vertices, as oriented cells."""
        d = concat(inv_word(u.g), w.g)
        cells = []
        cur = u
        for a in d:
            eid = self.rep.essential_of[abs(a)]
            e = self.rep.fgraph.by_id[eid]
            corner = e.src if a > 0 else e.dst
            cells.extend(self.walk(cur, self.rep.tree_path(cur.base, corner)))
            cur = CVertex(cur.g, corner)
            step = self.walk(cur, ((eid, 1 if a > 0 else -1),))
            cells.extend(step)
            cur = self.endpoints(*step[-1])[1]
        cells.extend(self.walk(cur, self.rep.tree_path(cur.base, w.base)))
        return cells

    def distance(self, u: CVertex, w: CVertex) -> int:
        """Length of the geodesic, computed without materializing it."""
        d = concat(inv_word(u.g), w.g)
        total = len(d)
        base = u.base
        for a in d:
            e = self.rep.fgraph.by_id[self.rep.essential_of[abs(a)]]
            if a > 0:
                total += len(self.rep.tree_path(base, e.src))
                base = e.dst
            else:
                total += len(self.rep.tree_path(base, e.dst))
                base = e.src
        return total + len(self.rep.tree_path(base, w.base))

    def crossings(self, u: CVertex, w: CVertex, cells) -> int:
        bag = cells if isinstance(cells, (set, frozenset)) else set(cells)
        return sum(1 for c, _ in self.geodesic(u, w) if c in bag)

    def spans(self, cells, u: CVertex, w: CVertex) -> bool:
        return self.crossings(u, w, cells) % 2 == 1

    def side_of(self, E: Cell, cells, v: CVertex) -> str:
        """Side of v relative to E with respect to a cell family."""
        return "right" if self.spans(cells, self.ivertex(E), v) else "left"

    def side_of_cell(self, E: Cell, X: Cell) -> str:
        """Side of the whole cell X relative to E alone (X != E)."""
        sides = {self.side_of(E, {E}, self.ivertex(X)),
                 self.side_of(E, {E}, self.tvertex(X))}
        if len(sides) != 1:
            raise ValueError(f"{X} straddles {E}")
        return sides.pop()

    # -- tops and bottoms ----------------------------------------------------

    def top_cell(self, E: Cell, i: int) -> Cell:
        """The unique cell with the same graph label in F_i(E)."""
        img = self.rep.map_image(i, E.edge)
        spots = [p for p, (eid, sign) in enumerate(img) if eid == E.edge]
        assert len(spots) == 1, f"{E.edge} not filtered under f_{i}"
        return self.map_cell(i, E)[spots[0]][0]

    def _occ_cell(self, i: int, host: str, pos: int) -> Cell:
        key = (i, host, pos)
        got = self._occ_cells.get(key)
        if got is None:
            got = self._occ_cells[key] = self.map_cell(i, Cell(EMPTY, host))[pos][0]
        return got

    def bot(self, X: Cell, i: int) -> list:
        """All cells whose F_i image runs over X (bottoms of the
        i-squares with X in their top); exact, one entry per occurrence
        of X's label in the f_i images."""
        out = []
        for host, pos, _sign in self.rep.occurrences(i, X.edge):
            c0 = self._occ_cell(i, host, pos)
            h = self.sigma_word(-i, concat(X.g, inv_word(c0.g)))
            out.append(Cell(h, host))
        return out

    def bot_star(self, X: Cell, i: int) -> list:
        """bot(X, i) minus the same-label bottom of X (the copy of X one
        square down), so colors built on it can vanish at both ends of
        that copy."""
        drop = self.e_bot(X, i)
        return [c for c in self.bot(X, i) if c != drop]

    def bt_i(self, E: Cell, i: int) -> list:
        return self.bot(self.top_cell(E, i), i)

    def bt(self, E: Cell) -> set:
        out = set()
        for i in range(1, self.rep.k + 1):
            out.update(self.bt_i(E, i))
        return out

    def e_bot(self, E: Cell, i: int) -> Cell:
        """The unique same-label cell whose i-top is E."""
        same = [c for c in self.bot(E, i) if c.edge == E.edge]
        assert len(same) == 1
        return same[0]

    # -- subtrees, crowns, completions, twins --------------------------------

    def span(self, vertices: Iterable[CVertex]) -> "Subtree":
        vs = list(dict.fromkeys(vertices))
        if not vs:
            raise ValueError("empty span")
        verts = {vs[0]}
        cells = set()
        for v in vs[1:]:
            for cell, sign in self.geodesic(vs[0], v):
                cells.add(cell)
                a, b = self.endpoints(cell, sign)
                verts.update((a, b))
            verts.add(v)
        return Subtree(self, frozenset(verts), frozenset(cells))

    def span_cells(self, cells: Iterable[Cell]) -> "Subtree":
        vs = []
        for c in cells:
            vs.extend(self.endpoints(c))
        return self.span(vs)

    # -- the lifted-map checks ------------------------------------------------

    def check_one_sided(self, radius: Optional[int] = None) -> dict:
        """One representative EoE cell per orbit; exact verdicts."""
        per_orbit = {}
        for eid in self.rep.eoe_edges():
            E = Cell(EMPTY, eid)
            others = sorted(self.bt(E) - {E})
            sides = {self.side_of_cell(E, X) for X in others}
            per_orbit[eid] = {
                "one_sided": len(sides) <= 1,
                "side": sides.pop() if len(sides) == 1 else None,
                "bt_size": len(others) + 1,
            }
        return {
            "one_sided": all(r["one_sided"] for r in per_orbit.values()),
            "per_orbit": per_orbit,
            "radius": radius,
            "complete": True,
        }

    def tied_data(self, eid: str) -> tuple:
        """Boundary geodesics of the completed Bt tree and their index sets."""
        E = Cell(EMPTY, eid)
        bt_tree = self.span_cells(self.bt(E))
        closure = bt_tree.completion()
        tops = {i: self.top_cell(E, i) for i in range(1, self.rep.k + 1)}
        iE, tE = self.ivertex(E), self.tvertex(E)
        runs = []
        for leaf in closure.leaves():
            if leaf in (iE, tE):
                runs.append((leaf, frozenset()))
                continue
            start = tE if self.spans({E}, iE, leaf) else iE
            hit = frozenset(
                i for i, top in tops.items()
                if self.spans({top}, self.map_vertex(i, start), self.map_vertex(i, leaf)))
            runs.append((leaf, hit))
        return runs

    def check_tied(self, radius: Optional[int] = None,
                   reading: str = "per_geodesic") -> dict:
        per_orbit = {}
        for eid in self.rep.eoe_edges():
            candidates = self.rep.tied_index_candidates(eid)
            runs = self.tied_data(eid)
            nonempty = [hit for _, hit in runs if hit]
            if reading == "per_geodesic":
                ok = all(hit == candidates for hit in nonempty)
            elif reading == "global":
                union = frozenset().union(*nonempty) if nonempty else frozenset()
                ok = union in (frozenset(), frozenset(candidates))
            else:
                raise ValueError(f"unknown reading {reading!r}")
            per_orbit[eid] = {
                "tied": ok,
                "index_set": sorted(candidates),
                "geodesics": len(runs),
                "spanning_geodesics": len(nonempty),
            }
        return {
            "tied": all(r["tied"] for r in per_orbit.values()),
            "per_orbit": per_orbit,
            "radius": radius,
            "reading": reading,
            "complete": True,
        }


@dataclass(frozen=True)
class Subtree:
    """A finite subtree: geodesically closed vertex and cell sets."""

    cover: Cover
    vertices: frozenset
    cells: frozenset

    def labels(self) -> set:
        return {v.g for v in self.vertices}

    def translate(self, h: Sequence[int]) -> "Subtree":
        cv = self.cover
        return Subtree(cv, frozenset(cv.translate_vertex(h, v) for v in self.vertices),
                       frozenset(cv.translate_cell(h, c) for c in self.cells))

    def leaves(self) -> list:
        deg: dict = defaultdict(int)
        for c in self.cells:
            a, b = self.cover.endpoints(c)
            deg[a] += 1
            deg[b] += 1
        if not self.cells:
            return sorted(self.vertices)
        return sorted(v for v in self.vertices if deg[v] <= 1)

    def crown(self) -> set:
        """Essential cells incident, by copy label, and not inside."""
        cv = self.cover
        out = set()
        for g in self.labels():
            for i in range(1, cv.rep.n + 1):
                eid = cv.rep.essential_of[i]
                outgoing = Cell(g, eid)
                incoming = Cell(concat(g, (-i,)), eid)
                for cell in (outgoing, incoming):
                    if cell not in self.cells:
                        out.add(cell)
        return out

    def completion(self) -> "Subtree":
        cv = self.cover
        labels = self.labels()
        attach = list(self.vertices)
        for cell in self.crown():
            for v in cv.endpoints(cell):
                if v.g in labels:
                    attach.append(v)
        return cv.span(attach)

    def twins(self) -> list:
        """The twin-pair partition of the crown."""
        cv = self.cover
        labels = self.labels()
        lines = defaultdict(list)
        for cell in self.crown():
            i = cv.rep.label[cell.edge]
            root, pos = _split_power(cell.g, i)
            lines[i, root].append((pos, cell))
        pairs = []
        for (i, root), entries in sorted(lines.items()):
            ins, outs = [], []
            for pos, cell in entries:
                is_out = cell.g in labels
                is_in = concat(cell.g, (i,)) in labels
                if is_in == is_out:
                    raise TwinError(f"crown cell {cell} is not exactly one of "
                                    f"incoming/outgoing")
                (outs if is_out else ins).append((pos, cell))
            if len(ins) != 1 or len(outs) != 1:
                raise TwinError(f"line ({i},{root}) has {len(ins)} incoming and "
                                f"{len(outs)} outgoing crown cells")
            (m_in, c_in), (m_out, c_out) = ins[0], outs[0]
            shift = concat(root, (i,) * (m_out - m_in) if m_out >= m_in
                           else (-i,) * (m_in - m_out), inv_word(root))
            pairs.append(TwinPair(c_in, c_out, i, shift))
        return pairs


def _split_power(g: Word, i: int) -> tuple:
    """Write g = root * x_i^m with root not ending in x_i^+-1."""
    m = 0
    end = len(g)
    while end > 0 and abs(g[end - 1]) == i:
        m += 1 if g[end - 1] > 0 else -1
        end -= 1
    return g[:end], m


class CoverBall:
    """Materialized ball around the basepoint, for rendering and for the
    brute-force oracles in the tests."""

    def __init__(self, cover: Cover, radius: int):
        self.cover = cover
        self.radius = radius
        self.vertices = {cover.basepoint}
        self.cells = set()
        self.dist = {cover.basepoint: 0}
        frontier = [cover.basepoint]
        for r in range(radius):
            nxt = []
            for v in frontier:
                for cell, _sign, far in cover.neighbors(v):
                    self.cells.add(cell)
                    if far not in self.vertices:
                        self.vertices.add(far)
                        self.dist[far] = r + 1
                        nxt.append(far)
            frontier = nxt

    def expand(self, radius: int) -> "CoverBall":
        return self if radius <= self.radius else CoverBall(self.cover, radius)

    def bfs_geodesic(self, u: CVertex, w: CVertex) -> list:
        """Oracle: breadth-first path inside the realized ball."""
        if u not in self.vertices or w not in self.vertices:
            raise KeyError("vertex outside the realized ball")
        prev = {u: None}
        frontier = [u]
        while frontier and w not in prev:
            nxt = []
            for v in frontier:
                for cell, sign, far in self.cover.neighbors(v):
                    if far in self.vertices and far not in prev:
                        prev[far] = (v, cell, sign)
                        nxt.append(far)
            frontier = nxt
        if w not in prev:
            raise KeyError("no path inside ball")
        path = []
        cur = w
        while prev[cur] is not None:
            v, cell, sign = prev[cur]
            path.append((cell, sign))
            cur = v
        return list(reversed(path))

"""Vertical and diagonal walls of the mapping cylinder.

Vertical walls are pulled back from the classical walls of the vertical
tree and need no geometry.  A diagonal wall is attached to an EoE cell
E and is built in stages:

  tops and bottoms -> colored blocks -> companion -> biblock ->
  enabled shifts, stairs and lifts -> replicative subgroup ->
  cut orbit inside a finite window -> side queries by cut parity.

All blocks are built for the orbit representative of E in the identity
fiber; translates are handled by the group action.  Cut sets are orbits
of the elementary cuts under the replicative generators, saturated
inside an explicit window (fiber depth and horizontal radius), and every
downstream answer is scoped to that window.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

from .cover import Cell, Cover, CVertex, Subtree
from .cylinder import (HCell, KVertex, Square, VCell, act_hcell, act_vcell,
                       act_vertex, square_top, vertical_source, vertical_target)
from .words import (EMPTY, GroupElement, IDENTITY, Word, concat, from_vh,
                    inv_word, invert, multiply, reduce_word)


class WallError(ValueError):
    pass


class ParityError(WallError):
    """Two paths with equal endpoints crossed different cut parities."""


# ---------------------------------------------------------------------------
# vertical walls


class VerticalWall(NamedTuple):
    w: Word
    j: int  # the wall of the vertical 1-cell from w to w*t_j

    def side_of(self, x) -> str:
        v = x.w if isinstance(x, KVertex) else x.v
        rel = concat(inv_word(self.w), v)
        return "right" if rel[:1] == (self.j,) else "left"


def vertical_walls_between(g: GroupElement, gp: GroupElement) -> int:
    return len(concat(inv_word(g.v), gp.v))


def vertical_walls_on_geodesic(g: GroupElement, gp: GroupElement) -> list:
    """The separating vertical walls, one per edge of the vertical path."""
    d = concat(inv_word(g.v), gp.v)
    out = []
    w = g.v
    for a in d:
        if a > 0:
            out.append(VerticalWall(w, a))
        w = concat(w, (a,))
        if a < 0:
            out.append(VerticalWall(w, -a))
    return out


# ---------------------------------------------------------------------------
# element bookkeeping


def element_of(cover: Cover, u: KVertex) -> GroupElement:
    return from_vh(cover.sigma, u.w, u.pos.g)


def translation_between(cover: Cover, a: HCell, b: HCell) -> GroupElement:
    """The unique left translation with g . a = b (same labels)."""
    if a.cell.edge != b.cell.edge:
        raise WallError(f"no translation between labels {a.cell.edge}, {b.cell.edge}")
    ga = element_of(cover, KVertex(a.w, cover.ivertex(a.cell)))
    gb = element_of(cover, KVertex(b.w, cover.ivertex(b.cell)))
    g = multiply(gb, invert(ga, cover.sigma), cover.sigma)
    if act_hcell(cover, g, a) != b:
        raise WallError(f"translation {g} fails to carry {a} to {b}")
    return g


# ---------------------------------------------------------------------------
# colored trees


@dataclass
class ColoredTree:
    """A subtree in one fiber with a (Z/2)^k vertex coloring.

    Coordinate i flips exactly across the cells in flips[i-1]; the color
    is propagated over the tree from an anchor vertex.
    """

    w: Word
    tree: Subtree
    flips: list          # k sets of Cells
    color: dict = field(default_factory=dict)

    def propagate(self, anchor: CVertex, anchor_color: tuple) -> "ColoredTree":
        cv = self.tree.cover
        adj = defaultdict(list)
        for c in self.tree.cells:
            a, b = cv.endpoints(c)
            adj[a].append((c, b))
            adj[b].append((c, a))
        self.color = {anchor: tuple(anchor_color)}
        stack = [anchor]
        while stack:
            v = stack.pop()
            base = self.color[v]
            for c, far in adj[v]:
                val = tuple((base[i] + (1 if c in self.flips[i] else 0)) % 2
                            for i in range(len(base)))
                if far in self.color:
                    if self.color[far] != val:
                        raise WallError(f"color propagation clash at {far}")
                else:
                    self.color[far] = val
                    stack.append(far)
        missing = self.tree.vertices - set(self.color)
        if missing:
            raise WallError(f"colored tree is not connected at {sorted(missing)[:3]}")
        return self

    def color_of(self, pos: CVertex) -> tuple:
        return self.color[pos]

    def positive_vertices(self, i: int) -> list:
        return sorted(v for v, c in self.color.items() if c[i - 1])


# ---------------------------------------------------------------------------
# blocks


@dataclass
class Block:
    """A colored c-bottom with its c-tops, centered at one EoE cell."""

    center: Cell                  # lives in the block's base fiber
    w: Word                       # base fiber
    epsilon: int                  # +1 / -1
    I: frozenset
    cbottom: ColoredTree
    ctops: dict                   # i -> ColoredTree in fiber w*t_i
    nuclei: dict                  # i -> Cell (the c-top nucleus)

    def top_indices(self) -> list:
        return sorted(self.ctops)


def bottom_tree(cover: Cover, E: Cell) -> Subtree:
    """The completed bottom B(E): the completion of the span of the
    fiberwise preimages of the top trees."""
    k = cover.rep.k
    bot_all = set()
    for i in range(1, k + 1):
        bot_all.update(cover.bot(cover.top_cell(E, i), i))
    base = cover.span_cells(bot_all)
    top_e_cells = top_tree_cells(cover, E)
    pre = []
    for i in range(1, k + 1):
        lift = _lift_translation(cover, E, i)
        for c in top_e_cells:
            for v in cover.endpoints(act_hcell(cover, lift, HCell(EMPTY, c)).cell):
                pre.append(vertical_source(cover, KVertex((i,), v), i).pos)
    for c in base.cells:
        pre.extend(cover.endpoints(c))
    return cover.span(pre).completion()


def top_tree_cells(cover: Cover, E: Cell) -> frozenset:
    """Cells of Top(E): the union over j of the pulled-back top trees.

    The union is the same whichever index is used to pull back, which is
    asserted here rather than assumed.
    """
    k = cover.rep.k
    bot_all = set()
    for i in range(1, k + 1):
        bot_all.update(cover.bot(cover.top_cell(E, i), i))
    base = cover.span_cells(bot_all)
    per_j = {}
    for j in range(1, k + 1):
        cells = set()
        for c in base.cells:
            cells.update(cc for cc, _ in cover.map_cell(j, c))
        per_j[j] = cells
    out = set()
    for j in range(1, k + 1):
        inv_lift = invert(_lift_translation(cover, E, j), cover.sigma)
        out.update(act_hcell(cover, inv_lift, HCell((j,), c)).cell for c in per_j[j])
    for i in range(1, k + 1):
        lift = _lift_translation(cover, E, i)
        direct = set()
        for j in range(1, k + 1):
            move = multiply(lift, invert(_lift_translation(cover, E, j), cover.sigma),
                            cover.sigma)
            direct.update(act_hcell(cover, move, HCell((j,), c)).cell
                          for c in per_j[j])
        pulled = {act_hcell(cover, invert(lift, cover.sigma), HCell((i,), c)).cell
                  for c in direct}
        if pulled != out:
            raise WallError(f"top tree depends on the pullback index {i}")
    return frozenset(out)


def _lift_translation(cover: Cover, E: Cell, i: int) -> GroupElement:
    """The translation carrying E (identity fiber) to its i-top."""
    return translation_between(cover, HCell(EMPTY, E),
                               HCell((i,), cover.top_cell(E, i)))


def make_block(cover: Cover, E: Cell, epsilon: int, I: frozenset,
               fiber: Word = EMPTY) -> Block:
    """Blocks of the wall at E: white when I is empty, companion shape
    otherwise.  ``fiber`` tags where the c-bottom lives."""
    k = cover.rep.k
    top_idx = sorted(I) if I else list(range(1, k + 1))

    bt = bottom_tree(cover, E)
    flips = []
    for l in range(1, k + 1):
        if not I:
            cells = set(cover.bot_star(cover.top_cell(E, l), l))
        elif l in I:
            cells = set(cover.bot(cover.top_cell(E, l), l))
        else:
            cells = set()
        flips.append(cells & set(bt.cells))
    cbottom = ColoredTree(fiber, bt, flips)
    if I:
        anchor = cover.ivertex(E) if epsilon > 0 else cover.tvertex(E)
        anchor_color = tuple(1 if (l + 1) in I else 0 for l in range(k))
    else:
        anchor = cover.ivertex(E)
        anchor_color = (0,) * k
    cbottom.propagate(anchor, anchor_color)

    ctops = {}
    nuclei = {}
    top_e = top_tree_cells(cover, E)
    for i in top_idx:
        lift = _lift_translation(cover, E, i)
        nucleus = cover.top_cell(E, i)
        cells = {act_hcell(cover, lift, HCell(EMPTY, c)).cell for c in top_e}
        tree = cover.span_cells(cells).completion()
        tflips = []
        for l in range(1, k + 1):
            if l in I:
                tflips.append({nucleus} & set(tree.cells))
            else:
                tflips.append(set(cover.bot_star(cover.top_cell(nucleus, l), l))
                              & set(tree.cells))
        ct = ColoredTree(concat(fiber, (i,)), tree, tflips)
        if I:
            # sign flipped relative to the c-bottom
            anchor = cover.ivertex(nucleus) if -epsilon > 0 else cover.tvertex(nucleus)
            anchor_color = tuple(1 if (l + 1) in I else 0 for l in range(k))
        else:
            anchor = cover.ivertex(nucleus)
            anchor_color = (0,) * k
        ct.propagate(anchor, anchor_color)
        ctops[i] = ct
        nuclei[i] = nucleus
    return Block(E, fiber, epsilon, frozenset(I), cbottom, ctops, nuclei)


def translate_block(cover: Cover, g: GroupElement, block: Block) -> Block:
    """Left translate of a block by a horizontal element (same fibers)."""
    if g.v:
        raise WallError("blocks are translated fiberwise by horizontal elements")

    def move_tree(ct: ColoredTree) -> ColoredTree:
        carried = cover.sigma.conj(inv_word(ct.w), g.h)
        tree = ct.tree.translate(carried)
        flips = [{cover.translate_cell(carried, c) for c in f} for f in ct.flips]
        out = ColoredTree(ct.w, tree, flips)
        out.color = {cover.translate_vertex(carried, v): col
                     for v, col in ct.color.items()}
        return out

    center = act_hcell(cover, g, HCell(block.w, block.center)).cell
    ctops = {i: move_tree(ct) for i, ct in block.ctops.items()}
    nuclei = {i: act_hcell(cover, g, HCell(concat(block.w, (i,)), c)).cell
              for i, c in block.nuclei.items()}
    return Block(center, block.w, block.epsilon, block.I, move_tree(block.cbottom),
                 ctops, nuclei)


# ---------------------------------------------------------------------------
# spanning pairs, companion, biblock


def pair_spans(cover: Cover, pair, cells) -> bool:
    """Whether the connecting path of a twin pair crosses an odd number
    of the given cells."""
    return cover.spans(cells, cover.ivertex(pair.incoming),
                       cover.tvertex(pair.outgoing))


def spanning_indices(cover: Cover, E: Cell, X: Cell) -> frozenset:
    """Indices i for which the geodesic from E to X runs over the bottom
    set of the i-top of E an odd number of times."""
    near_e = cover.tvertex(E) if cover.side_of_cell(E, X) == "right" else cover.ivertex(E)
    iv, tv = cover.ivertex(X), cover.tvertex(X)
    near_x = iv if len(cover.geodesic(near_e, iv)) < len(cover.geodesic(near_e, tv)) else tv
    out = set()
    for i in range(1, cover.rep.k + 1):
        bag = set(cover.bot(cover.top_cell(E, i), i))
        if cover.spans(bag, near_e, near_x):
            out.add(i)
    return frozenset(out)


class BridgeCandidate(NamedTuple):
    pair: object
    bridge: Cell
    partner: Cell
    indices: frozenset


def bridge_candidates(cover: Cover, E: Cell, bt: Subtree) -> list:
    """Cells of crown pairs whose own geodesic from E, and not their
    twin's, runs over some bottom set: the possible bridges."""
    out = []
    for pair in bt.twins():
        s_in = spanning_indices(cover, E, pair.incoming)
        s_out = spanning_indices(cover, E, pair.outgoing)
        if s_in - s_out:
            out.append(BridgeCandidate(pair, pair.incoming, pair.outgoing,
                                       s_in - s_out))
        if s_out - s_in:
            out.append(BridgeCandidate(pair, pair.outgoing, pair.incoming,
                                       s_out - s_in))
    return out


@dataclass
class Biblock:
    E: Cell
    I: frozenset
    white: Block
    companion: Optional[Block]
    main_bridge: Optional[Cell]          # identity-fiber cell
    bridge_shift: Optional[GroupElement]
    clusters: dict                       # fiber word -> ColoredTree

    def cluster_of(self, w: Word) -> Optional[ColoredTree]:
        return self.clusters.get(w)


def build_biblock(cover: Cover, eid: str, I: Optional[frozenset] = None,
                  companion_at_top: bool = False) -> Biblock:
    """The biblock of the representative EoE cell of one orbit.

    ``companion_at_top`` switches to the alternate reading that centers
    the companion one fiber up; the default keeps it in the fiber of E,
    which is what makes the main bridge adjacent to both blocks.
    """
    rep = cover.rep
    E = Cell(EMPTY, eid)
    if I is None:
        I = frozenset(rep.tied_index_candidates(eid))
    white = make_block(cover, E, +1, frozenset())

    has_nonexc = any(
        any(not rep.is_eoe(c.edge) or rep.label[c.edge]
            for c in cover.bot_star(cover.top_cell(E, i), i))
        for i in range(1, rep.k + 1))
    companion = None
    bridge = None
    shift = None
    if has_nonexc:
        if not I:
            raise WallError(f"{eid} has non-exceptional bottoms but an empty "
                            f"tied set")
        cands = bridge_candidates(cover, E, white.cbottom.tree)
        if not cands:
            raise WallError(f"no spanning pair for {eid} despite non-exceptional "
                            f"bottoms")
        cands.sort(key=lambda c: (-rep.fgraph.height[c.bridge.edge],
                                  c.bridge.g, c.bridge.edge))
        chosen = cands[0]
        bridge = chosen.bridge
        pair = chosen.pair
        s = pair.shift if chosen.bridge == pair.outgoing else inv_word(pair.shift)
        shift = GroupElement(reduce_word(s), EMPTY)
        Z = cover.translate_cell(shift.h, E)
        side = cover.side_of_cell(Z, bridge)
        eps = +1 if side == "left" else -1
        if companion_at_top:
            i0 = min(I)
            companion = make_block(cover, cover.top_cell(Z, i0), eps, frozenset(I),
                                   fiber=(i0,))
        else:
            companion = make_block(cover, Z, eps, frozenset(I))

    clusters = _merge_clusters(cover, white, companion, bridge)
    return Biblock(E, frozenset(I), white, companion, bridge, shift, clusters)


def _merge_clusters(cover: Cover, white: Block, companion: Optional[Block],
                    bridge: Optional[Cell]) -> dict:
    k = cover.rep.k
    parts = defaultdict(list)
    parts[white.cbottom.w].append(white.cbottom)
    for ct in white.ctops.values():
        parts[ct.w].append(ct)
    if companion is not None:
        parts[companion.cbottom.w].append(companion.cbottom)
        for ct in companion.ctops.values():
            parts[ct.w].append(ct)

    merged = {}
    for w, trees in sorted(parts.items()):
        cells = set()
        for ct in trees:
            cells.update(ct.tree.cells)
        tree = cover.span_cells(cells).completion()
        flips = [set() for _ in range(k)]
        for ct in trees:
            for i in range(k):
                flips[i].update(ct.flips[i])
        out = ColoredTree(w, tree, flips)
        anchor = next(iter(trees[0].color))
        out.propagate(anchor, trees[0].color[anchor])
        # the merged color must restrict to each component's own color
        for ct in trees:
            for v, col in ct.color.items():
                if out.color[v] != col:
                    raise WallError(
                        f"admissible colors disagree at {v} in fiber {w}: "
                        f"{out.color[v]} vs {col} (input not tied/one-sided?)")
        merged[w] = out
    return merged


# ---------------------------------------------------------------------------
# pair status, mirrors, subgroups


class PairStatus(NamedTuple):
    fiber: Word
    pair: object
    enabled: bool
    color: Optional[tuple]


def enabled_pairs(cover: Cover, biblock: Biblock) -> list:
    out = []
    for w, cluster in sorted(biblock.clusters.items()):
        for pair in cluster.tree.twins():
            a = cover.tvertex(pair.incoming)
            b = cover.ivertex(pair.outgoing)
            ca, cb = cluster.color.get(a), cluster.color.get(b)
            enabled = ca is not None and ca == cb
            out.append(PairStatus(w, pair, enabled, ca if enabled else None))
    return out


def horizontal_generators(cover: Cover, biblock: Biblock) -> list:
    """Shifts of the enabled twin pairs with non-vanishing color."""
    gens = []
    for st in enabled_pairs(cover, biblock):
        if st.enabled and st.color and any(st.color):
            h = cover.sigma.conj(st.fiber, st.pair.shift)
            gens.append(GroupElement(h, EMPTY))
    return gens


def block_lifts(cover: Cover, block: Block) -> dict:
    """The (l, bottom-of-center)-lifts, indices outside the block's I."""
    out = {}
    for l in range(1, cover.rep.k + 1):
        if l in block.I:
            continue
        ebot = cover.e_bot(block.center, l)
        out[l] = translation_between(cover, HCell(concat(block.w, (-l,)), ebot),
                                     HCell(block.w, block.center))
    return out


class Stairs(NamedTuple):
    i: int
    left: GroupElement    # sends the outgoing top twin to the incoming bottom twin
    right: GroupElement   # sends the incoming top twin to the outgoing bottom twin
    bottom_pair: object
    top_pair: object


def block_stairs(cover: Cover, block: Block) -> list:
    """The stair translations of a colored block, one pair per index."""
    out = []
    if not block.I:
        return out
    bottom_pairs = [p for p in block.cbottom.tree.twins()
                    if pair_spans(cover, p, {block.center})]
    if len(bottom_pairs) != 1:
        raise WallError(f"expected one spanning pair in the c-bottom, got "
                        f"{len(bottom_pairs)}")
    bp = bottom_pairs[0]
    for i in sorted(block.I):
        nucleus = block.nuclei[i]
        top_pairs = [p for p in block.ctops[i].tree.twins()
                     if pair_spans(cover, p, {nucleus})]
        if len(top_pairs) != 1:
            raise WallError(f"expected one spanning pair in the {i}-c-top, got "
                            f"{len(top_pairs)}")
        tp = top_pairs[0]
        up = concat(block.w, (i,))
        left = translation_between(cover, HCell(up, tp.outgoing),
                                   HCell(block.w, bp.incoming))
        right = translation_between(cover, HCell(up, tp.incoming),
                                    HCell(block.w, bp.outgoing))
        out.append(Stairs(i, left, right, bp, tp))
    return out


class MirrorData(NamedTuple):
    companion_pair: object
    white_pair: object
    mirror: Optional[GroupElement]
    nonvanishing_end: str  # which coherent end carried the color


def mirrors(cover: Cover, biblock: Biblock) -> list:
    """The bridge-pair bijection between the companion and the white
    block, with the associated mirror shifts."""
    if biblock.companion is None:
        return []
    cluster = biblock.clusters[EMPTY]
    white_bridges = {c.bridge for c in
                     bridge_candidates(cover, biblock.E, biblock.white.cbottom.tree)}
    comp_bridges = {c.bridge for c in
                    bridge_candidates(cover, biblock.companion.center,
                                      biblock.companion.cbottom.tree)}

    def pairs_with(tree, bag):
        return [p for p in tree.twins()
                if p.incoming in bag or p.outgoing in bag]

    wpairs = pairs_with(biblock.white.cbottom.tree, white_bridges | comp_bridges)
    cpairs = pairs_with(biblock.companion.cbottom.tree, white_bridges | comp_bridges)
    if len(wpairs) != len(cpairs):
        raise WallError(f"bridge pairs do not biject: {len(cpairs)} companion vs "
                        f"{len(wpairs)} white")
    out = []
    for cp in cpairs:
        matches = [wp for wp in wpairs if wp.label == cp.label]
        if not matches:
            raise WallError(f"no label match for companion bridge pair {cp}")
        wp = matches[0]
        ends = []
        for (cx, wx, tag) in (
                (cp.incoming, wp.outgoing, "in-out"),
                (cp.outgoing, wp.incoming, "out-in")):
            a = cover.tvertex(cx) if tag == "in-out" else cover.ivertex(cx)
            b = cover.ivertex(wx) if tag == "in-out" else cover.tvertex(wx)
            ca, cb = cluster.color.get(a), cluster.color.get(b)
            agree = ca is not None and ca == cb
            ends.append((tag, cx, wx, agree, ca))
        nonvan = [e for e in ends if e[3] and e[4] and any(e[4])]
        if len(nonvan) != 1:
            raise WallError(f"mirror color rule failed for {cp}: {ends}")
        tag, cx, wx, _, _ = nonvan[0]
        mirror = None
        if cx != wx:
            mirror = translation_between(cover, HCell(EMPTY, cx), HCell(EMPTY, wx))
        out.append(MirrorData(cp, wp, mirror, tag))
    return out


class Subgroups(NamedTuple):
    horizontal: list   # the E-horizontal generators
    diagonal: list     # horizontal + stairs
    replicative: list  # diagonal + lifts
    hor_stabilizer: list

    def as_json(self):
        return {
            "horizontal": [str(g) for g in self.horizontal],
            "diagonal": [str(g) for g in self.diagonal],
            "replicative": [str(g) for g in self.replicative],
            "hor_stabilizer": [str(g) for g in self.hor_stabilizer],
        }


def subgroups(cover: Cover, biblock: Biblock, stair_power: int = 2) -> Subgroups:
    hor = horizontal_generators(cover, biblock)
    stairs = []
    lifts = list(block_lifts(cover, biblock.white).values())
    if biblock.companion is not None:
        stairs_data = block_stairs(cover, biblock.companion)
        for s in stairs_data:
            stairs.extend((s.left, s.right))
        lifts.extend(block_lifts(cover, biblock.companion).values())
    diagonal = hor + stairs
    replicative = diagonal + lifts
    sig = cover.sigma
    by_index = defaultdict(list)
    for g in lifts + stairs:
        if g.v:
            by_index[abs(g.v[0])].append(g)
    stab = []
    for idx, elems in sorted(by_index.items()):
        for l1 in elems:
            for l2 in elems:
                for h in hor:
                    for m in range(1, stair_power + 1):
                        a = IDENTITY
                        for _ in range(m):
                            a = multiply(a, invert(l1, sig), sig)
                        b = IDENTITY
                        for _ in range(m):
                            b = multiply(b, l2, sig)
                        stab.append(multiply(multiply(a, h, sig), b, sig))
    return Subgroups(hor, diagonal, replicative, stab)


# ---------------------------------------------------------------------------
# the diagonal wall: elementary cuts and their orbit


@dataclass
class Window:
    """Fiber depth and horizontal radius bounding the saturated region."""

    cover: Cover
    depth: int
    radius: int
    _dist: dict = field(default_factory=dict)

    def dist(self, pos: CVertex) -> int:
        got = self._dist.get(pos)
        if got is None:
            got = self._dist[pos] = self.cover.distance(self.cover.basepoint, pos)
        return got

    def has_hcell(self, c: HCell) -> bool:
        if len(c.w) > self.depth:
            return False
        return max(self.dist(self.cover.ivertex(c.cell)),
                   self.dist(self.cover.tvertex(c.cell))) <= self.radius

    def has_vcell(self, c: VCell) -> bool:
        if max(len(c.w), len(concat(c.w, (c.j,)))) > self.depth:
            return False
        up = vertical_target(self.cover, KVertex(c.w, c.pos), c.j)
        return max(self.dist(c.pos), self.dist(up.pos)) <= self.radius


@dataclass
class DiagonalWall:
    E: HCell
    biblock: Biblock
    gens: Subgroups
    elementary_h: frozenset    # HCells
    elementary_v: frozenset    # VCells
    hcuts: frozenset
    vcuts: frozenset
    window: Window
    depth_reached: int
    saturated: bool
    label: str = ""

    def translate(self, cover: Cover, g: GroupElement) -> "TranslatedWall":
        return TranslatedWall(self, g, invert(g, cover.sigma))

    def base(self) -> "DiagonalWall":
        return self

    def offset(self) -> GroupElement:
        return IDENTITY

    def has_hcut(self, cover, c: HCell) -> bool:
        return c in self.hcuts

    def has_vcut(self, cover, c: VCell) -> bool:
        return c in self.vcuts

    def in_window(self, cover, c) -> bool:
        return self.window.has_hcell(c) if isinstance(c, HCell) \
            else self.window.has_vcell(c)

    def wall_id(self):
        return ("diagonal", self.label, self.E)


class TranslatedWall:
    """A left translate g.W of a stored wall; all queries are answered by
    pulling cells back through g."""

    def __init__(self, wall: DiagonalWall, g: GroupElement, ginv: GroupElement):
        self.wall = wall
        self.g = g
        self.ginv = ginv
        self.E = None  # filled below for reporting

    def base(self) -> DiagonalWall:
        return self.wall

    def offset(self) -> GroupElement:
        return self.g

    def has_hcut(self, cover, c: HCell) -> bool:
        return act_hcell(cover, self.ginv, c) in self.wall.hcuts

    def has_vcut(self, cover, c: VCell) -> bool:
        return act_vcell(cover, self.ginv, c) in self.wall.vcuts

    def in_window(self, cover, c) -> bool:
        back = act_hcell(cover, self.ginv, c) if isinstance(c, HCell) \
            else act_vcell(cover, self.ginv, c)
        return self.wall.in_window(cover, back)

    def wall_id(self):
        return ("diagonal", self.wall.label, self.g)


def elementary_cuts(cover: Cover, biblock: Biblock) -> tuple:
    hcut = set()
    for i, nucleus in biblock.white.nuclei.items():
        hcut.add(HCell(concat(biblock.white.w, (i,)), nucleus))
    if biblock.companion is not None:
        for i, nucleus in biblock.companion.nuclei.items():
            hcut.add(HCell(concat(biblock.companion.w, (i,)), nucleus))
    vcut = set()
    for w, cluster in biblock.clusters.items():
        for i in range(1, cover.rep.k + 1):
            for v in cluster.positive_vertices(i):
                vcut.add(VCell(w, v, i))
    return frozenset(hcut), frozenset(vcut)


def build_wall(cover: Cover, eid: str, depth: int = 3, radius: int = 8,
               orbit_length: Optional[int] = 6,
               companion_at_top: bool = False) -> DiagonalWall:
    """Enumerate the cut orbit of the representative EoE cell inside the
    window, breadth-first over generator words of length at most
    ``orbit_length`` (None runs to the in-window fixpoint).  The window
    keeps everything finite; the ``saturated`` flag records whether the
    search hit the length cap with work left."""
    biblock = build_biblock(cover, eid, companion_at_top=companion_at_top)
    gens = subgroups(cover, biblock)
    eh, ev = elementary_cuts(cover, biblock)
    window = Window(cover, depth, radius)
    sig = cover.sigma
    motions = []
    for g in gens.replicative:
        motions.append(g)
        motions.append(invert(g, sig))

    # carried horizontal words per (motion, fiber): acting on fiber w
    # multiplies the position by w^-1 h w and moves to fiber v w
    carried: dict = {}

    def act_h(m: int, g: GroupElement, c: HCell) -> HCell:
        key = (m, c.w)
        got = carried.get(key)
        if got is None:
            got = carried[key] = (concat(g.v, c.w),
                                  sig.conj(inv_word(c.w), g.h))
        nw, ch = got
        return HCell(nw, Cell(concat(ch, c.cell.g), c.cell.edge))

    def act_v(m: int, g: GroupElement, c: VCell) -> VCell:
        key = (m, c.w)
        got = carried.get(key)
        if got is None:
            got = carried[key] = (concat(g.v, c.w),
                                  sig.conj(inv_word(c.w), g.h))
        nw, ch = got
        return VCell(nw, CVertex(concat(ch, c.pos.g), c.pos.base), c.j)

    hcuts = {c for c in eh if window.has_hcell(c)}
    vcuts = {c for c in ev if window.has_vcell(c)}
    frontier = [("h", c) for c in hcuts] + [("v", c) for c in vcuts]
    length = 0
    saturated = True
    while frontier:
        if orbit_length is not None and length >= orbit_length:
            saturated = False
            break
        length += 1
        nxt = []
        for kind, c in frontier:
            for m, g in enumerate(motions):
                if kind == "h":
                    d = act_h(m, g, c)
                    if d not in hcuts and window.has_hcell(d):
                        hcuts.add(d)
                        nxt.append(("h", d))
                else:
                    d = act_v(m, g, c)
                    if d not in vcuts and window.has_vcell(d):
                        vcuts.add(d)
                        nxt.append(("v", d))
        frontier = nxt
    return DiagonalWall(HCell(EMPTY, biblock.E), biblock, gens, eh, ev,
                        frozenset(hcuts), frozenset(vcuts), window, length,
                        saturated, label=eid)


# ---------------------------------------------------------------------------
# side queries


def _vertical_climb(cover: Cover, start: KVertex, w: Word) -> tuple:
    """Vertical path appending the letters of w; returns (cells, end)."""
    cells = []
    cur = start
    for a in w:
        if a > 0:
            cells.append(VCell(cur.w, cur.pos, a))
            cur = vertical_target(cover, cur, a)
        else:
            down = vertical_source(cover, cur, -a)
            cells.append(VCell(down.w, down.pos, -a))
            cur = down
    return cells, cur


def wall_path(cover: Cover, a: KVertex, b: KVertex, order: str = "vertical_first"):
    """A concrete 1-skeleton path from a to b: one vertical climb and one
    horizontal geodesic, in either order."""
    d = concat(inv_word(a.w), b.w)
    if order == "vertical_first":
        vcells, mid = _vertical_climb(cover, a, d)
        hcells = [HCell(b.w, c) for c, _ in cover.geodesic(mid.pos, b.pos)]
        return vcells + hcells
    dcells, mid = _vertical_climb(cover, b, inv_word(d))
    hcells = [HCell(a.w, c) for c, _ in cover.geodesic(a.pos, mid.pos)]
    return hcells + list(reversed(dcells))


def side_of_wall(cover: Cover, wall, x: KVertex, order: str = "vertical_first",
                 check_window: bool = True) -> str:
    """Side of x for a diagonal wall: parity of the cuts crossed by a
    path from the right vertex of E."""
    base = wall.base()
    E = base.E
    anchor_pos = cover.tvertex(E.cell)
    anchor = act_vertex(cover, wall.offset(), KVertex(E.w, anchor_pos))
    path = wall_path(cover, anchor, x, order)
    crossings = 0
    for c in path:
        if check_window and not wall.in_window(cover, c):
            raise WallError(f"path leaves the verified window at {c}")
        if isinstance(c, HCell):
            crossings += wall.has_hcut(cover, c)
        else:
            crossings += wall.has_vcut(cover, c)
    return "right" if crossings % 2 == 0 else "left"


def side_both_orders(cover: Cover, wall, x: KVertex) -> str:
    s1 = side_of_wall(cover, wall, x, "vertical_first")
    s2 = side_of_wall(cover, wall, x, "horizontal_first")
    if s1 != s2:
        raise ParityError(f"cut parity differs between paths to {x}")
    return s1


# ---------------------------------------------------------------------------
# the even-cut check


def _squares_near_cuts(cover: Cover, wall: DiagonalWall, rho_v: int, rho_h: int):
    """Every fully realized square with at least one boundary cell in the
    cut set; all other squares have no cut on their boundary at all."""
    k = cover.rep.k
    seen = set()

    def fits(w):
        return len(w) <= rho_v

    def near(pos):
        return wall.window.dist(pos) <= rho_h

    for c in wall.hcuts:
        for j in range(1, k + 1):
            if fits(c.w) and fits(concat(c.w, (j,))):
                seen.add(Square(c.w, c.cell, j))
            down = concat(c.w, (-j,))
            if fits(down):
                for b in cover.bot(c.cell, j):
                    seen.add(Square(down, b, j))
    for c in wall.vcuts:
        if not (fits(c.w) and fits(concat(c.w, (c.j,)))):
            continue
        for cell, sign, _far in cover.neighbors(c.pos):
            seen.add(Square(c.w, cell, c.j))
    return {s for s in seen
            if fits(s.w) and fits(concat(s.w, (s.j,)))
            and near(cover.ivertex(s.bottom)) and near(cover.tvertex(s.bottom))}


def square_cut_profile(cover: Cover, wall, s: Square) -> dict:
    wj = concat(s.w, (s.j,))
    a, b = cover.endpoints(s.bottom)
    horiz = int(wall.has_hcut(cover, HCell(s.w, s.bottom)))
    top_hits = sum(wall.has_hcut(cover, HCell(wj, c)) for c, _ in square_top(cover, s))
    left = int(wall.has_vcut(cover, VCell(s.w, a, s.j)))
    right = int(wall.has_vcut(cover, VCell(s.w, b, s.j)))
    total = horiz + top_hits + left + right
    if total == 0:
        kind = "none"
    elif horiz + top_hits == 2 and left + right == 0:
        kind = "two-horizontal"
    elif horiz + top_hits == 1 and left + right == 1:
        kind = "one-horizontal-one-vertical"
    elif left + right == 2 and horiz + top_hits == 0:
        kind = "two-vertical"
    else:
        kind = "other"
    return {"total": total, "bottom": horiz, "top": top_hits,
            "left": left, "right": right, "kind": kind}


def check_even_cuts(cover: Cover, wall: DiagonalWall, rho_v: int, rho_h: int) -> dict:
    """Every square incident to a cut must carry exactly 0 or 2 of them;
    squares away from all cuts carry none by construction."""
    counts = defaultdict(int)
    violations = []
    squares = _squares_near_cuts(cover, wall, rho_v, rho_h)
    for s in sorted(squares):
        prof = square_cut_profile(cover, wall, s)
        counts[prof["kind"]] += 1
        if prof["total"] not in (0, 2):
            violations.append({"square": repr(s), **prof})
    return {
        "label": wall.label,
        "squares_checked": len(squares),
        "typology": dict(sorted(counts.items())),
        "violations": violations,
        "ok": not violations,
        "saturated": wall.saturated,
    }


def cuts_in_fiber(wall: DiagonalWall, w: Word) -> list:
    return sorted(c for c in wall.hcuts if c.w == w)

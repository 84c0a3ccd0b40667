"""Static input layer: filtered graphs, filtered maps, well-built trees.

A representative bundles a finite filtered graph, one filtered homotopy
equivalence per vertical generator, and a chosen well-built maximal
tree.  Everything downstream (covers, cylinders, walls) consumes the
precomputed tables built here: edge heights, generator labels, tree
paths, collapse words, image occurrence tables and the derived action
on F_n.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .words import SigmaSpec, AutomorphismError, Word, concat, inv_word, reduce_word

PathTok = tuple  # (edge_id, +1|-1)


@dataclass(frozen=True)
class Edge:
    id: str
    src: str
    dst: str


@dataclass
class FilteredGraph:
    """Finite graph whose edge list order is the filtration order.

    The i-th prefix of ``edges`` together with its endpoints is the i-th
    stage of the filtration; each stage adds exactly one 1-cell.
    """

    vertices: list
    edges: list  # list[Edge], lowest first

    def __post_init__(self):
        self.by_id = {e.id: e for e in self.edges}
        self.height = {e.id: i + 1 for i, e in enumerate(self.edges)}

    def rank(self) -> int:
        return len(self.edges) - len(self.vertices) + 1

    def valency(self, v: str) -> int:
        n = 0
        for e in self.edges:
            n += (e.src == v) + (e.dst == v)
        return n

    def endpoints(self, tok: PathTok) -> tuple:
        e = self.by_id[tok[0]]
        return (e.src, e.dst) if tok[1] > 0 else (e.dst, e.src)

    def is_connected(self, without: Optional[str] = None) -> bool:
        if not self.vertices:
            return True
        adj = defaultdict(list)
        for e in self.edges:
            if e.id == without:
                continue
            adj[e.src].append(e.dst)
            adj[e.dst].append(e.src)
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            for u in adj[stack.pop()]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == len(self.vertices)

    def separating_edges(self) -> list:
        """Edges whose removal disconnects the graph (kept endpoints)."""
        return [e.id for e in self.edges if not self.is_connected(without=e.id)]


def parse_path(s: str) -> tuple:
    """Parse "x3 X1" style edge paths; a capitalized first letter means
    the reversed edge."""
    toks = []
    for raw in s.split():
        if raw[0].isupper():
            toks.append((raw[0].lower() + raw[1:], -1))
        else:
            toks.append((raw, 1))
    return tuple(toks)


def format_path(path: Sequence[PathTok]) -> str:
    out = []
    for eid, sign in path:
        out.append(eid if sign > 0 else eid[0].upper() + eid[1:])
    return " ".join(out)


def inv_path(path: Sequence[PathTok]) -> tuple:
    return tuple((e, -s) for e, s in reversed(path))


def reduce_path(path: Sequence[PathTok]) -> tuple:
    out: list = []
    for tok in path:
        if out and out[-1][0] == tok[0] and out[-1][1] == -tok[1]:
            out.pop()
        else:
            out.append(tok)
    return tuple(out)


class ValidationReport:
    """Collects (clause, message) pairs; the rep passes when empty."""

    def __init__(self):
        self.violations: list = []

    def fail(self, clause: str, message: str) -> None:
        self.violations.append((clause, message))

    @property
    def passed(self) -> bool:
        return not self.violations

    def clauses(self) -> set:
        return {c for c, _ in self.violations}

    def to_json(self) -> dict:
        return {"passed": self.passed,
                "violations": [{"clause": c, "message": m} for c, m in self.violations]}

    def __repr__(self):
        return f"ValidationReport(passed={self.passed}, violations={self.violations})"


def well_built_tree(fg: FilteredGraph) -> tuple:
    """Greedy maximal tree along the filtration.

    Scanning edges from lowest to highest, an edge joining two distinct
    components goes into the tree and anything closing a loop becomes
    essential.  Every tree edge on the loop of an essential edge was
    placed earlier, hence lower, which is exactly the well-built shape.
    """
    parent = {v: v for v in fg.vertices}

    def find(v):
        parent.setdefault(v, v)
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    tree, essential = [], []
    for e in fg.edges:
        a, b = find(e.src), find(e.dst)
        if a == b:
            essential.append(e.id)
        else:
            parent[a] = b
            tree.append(e.id)
    return tree, essential


class BfhRep:
    """Filtered graph + filtered maps + well-built maximal tree.

    ``maps[j]`` sends each edge id to an edge-path (tuple of
    (edge_id, sign)); edges without an entry are fixed.  Essential edges
    are labelled x_1..x_n in filtration order.
    """

    def __init__(self, fgraph: FilteredGraph, maps: list, tree: Optional[list] = None,
                 basepoint: Optional[str] = None, sigma_inverses: Optional[dict] = None,
                 search_bound: int = 32):
        self.fgraph = fgraph
        self.k = len(maps)
        self.maps = [dict(m) for m in maps]
        for m in self.maps:
            for eid in fgraph.by_id:
                m.setdefault(eid, ((eid, 1),))
        if tree is None:
            tree, _ = well_built_tree(fgraph)
        self.tree = list(tree)
        self.essential = [e.id for e in fgraph.edges if e.id not in set(self.tree)]
        self.n = len(self.essential)
        self.basepoint = basepoint if basepoint is not None else self._default_basepoint()

        # x_i labels, filtration order
        self.label = {eid: 0 for eid in fgraph.by_id}
        self.essential_of = {}
        for i, eid in enumerate(self.essential, start=1):
            self.label[eid] = i
            self.essential_of[i] = eid

        self._tree_adj = defaultdict(list)
        for eid in self.tree:
            e = fgraph.by_id[eid]
            self._tree_adj[e.src].append((eid, 1, e.dst))
            self._tree_adj[e.dst].append((eid, -1, e.src))
        self._tree_paths = self._all_tree_paths()

        self.exceptional = set(fgraph.separating_edges())
        self.sigma_error: Optional[str] = None
        try:
            self.sigma = self._derive_sigma(sigma_inverses, search_bound)
            # collapse words of the mapped spanning paths, one per (j, vertex)
            self.spine = [{v: self.collapse(
                self.image_of_path(j, self.tree_path(self.basepoint, v)))
                for v in fgraph.vertices} for j in range(1, self.k + 1)]
        except (AutomorphismError, ValueError, KeyError) as exc:
            self.sigma = None
            self.spine = None
            self.sigma_error = f"{type(exc).__name__}: {exc}"
        # occurrence tables: occ[j-1][target_edge] -> [(host_edge, position, sign)]
        self.occ = []
        for j in range(1, self.k + 1):
            table = defaultdict(list)
            for host in fgraph.by_id:
                for pos, (eid, sign) in enumerate(self.map_image(j, host)):
                    table[eid].append((host, pos, sign))
            self.occ.append(table)

    # -- plumbing

    def _default_basepoint(self) -> str:
        if self.tree:
            return self.fgraph.by_id[self.tree[0]].src
        return self.fgraph.vertices[0]

    def _all_tree_paths(self) -> dict:
        paths = {}
        for root in self.fgraph.vertices:
            paths[root, root] = ()
            stack = [root]
            while stack:
                v = stack.pop()
                for eid, sign, u in self._tree_adj[v]:
                    if (root, u) not in paths:
                        paths[root, u] = paths[root, v] + ((eid, sign),)
                        stack.append(u)
        return paths

    def tree_path(self, u: str, v: str) -> tuple:
        return self._tree_paths[u, v]

    def map_image(self, j: int, eid: str, sign: int = 1) -> tuple:
        img = self.maps[j - 1][eid]
        return img if sign > 0 else inv_path(img)

    def image_of_path(self, j: int, path: Sequence[PathTok]) -> tuple:
        out = []
        for eid, sign in path:
            out.extend(self.map_image(j, eid, sign))
        return reduce_path(out)

    def collapse(self, path: Sequence[PathTok]) -> Word:
        """F_n label of an edge path (tree edges vanish)."""
        return reduce_word(sign * self.label[eid]
                           for eid, sign in path if self.label[eid])

    def generator_loop(self, i: int) -> tuple:
        """The loop at the basepoint spelling x_i through the tree."""
        eid = self.essential_of[i]
        e = self.fgraph.by_id[eid]
        return (self.tree_path(self.basepoint, e.src) + ((eid, 1),)
                + self.tree_path(e.dst, self.basepoint))

    def _derive_sigma(self, sigma_inverses, search_bound) -> SigmaSpec:
        images = []
        for j in range(1, self.k + 1):
            images.append([self.collapse(self.image_of_path(j, self.generator_loop(i)))
                           for i in range(1, self.n + 1)])
        inv = None
        if sigma_inverses:
            inv = [[sigma_inverses[j][i] for i in range(1, self.n + 1)]
                   for j in range(1, self.k + 1)]
        return SigmaSpec(n=self.n, k=self.k, images=images,
                         inverse_images=inv, search_bound=search_bound)

    def is_eoe(self, eid: str) -> bool:
        return bool(self.label[eid]) or eid in self.exceptional

    def eoe_edges(self) -> list:
        return [e.id for e in self.fgraph.edges if self.is_eoe(e.id)]

    # -- the queried quantities

    def occurrences(self, j: int, eid: str) -> list:
        return self.occ[j - 1].get(eid, [])

    def is_i_topmost(self, eid: str, j: int) -> bool:
        hits = self.occurrences(j, eid)
        return len(hits) == 1 and hits[0][0] == eid

    def is_topmost(self, eid: str) -> bool:
        return all(self.is_i_topmost(eid, j) for j in range(1, self.k + 1))

    def tied_index_candidates(self, eid: str) -> set:
        return {j for j in range(1, self.k + 1) if not self.is_i_topmost(eid, j)}

    def multiplicity_constant(self) -> int:
        """Longest run of one repeated letter in the generator images."""
        m = 1
        for j in range(1, self.k + 1):
            for i in range(1, self.n + 1):
                w = self.sigma.images[j - 1][i - 1]
                run = 0
                for p, a in enumerate(w):
                    run = run + 1 if p and w[p - 1] == a else 1
                    m = max(m, run)
        return m

    def eoe_count(self) -> int:
        return len(self.eoe_edges())

    def to_json(self) -> dict:
        return {
            "vertices": list(self.fgraph.vertices),
            "edges": [[e.id, e.src, e.dst] for e in self.fgraph.edges],
            "tree": list(self.tree),
            "essential": list(self.essential),
            "exceptional": sorted(self.exceptional),
            "labels": {eid: lab for eid, lab in self.label.items() if lab},
            "maps": [{eid: format_path(m[eid]) for eid in sorted(m)} for m in self.maps],
            "sigma": None if self.sigma is None else
                     [[" ".join(map(str, w)) for w in tab] for tab in self.sigma.images],
            "basepoint": self.basepoint,
        }


def topmost(rep: BfhRep, eid: str, i: int) -> bool:
    return rep.is_i_topmost(eid, i)


def topmost_all(rep: BfhRep, eid: str) -> bool:
    return rep.is_topmost(eid)


def multiplicity_constant(rep: BfhRep) -> int:
    return rep.multiplicity_constant()


def eoe_count(rep: BfhRep) -> int:
    return rep.eoe_count()


def validate_rep(rep: BfhRep) -> ValidationReport:
    """Check every structural clause; reports all failures, never aborts."""
    report = ValidationReport()
    fg = rep.fgraph

    ids = [e.id for e in fg.edges]
    if len(set(ids)) != len(ids):
        report.fail("graph/filtration", "duplicate edge id in the filtration order")
    for e in fg.edges:
        if e.src not in fg.vertices or e.dst not in fg.vertices:
            report.fail("graph/filtration", f"edge {e.id} has unknown endpoints")

    if not fg.is_connected():
        report.fail("graph/connected", "graph is not connected")
    for v in fg.vertices:
        if fg.valency(v) == 2:
            report.fail("graph/valency2", f"vertex {v} has valency 2")

    tree_set = set(rep.tree)
    if len(tree_set) != len(rep.tree):
        report.fail("tree/spanning-tree", "duplicate tree edge")
    unknown = tree_set - set(fg.by_id)
    if unknown:
        report.fail("tree/spanning-tree", f"unknown tree edges {sorted(unknown)}")
    else:
        touched = set()
        parent = {v: v for v in fg.vertices}

        def find(v):
            parent.setdefault(v, v)
            while parent[v] != v:
                v = parent[v]
            return v

        cyclic = False
        for eid in rep.tree:
            e = fg.by_id[eid]
            touched.update((e.src, e.dst))
            a, b = find(e.src), find(e.dst)
            if a == b:
                cyclic = True
            else:
                parent[a] = b
        if cyclic:
            report.fail("tree/spanning-tree", "tree edges contain a loop")
        if len(rep.tree) != max(len(fg.vertices) - 1, 0) or \
                (fg.vertices and len({find(v) for v in fg.vertices}) != 1):
            report.fail("tree/spanning-tree", "tree does not span the vertices")
    if set(rep.essential) != set(fg.by_id) - tree_set:
        report.fail("tree/essential-complement", "essential edges are not the tree complement")
    if rep.n != fg.rank():
        report.fail("rep/essential-rank",
                    f"{rep.n} essential edges but graph rank {fg.rank()}")

    for j in range(1, rep.k + 1):
        for e in fg.edges:
            img = rep.maps[j - 1].get(e.id)
            label = f"f_{j}({e.id})"
            bad_ids = [eid for eid, _ in img if eid not in fg.by_id]
            if bad_ids:
                report.fail("map/edge-path", f"{label} uses unknown edges {bad_ids}")
                continue
            cur = e.src
            ok = True
            for tok in img:
                a, b = fg.endpoints(tok)
                if a != cur:
                    ok = False
                    break
                cur = b
            if not ok or cur != e.dst:
                report.fail("map/edge-path", f"{label} is not an edge path from "
                                             f"{e.src} to {e.dst}")
                continue
            if reduce_path(img) != img:
                report.fail("map/reduced", f"{label} backtracks")
                continue
            h = fg.height[e.id]
            spots = [p for p, (eid, sign) in enumerate(img) if eid == e.id]
            if len(spots) != 1 or img[spots[0]][1] != 1:
                report.fail("map/filtered",
                            f"{label} must cross {e.id} exactly once, positively")
                continue
            p = spots[0]
            pre, suf = img[:p], img[p + 1:]
            for part, where in ((pre, "prefix"), (suf, "suffix")):
                high = [eid for eid, _ in part if fg.height[eid] >= h]
                if high:
                    report.fail("map/filtered",
                                f"{label} {where} uses edges {high} not below {e.id}")

    if not report.clauses() & {"tree/spanning-tree", "graph/filtration"}:
        for eid in rep.essential:
            e = fg.by_id[eid]
            loop_heights = [fg.height[t] for t, _ in rep.tree_path(e.dst, e.src)]
            if any(h >= fg.height[eid] for h in loop_heights):
                report.fail("rep/well-built",
                            f"essential edge {eid} is not above its tree loop")

    if rep.sigma is None:
        report.fail("sigma/automorphism", rep.sigma_error or "no derived action")
    return report


# ---------------------------------------------------------------------------
# TOML input


def load_rep_dict(data: dict) -> BfhRep:
    g = data["graph"]
    vertices = list(g["vertices"])
    edges = [Edge(*spec) for spec in g["edges"]]
    fgraph = FilteredGraph(vertices, edges)
    maps_data = data.get("maps", {})
    k = len(maps_data)
    maps = []
    for j in range(1, k + 1):
        name = f"t{j}"
        if name not in maps_data:
            raise KeyError(f"missing [maps.{name}] (maps must be t1..t{k})")
        maps.append({eid: parse_path(s) for eid, s in maps_data[name].items()})
    tree = data.get("tree", {}).get("edges")
    basepoint = data.get("graph", {}).get("basepoint")

    sigma_inverses = None
    inv_data = data.get("sigma", {}).get("inverse")
    if inv_data:
        n = fgraph.rank()
        sigma_inverses = {}
        for j in range(1, k + 1):
            tab = inv_data.get(f"t{j}", {})
            sigma_inverses[j] = {i: (i,) for i in range(1, n + 1)}
            for key, s in tab.items():
                sigma_inverses[j][int(key[1:])] = reduce_word(
                    (1 if tok[0].islower() else -1) * int(tok[1:]) for tok in s.split())
    return BfhRep(fgraph, maps, tree=tree, basepoint=basepoint,
                  sigma_inverses=sigma_inverses)


def load_rep(path) -> BfhRep:
    try:
        import tomllib
    except ModuleNotFoundError:  # python < 3.11
        import tomli as tomllib
    with open(path, "rb") as fh:
        return load_rep_dict(tomllib.load(fh))


def dump_rep_json(rep: BfhRep) -> str:
    return json.dumps(rep.to_json(), indent=2, sort_keys=True)

"""Shared builders: small graphs, mutated inputs, reference oracles."""

import itertools

from suspwalls.rep import BfhRep, Edge, FilteredGraph, parse_path


def rose(n, maps, order=None):
    names = order or [f"x{i}" for i in range(1, n + 1)]
    fg = FilteredGraph(["v0"], [Edge(e, "v0", "v0") for e in names])
    return BfhRep(fg, [{e: parse_path(p) for e, p in m.items()} for m in maps])


def identity_rose(n, k):
    return rose(n, [{} for _ in range(k)])


def theta_graph(maps=None, tree=None):
    fg = FilteredGraph(["p", "q"], [Edge("a", "p", "q"), Edge("b", "p", "q"),
                                    Edge("c", "p", "q")])
    maps = maps if maps is not None else [{}]
    return BfhRep(fg, [{e: parse_path(p) for e, p in m.items()} for m in maps], tree=tree)


def barbell(maps=None):
    fg = FilteredGraph(["u", "w"], [Edge("a", "u", "u"), Edge("b", "u", "w"),
                                    Edge("c", "w", "w")])
    maps = maps if maps is not None else [{}]
    return BfhRep(fg, [{e: parse_path(p) for e, p in m.items()} for m in maps])


def fp_maps(overrides=None):
    maps = [{"x1": "x1", "x2": "x2", "x3": "x3 x1"},
            {"x1": "x1", "x2": "x2", "x3": "x3 x2"}]
    for (j, eid), path in (overrides or {}).items():
        maps[j - 1][eid] = path
    return maps


def f4_maps(overrides=None):
    maps = [{"x1": "x1", "x2": "x2", "x3": "x3 x1", "x4": "x4 x1"},
            {"x1": "x1", "x2": "x2", "x3": "x3 x2 x1", "x4": "x4 x3 x2 x1"}]
    for (j, eid), path in (overrides or {}).items():
        maps[j - 1][eid] = path
    return maps


def _subdivided_fp():
    fg = FilteredGraph(["v0", "w"],
                       [Edge("x1", "v0", "v0"), Edge("x2", "v0", "v0"),
                        Edge("x3a", "v0", "w"), Edge("x3b", "w", "v0")])
    return BfhRep(fg, [{}])


def _floating_vertex_fp():
    fg = FilteredGraph(["v0", "z"], [Edge("x1", "v0", "v0"), Edge("x2", "v0", "v0"),
                                     Edge("x3", "v0", "v0")])
    return BfhRep(fg, [{}])


def _duplicate_filtration():
    fg = FilteredGraph(["v0"], [Edge("x1", "v0", "v0"), Edge("x1", "v0", "v0"),
                                Edge("x2", "v0", "v0")])
    return BfhRep(fg, [{}])


def _bad_endpoint_edge():
    fg = FilteredGraph(["p", "q"], [Edge("a", "p", "q"), Edge("b", "p", "q"),
                                    Edge("c", "p", "q"), Edge("d", "p", "zz")])
    return BfhRep(fg, [{}])


# (name, builder, clause expected in the validation report); every entry
# breaks exactly one structural requirement.
MUTATIONS = [
    ("valency-2 vertex", _subdivided_fp, "graph/valency2"),
    ("disconnected graph", _floating_vertex_fp, "graph/connected"),
    ("duplicate edge in filtration", _duplicate_filtration, "graph/filtration"),
    ("edge with unknown endpoint", _bad_endpoint_edge, "graph/filtration"),
    ("image uses unknown edge",
     lambda: rose(3, fp_maps({(1, "x3"): "x3 x9"})), "map/edge-path"),
    ("image backtracks",
     lambda: rose(3, fp_maps({(1, "x3"): "x3 x1 X1 x1"})), "map/reduced"),
    ("image misses its own edge",
     lambda: rose(3, fp_maps({(1, "x3"): "x1"})), "map/filtered"),
    ("image crosses its edge twice",
     lambda: rose(3, fp_maps({(1, "x3"): "x3 x3"})), "map/filtered"),
    ("image crosses its edge backwards",
     lambda: rose(3, fp_maps({(1, "x3"): "X3"})), "map/filtered"),
    ("prefix uses a higher edge",
     lambda: rose(3, fp_maps({(1, "x2"): "x3 x2 X3"})), "map/filtered"),
    ("suffix uses a same-height edge",
     lambda: rose(3, fp_maps({(1, "x2"): "x2 x3"})), "map/filtered"),
    ("suffix uses a higher edge (rank 4)",
     lambda: rose(4, f4_maps({(2, "x3"): "x3 x2 x4"})), "map/filtered"),
    ("image backtracks (rank 4)",
     lambda: rose(4, f4_maps({(2, "x4"): "x4 x3 X3 x3 x2 x1"})), "map/reduced"),
    ("image misses its own edge (rank 4)",
     lambda: rose(4, f4_maps({(1, "x4"): "x1"})), "map/filtered"),
    ("loop edge declared in the tree", lambda: _tree_with_loop(),
     "tree/spanning-tree"),
    ("tree with too many edges", lambda: theta_graph(tree=["a", "b"]),
     "tree/spanning-tree"),
    ("empty tree on a two-vertex graph", lambda: theta_graph(tree=[]),
     "rep/essential-rank"),
    ("tree breaking the height order", lambda: theta_graph(tree=["b"]),
     "rep/well-built"),
    ("theta image missing its own edge",
     lambda: theta_graph(maps=[{"b": "a"}]), "map/filtered"),
    ("theta image with mismatched corners",
     lambda: theta_graph(maps=[{"b": "b a"}]), "map/edge-path"),
]


def _tree_with_loop():
    fg = FilteredGraph(["v0"], [Edge("x1", "v0", "v0"), Edge("x2", "v0", "v0"),
                                Edge("x3", "v0", "v0")])
    return BfhRep(fg, [{}], tree=["x1"])


def spanning_trees(fg):
    """All spanning trees of a FilteredGraph, as edge-id sets."""
    nv = len(fg.vertices)
    for combo in itertools.combinations([e.id for e in fg.edges], max(nv - 1, 0)):
        parent = {v: v for v in fg.vertices}

        def find(v):
            while parent[v] != v:
                v = parent[v]
            return v

        ok = True
        for eid in combo:
            e = fg.by_id[eid]
            a, b = find(e.src), find(e.dst)
            if a == b:
                ok = False
                break
            parent[a] = b
        if ok and len({find(v) for v in fg.vertices}) <= 1:
            yield set(combo)


def well_built_by_definition(fg, tree):
    """Literal check of the well-built condition for a candidate tree."""
    probe = BfhRep(fg, [{}], tree=sorted(tree, key=lambda e: fg.height[e]))
    for eid in probe.essential:
        e = fg.by_id[eid]
        path = probe.tree_path(e.dst, e.src)
        if any(fg.height[t] >= fg.height[eid] for t, _ in path):
            return False
    return True

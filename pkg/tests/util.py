"""Shared builders for the test corpus.

The corpus is eleven small graphs (at most 5 vertices, no sources, no
sinks) chosen to cover the structural cases the theory distinguishes:
single-vertex multi-loop, non-transitive loop chains, plain cycles of
several lengths, cycles with parallel edges, and a transitive non-cycle.
"""

from wck.graphs import Edge, Graph


def mkgraph(vertices, edges):
    return Graph(vertices, [Edge(*e) for e in edges])


def cycle_graph(k):
    vs = ["v%d" % (i + 1) for i in range(k)]
    es = [("e%d" % (i + 1), vs[i], vs[(i + 1) % k]) for i in range(k)]
    return mkgraph(vs, es)


def corpus_graphs():
    graphs = {}
    graphs["O2"] = mkgraph(["v"], [("e", "v", "v"), ("f", "v", "v")])
    graphs["G2"] = mkgraph(
        ["v1", "v2"],
        [("l1", "v1", "v1"), ("l2", "v2", "v2"), ("a", "v1", "v2")],
    )
    graphs["C2"] = cycle_graph(2)
    graphs["C3"] = cycle_graph(3)
    graphs["C4"] = cycle_graph(4)
    graphs["C5"] = cycle_graph(5)
    graphs["P2"] = mkgraph(
        ["v1", "v2"],
        [("c", "v1", "v2"), ("d", "v2", "v1"), ("d2", "v2", "v1")],
    )
    graphs["theta"] = mkgraph(
        ["v1", "v2"],
        [("a", "v1", "v2"), ("b", "v1", "v2"), ("c", "v2", "v1"), ("d", "v2", "v1")],
    )
    graphs["C3chord"] = mkgraph(
        ["v1", "v2", "v3"],
        [
            ("e1", "v1", "v2"),
            ("e2", "v2", "v3"),
            ("e3", "v3", "v1"),
            ("f", "v1", "v2"),
        ],
    )
    graphs["G3"] = mkgraph(
        ["v1", "v2", "v3"],
        [
            ("l1", "v1", "v1"),
            ("l2", "v2", "v2"),
            ("l3", "v3", "v3"),
            ("a", "v1", "v2"),
            ("b", "v2", "v3"),
        ],
    )
    graphs["chain13"] = mkgraph(
        ["v1", "v2", "v3"],
        [
            ("l1", "v1", "v1"),
            ("a", "v1", "v2"),
            ("b", "v2", "v3"),
            ("l3", "v3", "v3"),
        ],
    )
    return graphs


def cycle_weight_doc(t, p=2, N=0):
    """Weights document for a cycle: edge e_i carries value t[i-1] at level 1."""
    level1 = {"e%d" % (i + 1): float(t[i]) for i in range(len(t))}
    levels = {str(k): (level1 if k == 1 else {}) for k in range(1, N + p)}
    return {"kind": "diagonal", "p": p, "N": N, "levels": levels}


def cycle_weight_spec(g, t, p=2, N=0):
    from wck import weights

    return weights.from_dict(cycle_weight_doc(t, p=p, N=N), g)


def random_diag_spec(g, p, N, rng):
    from wck.weights import WeightSpec

    seeds = {k: rng.uniform(0.5, 2.0, g.level_dim(k)) for k in range(1, N + p)}
    return WeightSpec(g, "diagonal", p, N, seeds)

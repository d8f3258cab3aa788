"""Finite directed multigraphs and their path combinatorics.

Conventions. An edge e has a source vertex s(e) (where the walk leaves
from, "src" in the JSON schema) and a range vertex r(e) (where it
arrives, "dst"). A path of length k is stored in operator order: a tuple
(e_1, ..., e_k) with s(e_j) = r(e_{j+1}). The walk therefore starts at
s(e_k) and ends at r(e_1); the human-readable serialization writes edge
names in walk order, so the loader reverses. Length-0 paths are
vertices.

Composition a*b is defined when r(b) = s(a) and concatenates the edge
tuples, so paths multiply the way the shift operators they index do.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import GraphError


@dataclass(frozen=True)
class Edge:
    name: str
    src: str
    dst: str


@dataclass(frozen=True)
class Path:
    """A path in operator order; `source` is the vertex index of s(alpha).

    `edges` holds edge indices into the owning graph's edge list. The
    source vertex is stored explicitly so that length-0 paths (vertices)
    are representable.
    """

    edges: tuple
    source: int

    def __len__(self):
        return len(self.edges)


@dataclass(frozen=True)
class ShapeReport:
    no_sources: bool
    no_sinks: bool
    transitive: bool
    is_cycle: bool
    is_cycle_with_entry: bool
    out_degree_all_one: bool

    def as_dict(self):
        return {
            "no_sources": self.no_sources,
            "no_sinks": self.no_sinks,
            "transitive": self.transitive,
            "is_cycle": self.is_cycle,
            "is_cycle_with_entry": self.is_cycle_with_entry,
            "out_degree_all_one": self.out_degree_all_one,
        }


class Graph:
    """Immutable finite directed multigraph with cached path tables."""

    def __init__(self, vertices, edges):
        if not vertices:
            raise GraphError("graph needs at least one vertex")
        self.vertices = list(vertices)
        self.edges = [Edge(e.name, e.src, e.dst) for e in edges]
        self.vindex = {}
        for i, v in enumerate(self.vertices):
            if v in self.vindex:
                raise GraphError("duplicate vertex id %r" % v)
            self.vindex[v] = i
        self.eindex = {}
        for i, e in enumerate(self.edges):
            if e.name in self.eindex:
                raise GraphError("duplicate edge id %r" % e.name)
            self.eindex[e.name] = i
        for e in self.edges:
            if e.src not in self.vindex or e.dst not in self.vindex:
                raise GraphError(
                    "edge %r has a dangling endpoint (%s -> %s)"
                    % (e.name, e.src, e.dst)
                )
        self.esrc = [self.vindex[e.src] for e in self.edges]
        self.edst = [self.vindex[e.dst] for e in self.edges]
        self.out_edges = [[] for _ in self.vertices]
        self.in_edges = [[] for _ in self.vertices]
        for i in range(len(self.edges)):
            self.out_edges[self.esrc[i]].append(i)
            self.in_edges[self.edst[i]].append(i)
        self._paths = {}
        self._pidx = {}
        self._shape = None

    # -- basic queries ---------------------------------------------------

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_edges(self):
        return len(self.edges)

    def source_of(self, path):
        return path.source

    def range_of(self, path):
        if path.edges:
            return self.edst[path.edges[0]]
        return path.source

    def edge_path(self, name):
        """The length-1 path consisting of the named edge."""
        ei = self.eindex.get(name)
        if ei is None:
            raise GraphError("unknown edge %r" % name)
        return Path((ei,), self.esrc[ei])

    def vertex_path(self, name):
        vi = self.vindex.get(name)
        if vi is None:
            raise GraphError("unknown vertex %r" % name)
        return Path((), vi)

    def compose(self, a, b):
        """The path a*b, defined when r(b) = s(a)."""
        if self.range_of(b) != self.source_of(a):
            raise GraphError("composition undefined: r(b) != s(a)")
        return Path(a.edges + b.edges, b.source)

    def adjacency(self):
        """A[i][j] = number of edges with s(e) = v_j and r(e) = v_i."""
        a = np.zeros((self.n_vertices, self.n_vertices), dtype=np.int64)
        for ei in range(self.n_edges):
            a[self.edst[ei], self.esrc[ei]] += 1
        return a

    # -- path tables -----------------------------------------------------

    def paths(self, k):
        """All length-k paths in canonical order.

        Canonical order is lexicographic in the operator-order edge index
        sequence; k = 0 returns the vertices in input order.
        """
        if k < 0:
            raise GraphError("path length must be nonnegative")
        got = self._paths.get(k)
        if got is not None:
            return got
        if k == 0:
            ps = [Path((), v) for v in range(self.n_vertices)]
        else:
            prev = self.paths(k - 1)
            by_range = [[] for _ in self.vertices]
            for b in prev:
                by_range[self.range_of(b)].append(b)
            ps = []
            for ei in range(self.n_edges):
                for b in by_range[self.esrc[ei]]:
                    ps.append(Path((ei,) + b.edges, b.source))
        self._paths[k] = ps
        self._pidx[k] = {p.edges: i for i, p in enumerate(ps)}
        return ps

    def path_index(self, path):
        """Position of `path` inside paths(len(path))."""
        k = len(path)
        self.paths(k)
        idx = self._pidx[k].get(path.edges)
        if idx is None or (k == 0 and path.source >= self.n_vertices):
            raise GraphError("path not in graph")
        if k == 0:
            return path.source
        return idx

    def level_dim(self, k):
        return len(self.paths(k))

    def xi(self, v, q, choice="min"):
        """Deterministic length-q path starting at vertex index v.

        choice="min" picks the lexicographically smallest such path,
        choice="max" the largest (used by robustness tests).
        """
        if choice not in ("min", "max"):
            raise GraphError("xi choice must be 'min' or 'max'")
        candidates = [p for p in self.paths(q) if p.source == v]
        if not candidates:
            raise GraphError(
                "no length-%d path starts at %r (sink encountered)"
                % (q, self.vertices[v])
            )
        return candidates[0] if choice == "min" else candidates[-1]

    # -- serialization ---------------------------------------------------

    def path_str(self, path):
        """Human serialization: edge names joined by '.' in walk order."""
        if not path.edges:
            return self.vertices[path.source]
        return ".".join(self.edges[ei].name for ei in reversed(path.edges))

    def parse_path(self, text):
        """Inverse of path_str for length >= 1 paths; bare vertex ids too."""
        if text in self.vindex:
            return Path((), self.vindex[text])
        names = text.split(".")
        idxs = []
        for name in names:
            ei = self.eindex.get(name)
            if ei is None:
                raise GraphError("unknown path %r (no edge %r)" % (text, name))
            idxs.append(ei)
        edges = tuple(reversed(idxs))
        for j in range(len(edges) - 1):
            if self.esrc[edges[j]] != self.edst[edges[j + 1]]:
                raise GraphError("edges in %r do not concatenate" % text)
        return Path(edges, self.esrc[edges[-1]])

    def to_dict(self):
        return {
            "vertices": list(self.vertices),
            "edges": [
                {"name": e.name, "src": e.src, "dst": e.dst} for e in self.edges
            ],
        }

    @classmethod
    def from_dict(cls, doc):
        if not isinstance(doc, dict):
            raise GraphError("graph document must be a JSON object")
        try:
            vertices = doc["vertices"]
            edge_docs = doc["edges"]
        except KeyError as exc:
            raise GraphError("graph document missing key %s" % exc) from exc
        if not isinstance(vertices, list) or not all(
            isinstance(v, str) for v in vertices
        ):
            raise GraphError("'vertices' must be a list of strings")
        edges = []
        for ed in edge_docs:
            try:
                edges.append(Edge(ed["name"], ed["src"], ed["dst"]))
            except (TypeError, KeyError) as exc:
                raise GraphError("malformed edge entry %r" % (ed,)) from exc
        return cls(vertices, edges)

    # -- shape predicates --------------------------------------------------

    def validate(self):
        """Structural predicates the main theorems condition on."""
        if self._shape is not None:
            return self._shape
        n = self.n_vertices
        indeg = [len(self.in_edges[v]) for v in range(n)]
        outdeg = [len(self.out_edges[v]) for v in range(n)]
        no_sources = all(d > 0 for d in indeg)
        no_sinks = all(d > 0 for d in outdeg)
        reach = self._reachable()
        transitive = all(
            reach[u][w] for u in range(n) for w in range(n) if u != w
        )
        out_one = all(d == 1 for d in outdeg)
        connected = self._weakly_connected()
        is_cycle = out_one and connected and all(d == 1 for d in indeg)
        entry_profile = (
            sorted(indeg) == [0] + [1] * (n - 2) + [2] if n >= 2 else False
        )
        is_cycle_with_entry = out_one and connected and (
            all(d == 1 for d in indeg) or entry_profile
        )
        self._shape = ShapeReport(
            no_sources=no_sources,
            no_sinks=no_sinks,
            transitive=transitive,
            is_cycle=is_cycle,
            is_cycle_with_entry=is_cycle_with_entry,
            out_degree_all_one=out_one,
        )
        return self._shape

    def _reachable(self):
        """reach[u][w]: a path of length >= 1 from u to w exists."""
        n = self.n_vertices
        step = [[False] * n for _ in range(n)]
        for ei in range(self.n_edges):
            step[self.esrc[ei]][self.edst[ei]] = True
        reach = [row[:] for row in step]
        for _ in range(n):
            new = [
                [
                    reach[u][w] or any(reach[u][m] and step[m][w] for m in range(n))
                    for w in range(n)
                ]
                for u in range(n)
            ]
            if new == reach:
                break
            reach = new
        return reach

    def _weakly_connected(self):
        n = self.n_vertices
        seen = {0}
        frontier = [0]
        nbrs = [set() for _ in range(n)]
        for ei in range(self.n_edges):
            nbrs[self.esrc[ei]].add(self.edst[ei])
            nbrs[self.edst[ei]].add(self.esrc[ei])
        while frontier:
            v = frontier.pop()
            for w in nbrs[v]:
                if w not in seen:
                    seen.add(w)
                    frontier.append(w)
        return len(seen) == n


def load_graph(text):
    """Parse a JSON graph document into a Graph."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError("graph document is not valid JSON: %s" % exc) from exc
    return Graph.from_dict(doc)

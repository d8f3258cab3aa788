"""Finite-dimensional core tower of a weighted shift algebra.

The gauge-invariant core of the algebra attached to a graph with an
eventually periodic weight sequence is an increasing union of
finite-dimensional algebras. Stage n is isomorphic to a direct sum over
vertices v of matrix algebras over the corner algebra at v,

    A_n  =  (+)_v  M_{m_v(n)} (C_v),

where m_v(n) counts the paths of length n*p + q starting at v and C_v
is the compression of the stage-zero algebra by a fixed path prefix of
length q = p - 1 out of v. All of this is computed concretely on a
window of levels of the path space:

  - C_0 is generated by the degree-zero words of path length below p
    together with the conjugated diagonal weight operators, and closed
    up with findim.star_closure;
  - corners are plain submatrix compressions onto slots indexed by the
    paths that end at v;
  - the connecting maps between stages are assembled from one fiber map
    per length-p path mu, which acts on corner elements purely by index
    gymnastics (conjugation by a shift of the slot basis), so the
    Bratteli diagram of the tower is stationary.

Every numerical identification (coordinates of an element in a corner,
fiber images landing in the right corner, multiplicity integrality,
dimension bookkeeping between consecutive stages) is certified and
raises instead of returning silently wrong structure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    GraphError,
    MultiplicityError,
    WindowUnstableError,
)
from .findim import (
    StarAlgebra,
    blocks_vec,
    central_decomposition,
    star_closure,
)
from .windows import onb

COORD_TOL = 1e-8


@dataclass(frozen=True)
class TowerConfig:
    """Build parameters for the core tower.

    M is the first level of the top evaluation window and W its width;
    both default to values sized for graphs of polynomial path growth.
    Graphs whose level dimensions explode need an explicit, smaller
    window (the guard raises otherwise). xi_choice selects the fixed
    path prefixes used for the corners.
    """

    n_max: int = 2
    xi_choice: str = "min"
    M: int | None = None
    W: int | None = None
    max_level_dim: int = 600
    tol: float = COORD_TOL
    seed: int = 0


class Corner:
    """Corner algebra at a vertex, realized on slot matrices.

    A slot at global level l is the family of paths of length l - q
    that end at the vertex; the corner of C_0 acts on it as a plain
    submatrix. Elements are identified by coordinates with respect to
    the orthonormalized basis, and products are tabulated once into a
    structure-constant tensor so later stage arithmetic never touches
    matrices again.
    """

    def __init__(self, vertex, xi, levels, slot_lists, algebra, tol):
        self.vertex = vertex
        self.xi = xi
        self.levels = levels
        self.slot_lists = slot_lists        # per level: list of Path
        self.slot_pos = [
            {pth.edges: i for i, pth in enumerate(lst)} for lst in slot_lists
        ]
        self.algebra = algebra
        self.tol = tol
        self.r = algebra.dim
        self._restricted = {}
        self._tabulate()
        self.dec = None                      # filled by build_tower

    def _tabulate(self):
        r = self.r
        basis = self.algebra.basis
        mat = self.algebra.onb
        self.unit_coords = mat.conj() @ blocks_vec(self.algebra.unit)
        self.T = np.zeros((r, r, r), dtype=np.complex128)
        self.S = np.zeros((r, r), dtype=np.complex128)
        for i in range(r):
            adj = [blk.conj().T for blk in basis[i]]
            vec = blocks_vec(adj)
            coords = mat.conj() @ vec
            resid = np.linalg.norm(mat.T @ coords - vec)
            if resid > 1e-7:
                raise WindowUnstableError(
                    "corner basis is not closed under adjoints"
                )
            self.S[i] = coords
            for j in range(r):
                prod = [a @ b for a, b in zip(basis[i], basis[j])]
                vec = blocks_vec(prod)
                coords = mat.conj() @ vec
                resid = np.linalg.norm(mat.T @ coords - vec)
                if resid > 1e-7:
                    raise WindowUnstableError(
                        "corner basis is not closed under products"
                    )
                self.T[i, j] = coords

    def element(self, coords):
        out = [np.zeros_like(blk) for blk in self.algebra.basis[0]]
        for c, b in zip(coords, self.algebra.basis):
            for lev, blk in enumerate(b):
                out[lev] = out[lev] + c * blk
        return out

    def coords(self, blocks):
        return self.algebra.onb.conj() @ blocks_vec(blocks)

    def mul_coords(self, x, y):
        return np.einsum("i,j,ijk->k", x, y, self.T)

    def adjoint_coords(self, x):
        return np.einsum("j,jk->k", np.conj(x), self.S)

    def restricted(self, lo, hi):
        """Basis matrix over a sub-range of levels, rank certified."""
        key = (lo, hi)
        got = self._restricted.get(key)
        if got is not None:
            return got
        i0 = lo - self.levels[0]
        i1 = hi - self.levels[0]
        rows = []
        for b in self.algebra.basis:
            rows.append(
                np.concatenate([blk.ravel() for blk in b[i0:i1]])
                if i1 > i0
                else np.zeros(0, dtype=np.complex128)
            )
        mat = np.array(rows)
        if self.r:
            sv = np.linalg.svd(mat, compute_uv=False)
            if sv.size < self.r or sv[-1] <= 1e-8 * max(1.0, sv[0]):
                raise WindowUnstableError(
                    "corner at %r is not faithful on levels [%d, %d); "
                    "widen the window" % (self.vertex, lo, hi)
                )
        pinv = np.linalg.pinv(mat.T)
        self._restricted[key] = (mat, pinv)
        return mat, pinv

    def coords_from_partial(self, lo, hi, slot_blocks):
        """Coordinates from slot data on a sub-range, with residual."""
        mat, pinv = self.restricted(lo, hi)
        vec = (
            np.concatenate([blk.ravel() for blk in slot_blocks])
            if slot_blocks
            else np.zeros(0, dtype=np.complex128)
        )
        coords = pinv @ vec
        resid = float(np.linalg.norm(mat.T @ coords - vec))
        return coords, resid


@dataclass
class StageData:
    n: int
    paths: dict          # vertex index -> list of Path (source = vertex)
    counts: dict         # vertex index -> path count m_v(n)
    summand_sizes: list  # aligned with tower.labels
    dim: int


class Tower:
    def __init__(self, graph, weights, config):
        self.graph = graph
        self.weights = weights
        self.config = config

    # -- structural stage elements ----------------------------------------

    def stage_zero(self, n):
        return {
            v: np.zeros(
                (m, m, self.corners[v].r), dtype=np.complex128
            )
            for v, m in self.stages[n].counts.items()
        }

    def stage_unit(self, n):
        x = self.stage_zero(n)
        for v, blk in x.items():
            for a in range(blk.shape[0]):
                blk[a, a] = self.corners[v].unit_coords
        return x

    def stage_random(self, n, rng):
        x = self.stage_zero(n)
        for blk in x.values():
            blk[...] = rng.normal(size=blk.shape) + 1j * rng.normal(
                size=blk.shape
            )
        return x

    def stage_mul(self, n, x, y):
        out = self.stage_zero(n)
        for v, blk in out.items():
            blk[...] = np.einsum(
                "abi,bcj,ijk->ack", x[v], y[v], self.corners[v].T
            )
        return out

    def stage_adjoint(self, n, x):
        out = self.stage_zero(n)
        for v, blk in out.items():
            blk[...] = np.einsum(
                "baj,jk->abk", np.conj(x[v]), self.corners[v].S
            )
        return out

    def stage_vec(self, n, x):
        return np.concatenate(
            [x[v].ravel() for v in sorted(x)]
        ) if x else np.zeros(0)

    # -- between stages ----------------------------------------------------

    def psi(self, n, x):
        """Connecting *-homomorphism from stage n into stage n + 1.

        A stage-(n + 1) index path factors uniquely into a length-p tail
        followed by a stage-n index path, so each summand of the image
        is assembled from one fiber map per length-p path.
        """
        if n + 1 > self.config.n_max:
            raise DomainError("stage %d exceeds the built tower" % (n + 1))
        out = self.stage_zero(n + 1)
        g = self.graph
        for mi, mu in enumerate(g.paths(self.p)):
            v = g.source_of(mu)
            w = g.range_of(mu)
            rows = self._hi_pos[(n + 1, mi)]
            lifted = np.einsum("abj,ij->abi", x[w], self.fibers[mi])
            out[v][np.ix_(rows, rows)] += lifted
        return out

    def tau_inverse(self, n, x):
        """Concrete window blocks of a structural stage element."""
        g = self.graph
        length = n * self.p + self.q
        blocks = [
            np.zeros((g.level_dim(k), g.level_dim(k)), dtype=np.complex128)
            for k in range(self.M, self.M + self.W)
        ]
        for v, blk in x.items():
            corner = self.corners[v]
            gammas = self.stages[n].paths[v]
            scatter = {}
            for kk, k in enumerate(range(self.M, self.M + self.W)):
                j = k - length
                ell = j + self.q
                slot = corner.slot_lists[ell - self.G0]
                rows = {
                    gi: np.array(
                        [g.path_index(g.compose(gam, d)) for d in slot],
                        dtype=int,
                    )
                    for gi, gam in enumerate(gammas)
                }
                scatter[kk] = (ell, rows)
            for a, g1 in enumerate(gammas):
                for b, g2 in enumerate(gammas):
                    coords = blk[a, b]
                    if not np.any(coords):
                        continue
                    mats = corner.element(coords)
                    for kk in range(self.W):
                        ell, rows = scatter[kk]
                        sub = mats[ell - self.G0]
                        if sub.size == 0:
                            continue
                        blocks[kk][np.ix_(rows[a], rows[b])] += sub
        return blocks

    def tau(self, n, blocks):
        """Structural coordinates of concrete window blocks.

        The extraction certifies that every compressed entry actually
        lies in the corner span; garbage input raises.
        """
        g = self.graph
        length = n * self.p + self.q
        lo = self.M - n * self.p
        hi = self.M + self.W - n * self.p
        x = self.stage_zero(n)
        for v, blk in x.items():
            corner = self.corners[v]
            gammas = self.stages[n].paths[v]
            rows_per_level = []
            for k in range(self.M, self.M + self.W):
                j = k - length
                ell = j + self.q
                slot = corner.slot_lists[ell - self.G0]
                rows_per_level.append(
                    [
                        np.array(
                            [
                                g.path_index(g.compose(gam, d))
                                for d in slot
                            ],
                            dtype=int,
                        )
                        for gam in gammas
                    ]
                )
            for a in range(len(gammas)):
                for b in range(len(gammas)):
                    slot_blocks = []
                    for kk in range(self.W):
                        r1 = rows_per_level[kk][a]
                        r2 = rows_per_level[kk][b]
                        slot_blocks.append(
                            blocks[kk][np.ix_(r1, r2)]
                            if r1.size
                            else np.zeros((0, 0), dtype=np.complex128)
                        )
                    coords, resid = corner.coords_from_partial(
                        lo, hi, slot_blocks
                    )
                    scale = max(
                        1.0,
                        max(
                            (np.abs(s).max() for s in slot_blocks if s.size),
                            default=0.0,
                        ),
                    )
                    if resid > 100 * self.config.tol * scale:
                        raise WindowUnstableError(
                            "window data at vertex %r does not lie in the "
                            "stage-%d algebra" % (self.graph.vertices[v], n)
                        )
                    blk[a, b] = coords
        return x

    # -- reporting ----------------------------------------------------------

    def stage_dims(self):
        return [st.dim for st in self.stages]

    def bratteli_json(self):
        g = self.graph
        labels = [
            {
                "vertex": g.vertices[v],
                "class": i,
                "corner_dim": int(self.corners[v].dec.summands[i].d),
            }
            for (v, i) in self.labels
        ]
        stages = []
        for st in self.stages:
            stages.append(
                {
                    "n": st.n,
                    "dim": st.dim,
                    "summand_sizes": [int(s) for s in st.summand_sizes],
                }
            )
        return {
            "labels": labels,
            "multiplicity": self.multiplicity.tolist(),
            "stages": stages,
        }

    def bratteli_dot(self):
        g = self.graph
        lines = ["digraph bratteli {", "  rankdir=TB;"]
        for n, st in enumerate(self.stages):
            lines.append("  { rank=same;")
            for li, (v, i) in enumerate(self.labels):
                size = st.summand_sizes[li]
                lines.append(
                    '    "s%d_%d" [label="%s:%d\\nM_%d"];'
                    % (n, li, g.vertices[v], i, size)
                )
            lines.append("  }")
        for n in range(len(self.stages) - 1):
            for a in range(len(self.labels)):
                for b in range(len(self.labels)):
                    mult = int(self.multiplicity[a, b])
                    if mult == 0:
                        continue
                    attr = ' [label="%d"]' % mult if mult > 1 else ""
                    lines.append(
                        '  "s%d_%d" -> "s%d_%d"%s;' % (n, a, n + 1, b, attr)
                    )
        lines.append("}")
        return "\n".join(lines) + "\n"


# -- construction ---------------------------------------------------------


def _c0_generators(graph, weights, levels, z_powers=3):
    """Window blocks of the stage-zero generators.

    The generators are the degree-zero words with a weight power in the
    middle and matching-source index paths of length below p on the
    outside. Higher weight powers come out of the closure, so only the
    first few are seeded explicitly.
    """
    g = graph
    p = weights.p
    gens = []
    dims = [g.level_dim(k) for k in levels]

    for a in range(p):
        zpow = []
        for k in levels:
            if k - a < 0:
                zpow.append(None)
                continue
            z = weights.level_matrix(k - a)
            zpow.append(
                [np.linalg.matrix_power(z, power) for power in range(z_powers)]
            )
        by_source = {}
        for pth in g.paths(a):
            by_source.setdefault(pth.source, []).append(pth)
        for v, group in by_source.items():
            scatters = []
            slices = []
            for li, k in enumerate(levels):
                if k - a < 0:
                    scatters.append(None)
                    slices.append(None)
                    continue
                tails = [d for d in g.paths(k - a) if g.range_of(d) == v]
                didx = np.array(
                    [g.path_index(d) for d in tails], dtype=int
                )
                rows = {
                    pth.edges: np.array(
                        [
                            g.path_index(g.compose(pth, d))
                            for d in tails
                        ],
                        dtype=int,
                    )
                    for pth in group
                }
                scatters.append(rows)
                slices.append(didx)
            for alpha in group:
                for beta in group:
                    for power in range(z_powers):
                        blocks = [
                            np.zeros((d, d), dtype=np.complex128)
                            for d in dims
                        ]
                        for li in range(len(levels)):
                            if scatters[li] is None:
                                continue
                            didx = slices[li]
                            if didx.size == 0:
                                continue
                            mid = zpow[li][power][np.ix_(didx, didx)]
                            blocks[li][
                                np.ix_(
                                    scatters[li][alpha.edges],
                                    scatters[li][beta.edges],
                                )
                            ] = mid
                        gens.append(blocks)
    return gens


def build_C0(graph, weights, levels, max_dim=4096):
    """Stage-zero algebra closed up on the given window levels."""
    dims = [graph.level_dim(k) for k in levels]
    gens = _c0_generators(graph, weights, levels)
    return star_closure(dims, gens, max_dim=max_dim)


def _build_corner(graph, weights, C0, v, levels, xi_choice, tol):
    g = graph
    q = weights.q
    xi = g.xi(v, q, xi_choice)
    slot_lists = []
    slot_index = []
    for k in levels:
        slots = [d for d in g.paths(k - q) if g.range_of(d) == v]
        slot_lists.append(slots)
        slot_index.append(
            np.array(
                [g.path_index(g.compose(xi, d)) for d in slots], dtype=int
            )
        )
    slot_dims = [len(s) for s in slot_lists]

    def compress(blocks):
        return [
            blk[np.ix_(idx, idx)] for blk, idx in zip(blocks, slot_index)
        ]

    unit = [np.eye(d, dtype=np.complex128) for d in slot_dims]
    rows = [blocks_vec(unit)]
    for b in C0.basis:
        vec = blocks_vec(compress(b))
        if float(np.linalg.norm(vec)) > 1e-9:
            rows.append(vec)
    mat = onb(np.array(rows))
    basis = []
    for row in mat:
        blocks = []
        pos = 0
        for d in slot_dims:
            blocks.append(np.asarray(row[pos:pos + d * d]).reshape(d, d))
            pos += d * d
        basis.append(blocks)
    algebra = StarAlgebra(tuple(slot_dims), basis, mat, unit)
    return Corner(v, xi, levels, slot_lists, algebra, tol)


def _fiber_matrix(tower, mu):
    """Matrix of the corner map b -> V* b V for one length-p path.

    V is the partial isometry built from mu and the fixed prefixes; on
    slots it acts by prepending mu, so the map is a pure index gather
    from the corner at r(mu) into the corner at s(mu).
    """
    g = tower.graph
    v = g.source_of(mu)
    w = g.range_of(mu)
    cv = tower.corners[v]
    cw = tower.corners[w]
    lo = tower.G0
    hi = tower.G1 - tower.p
    maps = []
    for ell in range(lo, hi):
        slot_v = cv.slot_lists[ell - tower.G0]
        pos_w = cw.slot_pos[ell + tower.p - tower.G0]
        maps.append(
            np.array(
                [pos_w[g.compose(mu, d).edges] for d in slot_v], dtype=int
            )
        )
    cols = []
    for b in cw.algebra.basis:
        out_blocks = []
        for oi, ell in enumerate(range(lo, hi)):
            src = b[ell + tower.p - tower.G0]
            idx = maps[oi]
            out_blocks.append(
                src[np.ix_(idx, idx)]
                if idx.size
                else np.zeros((0, 0), dtype=np.complex128)
            )
        coords, resid = cv.coords_from_partial(lo, hi, out_blocks)
        if resid > 100 * tower.config.tol:
            raise WindowUnstableError(
                "fiber image along %s left the corner at %r"
                % (g.path_str(mu), g.vertices[v])
            )
        cols.append(coords)
    return np.array(cols).T if cols else np.zeros((cv.r, 0))


def _fiber_multiplicities(tower, mu, fib):
    """Integer multiplicity block of one fiber map.

    Entry (i, j): how often summand i of the corner at r(mu) appears in
    summand j of the corner at s(mu)) under the fiber. Computed as the
    square root of the dimension of the compressed corner, which is
    insensitive to the scalar the fiber puts on minimal projections.
    """
    g = tower.graph
    v = g.source_of(mu)
    w = g.range_of(mu)
    cv = tower.corners[v]
    cw = tower.corners[w]
    out = np.zeros((len(cw.dec.summands), len(cv.dec.summands)), dtype=int)
    for i, sw in enumerate(cw.dec.summands):
        fi = cw.coords(sw.minimal_projection)
        y = fib @ fi
        yy = cv.mul_coords(y, y)
        if np.linalg.norm(yy - y) > 1e-6 * max(1.0, np.linalg.norm(y)):
            raise MultiplicityError(
                "fiber along %s does not send minimal projections to "
                "projections" % g.path_str(mu)
            )
        for j, sv in enumerate(cv.dec.summands):
            zj = cv.coords(sv.projection)
            zy = cv.mul_coords(zj, y)
            rows = []
            for t in range(cv.r):
                e = np.zeros(cv.r, dtype=np.complex128)
                e[t] = 1.0
                rows.append(cv.mul_coords(zy, cv.mul_coords(e, cv.mul_coords(y, zj))))
            # absolute floor on the rank cut: when the compression is zero
            # the rows are pure roundoff and a relative cut would count them
            sing = np.linalg.svd(np.array(rows), compute_uv=False)
            rank = int(np.sum(sing > 1e-8 * max(1.0, sing[0])))
            mult = int(round(np.sqrt(rank)))
            if mult * mult != rank:
                raise MultiplicityError(
                    "corner dimension %d along %s is not a perfect square"
                    % (rank, g.path_str(mu))
                )
            out[i, j] = mult
    return out


def build_tower(graph, weights, config=None):
    """Assemble the full tower structure for a graph and weight spec."""
    cfg = config or TowerConfig()
    g = graph
    shape = g.validate()
    if not (shape.no_sources and shape.no_sinks):
        raise GraphError(
            "the core tower needs a graph without sources or sinks"
        )
    if cfg.xi_choice not in ("min", "max"):
        raise GraphError("xi choice must be 'min' or 'max'")
    p, q, N = weights.p, weights.q, weights.N

    tower = Tower(g, weights, cfg)
    tower.p, tower.q, tower.N = p, q, N
    M = cfg.M if cfg.M is not None else N + q + (cfg.n_max + 3) * p
    W = cfg.W if cfg.W is not None else 3 * p
    G0 = M - cfg.n_max * p - q
    G1 = M + W
    if G0 < q:
        raise GraphError(
            "window start %d leaves no room for the stage paths" % M
        )
    tower.M, tower.W, tower.G0, tower.G1 = M, W, G0, G1
    levels = list(range(G0, G1))
    worst = max(g.level_dim(k) for k in levels)
    if worst > cfg.max_level_dim:
        raise WindowUnstableError(
            "level dimension %d exceeds the guard %d; pass a smaller "
            "window" % (worst, cfg.max_level_dim)
        )

    tower.C0 = build_C0(g, weights, levels)
    tower.corners = {}
    for v in range(g.n_vertices):
        corner = _build_corner(g, weights, tower.C0, v, levels,
                               cfg.xi_choice, cfg.tol)
        corner.dec = central_decomposition(corner.algebra, seed=cfg.seed)
        tower.corners[v] = corner

    # one fiber per length-p path; the Bratteli diagram is stationary
    tower.fibers = []
    fiber_mults = []
    for mu in g.paths(p):
        fib = _fiber_matrix(tower, mu)
        tower.fibers.append(fib)
        fiber_mults.append(_fiber_multiplicities(tower, mu, fib))

    labels = []
    for v in range(g.n_vertices):
        for i in range(len(tower.corners[v].dec.summands)):
            labels.append((v, i))
    tower.labels = labels
    lab_pos = {lab: k for k, lab in enumerate(labels)}
    mult = np.zeros((len(labels), len(labels)), dtype=int)
    for mi, mu in enumerate(g.paths(p)):
        v = g.source_of(mu)
        w = g.range_of(mu)
        block = fiber_mults[mi]
        for i in range(block.shape[0]):
            for j in range(block.shape[1]):
                mult[lab_pos[(w, i)], lab_pos[(v, j)]] += block[i, j]
    tower.multiplicity = mult
    for row in range(mult.shape[0]):
        if not np.any(mult[row]):
            raise MultiplicityError(
                "summand %s receives no connecting edges; the tower "
                "inclusion would not be injective" % (labels[row],)
            )

    tower.stages = []
    for n in range(cfg.n_max + 1):
        by_source = {v: [] for v in range(g.n_vertices)}
        for pth in g.paths(n * p + q):
            by_source[pth.source].append(pth)
        counts = {v: len(lst) for v, lst in by_source.items()}
        sizes = []
        for (v, i) in labels:
            sizes.append(counts[v] * tower.corners[v].dec.summands[i].d)
        dim = sum(
            counts[v] ** 2 * tower.corners[v].r
            for v in range(g.n_vertices)
        )
        tower.stages.append(
            StageData(
                n=n,
                paths=by_source,
                counts=counts,
                summand_sizes=sizes,
                dim=dim,
            )
        )

    # dimension bookkeeping between consecutive stages
    for n in range(cfg.n_max):
        lo, hi = tower.stages[n], tower.stages[n + 1]
        for bi, (v, j) in enumerate(labels):
            got = sum(
                mult[ai, bi] * lo.summand_sizes[ai]
                for ai in range(len(labels))
            )
            if got != hi.summand_sizes[bi]:
                raise MultiplicityError(
                    "stage %d summand %s has size %d, connecting maps "
                    "give %d" % (n + 1, labels[bi], hi.summand_sizes[bi], got)
                )

    # positions of alpha*mu inside the stage-(n+1) path lists, per fiber
    tower._hi_pos = {}
    for n in range(cfg.n_max):
        hi_stage = tower.stages[n + 1]
        pos = {
            v: {pth.edges: i for i, pth in enumerate(hi_stage.paths[v])}
            for v in hi_stage.paths
        }
        for mi, mu in enumerate(g.paths(p)):
            v = g.source_of(mu)
            w = g.range_of(mu)
            tower._hi_pos[(n + 1, mi)] = np.array(
                [
                    pos[v][g.compose(alpha, mu).edges]
                    for alpha in tower.stages[n].paths[w]
                ],
                dtype=int,
            )
    return tower


def concrete_stage_algebra(tower, n):
    """The stage algebra as a plain StarAlgebra on the top window.

    Used to cross-check the structural construction against the generic
    finite-dimensional machinery.
    """
    g = tower.graph
    dims = [g.level_dim(k) for k in range(tower.M, tower.M + tower.W)]
    gens = []
    for v in range(g.n_vertices):
        m = tower.stages[n].counts[v]
        r = tower.corners[v].r
        for a in range(m):
            for b in range(a, m):
                for t in range(r):
                    x = tower.stage_zero(n)
                    x[v][a, b, t] = 1.0
                    gens.append(tower.tau_inverse(n, x))
    return star_closure(dims, gens)

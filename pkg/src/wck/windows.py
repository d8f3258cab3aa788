"""Finite-window evaluation of quotient elements.

Every generator acts on the graded path spaces: u(e) raises the level
by one, u*(e) lowers it, p(v) and z act within a level. An element with
a single grading offset d is therefore determined by its blocks, the
matrices mapping level k to level k + d, and modulo compact operators
only the tail of that block sequence matters. All structure
computations happen on a window of consecutive levels chosen deep
enough that the exact periodicity of the weights makes the blocks
repeat with period p.

The quotient norm of an element is modeled as the stable limit of
compressed window norms: compress to the span of levels [M, M + W),
widen W by p until the norm stops moving, and certify the value against
the translated window starting at M + p. Failure to stabilize is always
reported, never silently accepted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .elements import P, U, US, Z, word_offset
from .elements import offset as element_offset
from .errors import ElementError, WindowUnstableError
from .graphs import Path

NORM_TOL = 1e-9
RANK_TOL = 1e-8


@dataclass(frozen=True)
class WindowConfig:
    """Window-protocol parameters bound to a weight spec."""

    weights: object
    M: int | None = None
    W: int | None = None
    tol: float = NORM_TOL
    max_widenings: int = 12
    max_level_dim: int = 600


def level_dim(graph, k):
    return graph.level_dim(k) if k >= 0 else 0


def letter_matrix(w, letter, k):
    """Matrix of one letter from level k to level k + its offset."""
    g = w.graph
    kind, payload = letter
    if kind == U:
        out = np.zeros((level_dim(g, k + 1), level_dim(g, k)), dtype=np.complex128)
        if k >= 0:
            for j, path in enumerate(g.paths(k)):
                if g.range_of(path) == g.esrc[payload]:
                    ext = Path((payload,) + path.edges, path.source)
                    out[g.path_index(ext), j] = 1.0
        return out
    if kind == US:
        return letter_matrix(w, (U, payload), k - 1).conj().T
    if kind == P:
        out = np.zeros((level_dim(g, k), level_dim(g, k)), dtype=np.complex128)
        if k >= 0:
            for j, path in enumerate(g.paths(k)):
                if g.range_of(path) == payload:
                    out[j, j] = 1.0
        return out
    if kind == Z:
        if k < 0:
            return np.zeros((0, 0), dtype=np.complex128)
        m = w.level_matrix(k)
        if payload == 1:
            return m
        return np.linalg.matrix_power(m, payload)
    raise ElementError("unknown letter kind %r" % (kind,))


def word_matrix(w, word, k):
    """Product of letter matrices for a word acting on level k."""
    g = w.graph
    # rightmost letter acts first; track the level each letter sees
    level = k
    out = None
    for letter in reversed(word):
        m = letter_matrix(w, letter, level)
        out = m if out is None else m @ out
        level += word_offset((letter,))
    if out is None:
        out = np.eye(level_dim(g, k), dtype=np.complex128)
    return out


def eval_block(x, k, w):
    """Matrix of a homogeneous element from level k to level k + offset."""
    d = element_offset(x)
    g = x.graph
    out = np.zeros((level_dim(g, k + d), level_dim(g, k)), dtype=np.complex128)
    for word, c in x.terms.items():
        out += c * word_matrix(w, word, k)
    return out


@dataclass
class WindowRep:
    """Blocks of a homogeneous element over levels [M, M + W).

    blocks[i] is the matrix from level M + i to level M + i + offset,
    so the representation is indexed by domain level.
    """

    graph: object
    M: int
    offset: int
    blocks: list

    @property
    def W(self):
        return len(self.blocks)

    @property
    def hi(self):
        return self.M + len(self.blocks)

    def level(self, k):
        if not self.M <= k < self.hi:
            raise ElementError(
                "level %d outside stored window [%d, %d)" % (k, self.M, self.hi)
            )
        return self.blocks[k - self.M]

    def vector(self, M=None, W=None):
        """Flatten a sub-window into one vector for span arithmetic."""
        M = self.M if M is None else M
        W = self.W if W is None else W
        return np.concatenate(
            [self.level(k).ravel() for k in range(M, M + W)]
        ) if W > 0 else np.zeros(0, dtype=np.complex128)


def window_rep(x, w, M, W):
    blocks = [eval_block(x, k, w) for k in range(M, M + W)]
    return WindowRep(x.graph, M, element_offset(x), blocks)


def wr_add(a, b, alpha=1.0):
    if a.offset != b.offset:
        raise ElementError("cannot add window reps with different offsets")
    lo, hi = max(a.M, b.M), min(a.hi, b.hi)
    if lo >= hi:
        raise ElementError("window reps do not overlap")
    blocks = [a.level(k) + alpha * b.level(k) for k in range(lo, hi)]
    return WindowRep(a.graph, lo, a.offset, blocks)


def wr_scale(alpha, a):
    return WindowRep(a.graph, a.M, a.offset, [alpha * blk for blk in a.blocks])


def wr_mul(a, b):
    """Window rep of the product: (ab)(k) = a(k + offset(b)) b(k)."""
    lo = max(b.M, a.M - b.offset)
    hi = min(b.hi, a.hi - b.offset)
    if lo >= hi:
        raise ElementError("window reps do not overlap for multiplication")
    blocks = [a.level(k + b.offset) @ b.level(k) for k in range(lo, hi)]
    return WindowRep(a.graph, lo, a.offset + b.offset, blocks)


def wr_adjoint(a):
    blocks = [blk.conj().T for blk in a.blocks]
    return WindowRep(a.graph, a.M + a.offset, -a.offset, blocks)


def wr_norm(a):
    return max(
        (float(np.linalg.norm(blk, 2)) for blk in a.blocks if blk.size),
        default=0.0,
    )


def annihilation_depth(x):
    """Deepest level reach below the starting level over all terms."""
    depth = 0
    for word in x.terms:
        running = 0
        for letter in reversed(word):
            running += word_offset((letter,))
            depth = max(depth, -running)
    return depth


def max_rise(x):
    """Highest level reach above the starting level over all terms."""
    rise = 0
    for word in x.terms:
        running = 0
        for letter in reversed(word):
            running += word_offset((letter,))
            rise = max(rise, running)
    return rise


def _window_matrix(x, w, M, W):
    """Compression of x to the span of levels [M, M + W), as one matrix."""
    g = x.graph
    dims = [level_dim(g, k) for k in range(M, M + W)]
    starts = np.concatenate([[0], np.cumsum(dims)]).astype(int)
    total = int(starts[-1])
    out = np.zeros((total, total), dtype=np.complex128)
    by_offset = {}
    for word, c in x.terms.items():
        by_offset.setdefault(word_offset(word), []).append((word, c))
    for d, terms in by_offset.items():
        for i, k in enumerate(range(M, M + W)):
            j = k + d - M
            if not 0 <= j < W:
                continue
            blk = np.zeros((dims[j], dims[i]), dtype=np.complex128)
            for word, c in terms:
                blk += c * word_matrix(w, word, k)
            out[starts[j]:starts[j] + dims[j], starts[i]:starts[i] + dims[i]] += blk
    return out


def _start_width(x, w, cfg):
    p = w.p
    reach = max(annihilation_depth(x), max_rise(x))
    width = p
    while width < reach + p:
        width += p
    return width if cfg.W is None else cfg.W


def calkin_norm(x, cfg):
    """Stable compressed-window norm of an element.

    The window [M, M + W) is widened by p until the norm stops moving
    (within cfg.tol), then certified against the window translated by
    p. Levels are capped so no single level exceeds cfg.max_level_dim;
    hitting the cap before stabilization raises, it never degrades the
    answer silently.
    """
    w = cfg.weights
    if x.is_zero:
        return 0.0
    p = w.p
    M = cfg.M
    if M is None:
        M = w.N + annihilation_depth(x) + 2 * p
    W = _start_width(x, w, cfg)
    g = x.graph

    def fits(width):
        return all(
            level_dim(g, k) <= cfg.max_level_dim for k in range(M, M + width + p)
        )

    if not fits(W):
        raise WindowUnstableError(
            "window levels exceed the dimension guard before any norm "
            "estimate is possible; the graph grows too fast for this window"
        )
    prev = float(np.linalg.norm(_window_matrix(x, w, M, W), 2))
    for _ in range(cfg.max_widenings):
        wider = W + p
        if not fits(wider):
            raise WindowUnstableError(
                "norm did not stabilize before the level-dimension guard"
            )
        cur = float(np.linalg.norm(_window_matrix(x, w, M, wider), 2))
        if abs(cur - prev) <= cfg.tol:
            shifted = float(np.linalg.norm(_window_matrix(x, w, M + p, wider), 2))
            if abs(shifted - cur) <= cfg.tol:
                return cur
        prev = cur
        W = wider
    raise WindowUnstableError(
        "norm did not stabilize after %d widenings" % cfg.max_widenings
    )


def calkin_equal(x, y, cfg):
    from .elements import sub

    return calkin_norm(sub(x, y), cfg) <= cfg.tol


# -- span arithmetic ----------------------------------------------------------


def onb(rows, tol=RANK_TOL):
    """Orthonormal row basis of the row span, rank cut at tol (relative)."""
    rows = np.asarray(rows, dtype=np.complex128)
    if rows.size == 0:
        return np.zeros((0, rows.shape[1] if rows.ndim == 2 else 0), dtype=np.complex128)
    u, s, vh = np.linalg.svd(rows, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros((0, rows.shape[1]), dtype=np.complex128)
    keep = s > tol * s[0]
    return vh[keep]


def in_span(vec, basis, tol=RANK_TOL):
    """Whether vec lies in the row span of an orthonormal basis."""
    scale = max(1.0, float(np.linalg.norm(vec)))
    if basis.shape[0] == 0:
        return float(np.linalg.norm(vec)) <= tol * scale
    coeffs = basis.conj() @ vec
    residual = vec - basis.T @ coeffs
    return float(np.linalg.norm(residual)) <= tol * scale


def span_contains(big, small, tol=RANK_TOL):
    """Whether every row of `small` lies in the span of onb `big`."""
    return all(in_span(row, big, tol) for row in small)


def span_intersect(a, b, tol=RANK_TOL):
    """Orthonormal basis of the intersection of two orthonormal row spans.

    Principal vectors with singular value within tol of 1 are taken as
    the intersection, then each is rechecked for membership in both
    spans so a near-miss never slips through.
    """
    if a.shape[0] == 0 or b.shape[0] == 0:
        return np.zeros((0, a.shape[1]), dtype=np.complex128)
    u, s, vh = np.linalg.svd(a.conj() @ b.T, full_matrices=False)
    keep = s > 1.0 - tol
    if not np.any(keep):
        return np.zeros((0, a.shape[1]), dtype=np.complex128)
    vecs = (u[:, keep].T.conj() @ a)
    vecs = onb(vecs, tol)
    out = [v for v in vecs if in_span(v, a, 10 * tol) and in_span(v, b, 10 * tol)]
    if not out:
        return np.zeros((0, a.shape[1]), dtype=np.complex128)
    return np.asarray(out)

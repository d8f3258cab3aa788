"""Structure analysis of finite-dimensional *-algebras of block matrices.

Elements live in a fixed block space: a direct sum of full matrix
blocks, one per window level, represented as plain lists of square
complex arrays. A *-algebra is carried around as a span basis plus an
orthonormalized vectorization for membership tests. The analysis
follows the standard route: close the generators under products and
adjoints, split off the center, cluster the spectrum of a generic
central element into the matrix summands, and read multiplicities of
an embedding from corner dimensions over minimal projections.

Randomized steps (generic central elements, generic corner elements)
always certify their output and resample on failure; a wrong answer is
never returned silently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ClosureOverflowError,
    DecompositionError,
    MultiplicityError,
)
from .windows import in_span, onb

CLUSTER_GAP = 1e-6
RANK_TOL = 1e-8
INT_TOL = 1e-4
MAX_RESAMPLE = 8


# -- block elements ----------------------------------------------------------


def blocks_eye(dims):
    return [np.eye(d, dtype=np.complex128) for d in dims]


def blocks_zero(dims):
    return [np.zeros((d, d), dtype=np.complex128) for d in dims]


def blocks_mul(a, b):
    return [x @ y for x, y in zip(a, b)]


def blocks_adj(a):
    return [x.conj().T for x in a]


def blocks_add(a, b, alpha=1.0):
    return [x + alpha * y for x, y in zip(a, b)]


def blocks_scale(alpha, a):
    return [alpha * x for x in a]


def blocks_vec(a):
    if not a:
        return np.zeros(0, dtype=np.complex128)
    return np.concatenate([x.ravel() for x in a])


def blocks_unvec(vec, dims):
    out = []
    pos = 0
    for d in dims:
        out.append(np.asarray(vec[pos:pos + d * d]).reshape(d, d))
        pos += d * d
    return out


def blocks_norm(a):
    return max((float(np.linalg.norm(x, 2)) for x in a if x.size), default=0.0)


def blocks_rank(a, tol=RANK_TOL):
    total = 0
    for x in a:
        if x.size == 0:
            continue
        s = np.linalg.svd(x, compute_uv=False)
        if s.size and s[0] > 0:
            total += int(np.sum(s > tol * max(1.0, s[0])))
    return total


def _absorb(onb_mat, vec, tol=RANK_TOL, floor=1e-9):
    """Extend an orthonormal row basis by one vector, or return None.

    Two rounds of Gram-Schmidt keep the basis numerically orthonormal
    without re-running a full decomposition per insertion. Vectors below
    the absolute floor are treated as zero: callers feed elements built
    from unit-scale pieces, so anything that small is roundoff noise
    whose direction must not enter the basis.
    """
    scale = float(np.linalg.norm(vec))
    if scale <= floor:
        return None
    w = vec.astype(np.complex128, copy=True)
    for _ in range(2):
        if onb_mat.shape[0]:
            w = w - onb_mat.T @ (onb_mat.conj() @ w)
    resid = float(np.linalg.norm(w))
    if resid <= tol * scale:
        return None
    return np.vstack([onb_mat, (w / resid)[None, :]])


# -- star algebras ------------------------------------------------------------


class StarAlgebra:
    """Span basis of a unital *-subalgebra of a block space."""

    def __init__(self, dims, basis, basis_onb, unit):
        self.dims = tuple(dims)
        self.basis = basis
        self.onb = basis_onb
        self.unit = unit

    @property
    def dim(self):
        return len(self.basis)

    def contains(self, x, tol=RANK_TOL):
        return in_span(blocks_vec(x), self.onb, tol)

    def element(self, coeffs):
        out = blocks_zero(self.dims)
        for c, b in zip(coeffs, self.basis):
            out = blocks_add(out, b, c)
        return out

    def random_hermitian(self, rng):
        """Random self-adjoint element spread over the whole basis."""
        coeffs = rng.normal(size=self.dim) + 1j * rng.normal(size=self.dim)
        x = self.element(coeffs)
        return blocks_scale(0.5, blocks_add(x, blocks_adj(x)))


def star_closure(dims, gens, unit=None, max_dim=4096):
    """Close generators under span, products, and adjoints.

    The ambient unit (or the given one, for corner algebras) is always
    included, so the result is unital. Growth beyond max_dim raises.
    """
    dims = tuple(dims)
    if unit is None:
        unit = blocks_eye(dims)
    pool = [unit]
    for gen in gens:
        pool.append(gen)
        pool.append(blocks_adj(gen))
    basis = []
    basis_onb = np.zeros((0, sum(d * d for d in dims)), dtype=np.complex128)
    fresh = []

    def absorb(cand):
        vec = blocks_vec(cand)
        extended = _absorb(basis_onb, vec)
        if extended is None:
            return None
        # keep stored basis elements at unit scale so later spectral
        # cuts see commutators of comparable size
        scaled = blocks_scale(1.0 / float(np.linalg.norm(vec)), cand)
        basis.append(scaled)
        return extended, scaled

    for cand in pool:
        hit = absorb(cand)
        if hit is None:
            continue
        basis_onb, scaled = hit
        fresh.append(scaled)
    while fresh:
        new = []
        for a in fresh:
            for b in list(basis):
                for cand in (blocks_mul(a, b), blocks_mul(b, a)):
                    hit = absorb(cand)
                    if hit is None:
                        continue
                    basis_onb, scaled = hit
                    new.append(scaled)
                    if len(basis) > max_dim:
                        raise ClosureOverflowError(
                            "closure exceeded %d dimensions" % max_dim
                        )
        fresh = new
    return StarAlgebra(dims, basis, basis_onb, unit)


# -- central decomposition ----------------------------------------------------


@dataclass
class Summand:
    """One matrix summand M_d of a finite-dimensional algebra."""

    index: int
    projection: list          # central projection, block element
    d: int                    # matrix size
    ambient_rank: int         # rank of the projection in the block space
    minimal_projection: list  # block element with dim(fAf) = 1

    @property
    def multiplicity(self):
        return self.ambient_rank // self.d


@dataclass
class CentralDecomposition:
    algebra: StarAlgebra
    summands: list

    @property
    def dims(self):
        return [s.d for s in self.summands]

    def check_dimension(self):
        return sum(s.d ** 2 for s in self.summands) == self.algebra.dim


def _center_basis(A):
    """Hermitian basis of the center of the algebra.

    The commuting coefficient vectors are the nullspace of the Gram
    matrix of all commutator rows, accumulated one basis element at a
    time so nothing larger than (dim, dim) plus one row block is ever
    held.
    """
    d = A.dim
    if d == 0:
        return []
    length = sum(k * k for k in A.dims)
    gram = np.zeros((d, d), dtype=np.complex128)
    for bj in A.basis:
        rows = np.empty((d, length), dtype=np.complex128)
        for i, bi in enumerate(A.basis):
            comm = blocks_add(blocks_mul(bi, bj), blocks_mul(bj, bi), -1.0)
            rows[i] = blocks_vec(comm)
        gram += rows.conj() @ rows.T
    vals, vecs = np.linalg.eigh(gram)
    cut = 1e-10 * max(1.0, float(vals[-1]))
    coeff_basis = [vecs[:, i] for i in range(d) if vals[i] <= cut]
    candidates = []
    for coeffs in coeff_basis:
        x = A.element(coeffs)
        candidates.append(blocks_scale(0.5, blocks_add(x, blocks_adj(x))))
        candidates.append(
            blocks_scale(-0.5j, blocks_add(x, blocks_adj(x), -1.0))
        )
    if not candidates:
        return []
    # orthonormalize over the reals so the output stays hermitian, with
    # the rank cut anchored at the largest singular value; per-candidate
    # tests are unreliable here because candidate norms vary wildly
    reals = np.array(
        [
            np.concatenate([blocks_vec(c).real, blocks_vec(c).imag])
            for c in candidates
        ]
    )
    u, sv, vh = np.linalg.svd(reals, full_matrices=False)
    if sv.size == 0 or sv[0] == 0.0:
        return []
    rank = int(np.sum(sv > 1e-8 * sv[0]))
    out = []
    for row in vh[:rank]:
        vec = row[:length] + 1j * row[length:]
        out.append(blocks_unvec(vec, A.dims))
    return out


def _cluster_eigenvalues(values, gap=CLUSTER_GAP):
    order = np.argsort(values)
    clusters = []
    for idx in order:
        if clusters and values[idx] - values[clusters[-1][-1]] <= gap:
            clusters[-1].append(idx)
        else:
            clusters.append([idx])
    return clusters


def _spectral_projections(dims, y, gap=CLUSTER_GAP):
    """Projections onto global eigenvalue clusters of a hermitian element."""
    eigvals = []
    eigvecs = []
    for blk in y:
        if blk.size == 0:
            eigvals.append(np.zeros(0))
            eigvecs.append(np.zeros((0, 0), dtype=np.complex128))
            continue
        vals, vecs = np.linalg.eigh(blk)
        eigvals.append(vals)
        eigvecs.append(vecs)
    flat = np.concatenate([v for v in eigvals]) if eigvals else np.zeros(0)
    if flat.size == 0:
        return [], []
    clusters = _cluster_eigenvalues(flat)
    level_of = np.concatenate(
        [np.full(v.size, lev) for lev, v in enumerate(eigvals)]
    ).astype(int)
    pos_in_level = np.concatenate(
        [np.arange(v.size) for v in eigvals]
    ).astype(int) if flat.size else np.zeros(0, dtype=int)
    projections = []
    means = []
    for cluster in clusters:
        proj = blocks_zero([blk.shape[0] for blk in y])
        for idx in cluster:
            lev = level_of[idx]
            vec = eigvecs[lev][:, pos_in_level[idx]]
            proj[lev] = proj[lev] + np.outer(vec, vec.conj())
        projections.append(proj)
        means.append(float(np.mean([flat[i] for i in cluster])))
    return projections, means


def _summand_sort_key(sm):
    diag = np.concatenate([np.diag(blk).real for blk in sm.projection])
    return (sm.d, sm.ambient_rank, tuple(np.round(diag, 6)))


def central_decomposition(A, seed=0):
    """Split a finite-dimensional *-algebra into matrix summands.

    A generic self-adjoint central element separates the summands; its
    eigenvalue clusters give the central projections. Every randomized
    attempt is certified (cluster count equals the center dimension,
    projections lie in the algebra, summand dimensions are integers and
    sum to the algebra dimension) and failures resample. Summands come
    back in a canonical order that only depends on the projections, so
    repeated runs agree.
    """
    rng = np.random.default_rng(seed)
    center = _center_basis(A)
    s = len(center)
    if s == 0:
        raise DecompositionError("algebra has no central elements")
    shift = 3.0
    unit_vec = blocks_vec(A.unit)
    for _ in range(MAX_RESAMPLE):
        coeffs = rng.normal(size=s)
        y = blocks_zero(A.dims)
        for c, b in zip(coeffs, center):
            y = blocks_add(y, b, c)
        nrm = blocks_norm(y)
        if nrm == 0 and s > 1:
            continue
        if nrm > 0:
            y = blocks_scale(1.0 / nrm, y)
        y = blocks_add(y, A.unit, shift)
        projections, means = _spectral_projections(A.dims, y)
        algebra_clusters = [
            (p, m) for p, m in zip(projections, means) if abs(m) > shift / 2
        ]
        if len(algebra_clusters) != s:
            continue
        ok = True
        summands = []
        total_dimsq = 0
        for i, (proj, _) in enumerate(algebra_clusters):
            if not A.contains(proj, 100 * RANK_TOL):
                ok = False
                break
            corner_rows = [
                blocks_vec(blocks_mul(blocks_mul(proj, b), proj)) for b in A.basis
            ]
            corner_dim = onb(np.array(corner_rows)).shape[0]
            d = int(round(np.sqrt(corner_dim)))
            if abs(d * d - corner_dim) > INT_TOL:
                ok = False
                break
            ambient_rank = int(round(sum(np.trace(b).real for b in proj)))
            if d == 0 or ambient_rank % d != 0:
                ok = False
                break
            total_dimsq += d * d
            summands.append(
                Summand(
                    index=i,
                    projection=proj,
                    d=d,
                    ambient_rank=ambient_rank,
                    minimal_projection=None,
                )
            )
        if not ok or total_dimsq != A.dim:
            continue
        total_proj = blocks_zero(A.dims)
        for sm in summands:
            total_proj = blocks_add(total_proj, sm.projection)
        if not np.allclose(blocks_vec(total_proj), unit_vec, atol=1e-7):
            continue
        summands.sort(key=_summand_sort_key)
        for i, sm in enumerate(summands):
            sm.index = i
            sm.minimal_projection = _minimal_projection(A, sm, rng)
        return CentralDecomposition(algebra=A, summands=summands)
    raise DecompositionError(
        "no generic central element produced a certified decomposition"
    )


def _minimal_projection(A, summand, rng):
    """Projection f in the summand with dim(fAf) = 1."""
    if summand.d == 1:
        return summand.projection
    proj = summand.projection
    for _ in range(MAX_RESAMPLE):
        x = A.random_hermitian(rng)
        y = blocks_mul(blocks_mul(proj, x), proj)
        y = blocks_scale(0.5, blocks_add(y, blocks_adj(y)))
        nrm = blocks_norm(y)
        if nrm == 0:
            continue
        y = blocks_add(blocks_scale(1.0 / nrm, y), proj, 3.0)
        projections, means = _spectral_projections(A.dims, y)
        candidates = [(p, m) for p, m in zip(projections, means) if abs(m) > 1.0]
        if len(candidates) != summand.d:
            continue
        f = candidates[0][0]
        if not A.contains(f, 100 * RANK_TOL):
            continue
        corner_rows = [
            blocks_vec(blocks_mul(blocks_mul(f, b), f)) for b in A.basis
        ]
        if onb(np.array(corner_rows)).shape[0] != 1:
            continue
        return f
    raise DecompositionError(
        "no generic corner element produced a minimal projection"
    )


def minimal_projection(dec, index):
    """Minimal projection of one summand of a decomposition."""
    return dec.summands[index].minimal_projection


# -- embeddings ---------------------------------------------------------------


def embedding_multiplicities(dec_a, dec_b, phi, samples=12, seed=0, tol=RANK_TOL):
    """Multiplicity matrix of a unital *-homomorphism phi: A -> B.

    phi is applied to block elements of A and must land in B. The entry
    m[i][j] counts how often summand i of A sits inside summand j of B:
    the corner of B over phi(minimal projection of summand i), cut to
    summand j, is a full matrix algebra of size m[i][j].
    """
    A, B = dec_a.algebra, dec_b.algebra
    rng = np.random.default_rng(seed)

    image_unit = phi(A.unit)
    if not np.allclose(blocks_vec(image_unit), blocks_vec(B.unit), atol=1e-8):
        raise MultiplicityError("map is not unital")
    for _ in range(samples):
        ca = rng.normal(size=A.dim) + 1j * rng.normal(size=A.dim)
        cb = rng.normal(size=A.dim) + 1j * rng.normal(size=A.dim)
        x, y = A.element(ca), A.element(cb)
        lhs = phi(blocks_mul(x, y))
        rhs = blocks_mul(phi(x), phi(y))
        if np.linalg.norm(blocks_vec(lhs) - blocks_vec(rhs)) > 1e-8 * max(
            1.0, np.linalg.norm(blocks_vec(lhs))
        ):
            raise MultiplicityError("map is not multiplicative")
        star = phi(blocks_adj(x))
        if np.linalg.norm(
            blocks_vec(star) - blocks_vec(blocks_adj(phi(x)))
        ) > 1e-8 * max(1.0, np.linalg.norm(blocks_vec(star))):
            raise MultiplicityError("map is not star-preserving")
        if not B.contains(phi(x), 100 * tol):
            raise MultiplicityError("image leaves the target algebra")

    m = np.zeros((len(dec_a.summands), len(dec_b.summands)), dtype=int)
    for i, sa in enumerate(dec_a.summands):
        q = phi(sa.minimal_projection)
        for j, sb in enumerate(dec_b.summands):
            zq = blocks_mul(sb.projection, q)
            rows = np.array([
                blocks_vec(blocks_mul(blocks_mul(zq, b), blocks_adj(zq)))
                for b in B.basis
            ])
            # absolute floor on the rank cut: a zero compression leaves
            # pure roundoff rows and a relative cut would count them
            sing = np.linalg.svd(rows, compute_uv=False)
            corner_dim = int(np.sum(sing > tol * max(1.0, sing[0])))
            mij = int(round(np.sqrt(corner_dim)))
            if abs(mij * mij - corner_dim) > INT_TOL:
                raise MultiplicityError(
                    "corner dimension %d of summand pair (%d, %d) is not a "
                    "perfect square" % (corner_dim, i, j)
                )
            m[i, j] = mij
    # column sums against the target summand sizes
    for j, sb in enumerate(dec_b.summands):
        got = int(sum(m[i, j] * dec_a.summands[i].d for i in range(m.shape[0])))
        if got != sb.d:
            raise MultiplicityError(
                "multiplicity column %d sums to %d, expected %d"
                % (j, got, sb.d)
            )
    return m


# -- ideals -------------------------------------------------------------------


@dataclass
class AlgebraIdealLattice:
    """All two-sided ideals of a decomposed algebra, one per summand set."""

    subsets: list          # frozensets of summand indices, sorted
    dims: dict             # subset -> linear dimension

    def __len__(self):
        return len(self.subsets)

    def leq(self, a, b):
        return a <= b

    def hasse_edges(self):
        edges = []
        for a in self.subsets:
            for b in self.subsets:
                if a < b and len(b - a) and not any(
                    a < c < b for c in self.subsets
                ):
                    edges.append((a, b))
        return edges


def ideal_lattice(dec, verify_samples=4, seed=0):
    """Two-sided ideals of a finite-dimensional algebra, by summand sets."""
    A = dec.algebra
    rng = np.random.default_rng(seed)
    n = len(dec.summands)
    subsets = [
        frozenset(i for i in range(n) if b & (1 << i)) for b in range(2 ** n)
    ]
    subsets = sorted(subsets, key=lambda s: (len(s), sorted(s)))
    dims = {}
    for subset in subsets:
        dims[subset] = sum(dec.summands[i].d ** 2 for i in subset)
    # spot-check two-sidedness on a few nontrivial subsets
    check = [s for s in subsets if 0 < len(s) < n][:verify_samples]
    for subset in check:
        proj = blocks_zero(A.dims)
        for i in subset:
            proj = blocks_add(proj, dec.summands[i].projection)
        ideal_rows = onb(
            np.array([blocks_vec(blocks_mul(proj, b)) for b in A.basis])
        )
        for _ in range(verify_samples):
            x = A.element(rng.normal(size=A.dim))
            y = blocks_mul(blocks_mul(x, proj), A.element(rng.normal(size=A.dim)))
            if not in_span(blocks_vec(y), ideal_rows, 1e-7):
                raise DecompositionError(
                    "summand subset %s failed the two-sided ideal check"
                    % sorted(subset)
                )
    return AlgebraIdealLattice(subsets=subsets, dims=dims)

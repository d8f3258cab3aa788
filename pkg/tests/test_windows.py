"""Window evaluation, block homomorphism, and the stable-norm protocol."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from util import corpus_graphs, cycle_graph, cycle_weight_spec, random_diag_spec
from wck import elements as el
from wck.elements import P, U, US, Z
from wck.errors import ElementError, WindowUnstableError
from wck.weights import WeightSpec
from wck import windows as win
from wck.windows import (
    WindowConfig,
    calkin_equal,
    calkin_norm,
    eval_block,
    window_rep,
)

T = (2.0, 1.0, 3.0)


@pytest.fixture(scope="module")
def c3():
    return cycle_graph(3)


@pytest.fixture(scope="module")
def c3w(c3):
    return cycle_weight_spec(c3, T)


@pytest.fixture(scope="module")
def cfg(c3w):
    return WindowConfig(weights=c3w)


def test_unit_evaluates_to_identity(c3, c3w):
    one = el.unit(c3)
    for k in range(5):
        assert np.allclose(eval_block(one, k, c3w), np.eye(c3.level_dim(k)))


def test_z_block_diagonal_values(c3, c3w):
    z = el.parse_element(c3, "z")
    block = eval_block(z, 5, c3w)
    for i in range(3):
        col = c3.path_index(c3.xi(i, 5))
        assert block[col, col] == T[i]
    assert np.allclose(block, np.diag(np.diag(block)))


def test_vertex_projection_block(c3, c3w):
    pv2 = el.parse_element(c3, "p(v2)")
    block = eval_block(pv2, 1, c3w)
    # only e1 has range v2
    expected = np.zeros((3, 3))
    expected[c3.path_index(c3.parse_path("e1")), c3.path_index(c3.parse_path("e1"))] = 1
    assert np.allclose(block, expected)


def test_range_projection_identity_on_cycle(c3, c3w):
    # on a cycle u(e)u*(e) acts as p(r(e))
    lhs = el.parse_element(c3, "u(e1).u*(e1)")
    rhs = el.parse_element(c3, "p(v2)")
    for k in range(1, 5):
        assert np.allclose(eval_block(lhs, k, c3w), eval_block(rhs, k, c3w))


def test_eval_block_rejects_mixed_offsets(c3, c3w):
    with pytest.raises(ElementError, match="mixes grading"):
        eval_block(el.parse_element(c3, "u(e1) + z"), 3, c3w)


def test_annihilation_reach(c3):
    assert win.annihilation_depth(el.parse_element(c3, "u*(e1)")) == 1
    assert win.annihilation_depth(el.parse_element(c3, "u(e1).u*(e1)")) == 1
    assert win.annihilation_depth(el.parse_element(c3, "p(v1)")) == 0
    # reaches are measured on the normal form, where u*(e2).u(e2) is gone
    assert win.max_rise(el.parse_element(c3, "u*(e2).u(e2).u(e1)")) == 1
    assert win.max_rise(el.parse_element(c3, "u(e2).u(e1)")) == 2


@settings(deadline=None, max_examples=60)
@given(st.data(), st.integers(0, 2**31 - 1))
def test_block_homomorphism(data, seed):
    g = corpus_graphs()["C3"]
    w = random_diag_spec(g, 2, 0, np.random.default_rng(seed))
    pool = [(U, e) for e in range(3)] + [(US, e) for e in range(3)]
    pool += [(P, v) for v in range(3)] + [(Z, 1), (Z, -1)]
    wx = data.draw(st.lists(st.sampled_from(pool), max_size=3).map(tuple))
    wy = data.draw(st.lists(st.sampled_from(pool), max_size=3).map(tuple))
    x, y = el.make(g, wx), el.make(g, wy)
    xy = el.mul(x, y)
    if x.is_zero or y.is_zero:
        return
    dy = el.offset(y)
    for k in range(3, 6):
        lhs = eval_block(xy, k, w) if not xy.is_zero else 0 * (
            eval_block(x, k + dy, w) @ eval_block(y, k, w)
        )
        rhs = eval_block(x, k + dy, w) @ eval_block(y, k, w)
        assert np.allclose(lhs, rhs, atol=1e-12)


def test_window_rep_product_and_adjoint(c3, c3w):
    x = el.parse_element(c3, "u(e1).z")
    y = el.parse_element(c3, "z.u*(e2)")
    rx = window_rep(x, c3w, 4, 6)
    ry = window_rep(y, c3w, 4, 6)
    prod = win.wr_mul(rx, ry)
    direct = window_rep(el.mul(x, y), c3w, prod.M, prod.W)
    for k in range(prod.M, prod.hi):
        assert np.allclose(prod.level(k), direct.level(k), atol=1e-12)
    adj = win.wr_adjoint(rx)
    direct_adj = window_rep(el.adjoint(x), c3w, adj.M, adj.W)
    for k in range(adj.M, adj.hi):
        assert np.allclose(adj.level(k), direct_adj.level(k), atol=1e-12)


def test_window_rep_character_example(c3, c3w):
    # p(v1)(z - t_1) over levels 12..17: each block holds at most one
    # diagonal entry, at the unique path ending at v1; odd levels cycle
    # through t_i - t_1 with i = (1-k) mod 3, even levels give 1 - t_1
    x = el.mul(
        el.parse_element(c3, "p(v1)"),
        el.sub(el.parse_element(c3, "z"), el.scale(T[0], el.unit(c3))),
    )
    rep = window_rep(x, c3w, 12, 6)
    odd_values = []
    for k in range(12, 18):
        block = rep.level(k)
        nz = block[np.abs(block) > 0]
        if k % 2 == 0:
            assert nz.size == 1 and nz[0] == 1.0 - T[0]
        else:
            assert nz.size <= 1
            odd_values.append(complex(nz[0]).real if nz.size else 0.0)
    assert sorted(odd_values) == [-1.0, 0.0, 1.0]
    assert {complex(v) for v in np.round(rep.vector(), 12)} == {0j, 1 + 0j, -1 + 0j}


def test_calkin_norm_of_z(c3, cfg):
    assert calkin_norm(el.parse_element(c3, "z"), cfg) == pytest.approx(3.0, abs=1e-9)


def test_calkin_norm_of_unit(c3, cfg):
    assert calkin_norm(el.unit(c3), cfg) == pytest.approx(1.0, abs=1e-9)


def test_calkin_norm_polynomial(c3, cfg):
    z = el.parse_element(c3, "z")
    x = el.mul(el.sub(z, el.unit(c3)), el.sub(z, el.scale(T[0], el.unit(c3))))
    assert calkin_norm(x, cfg) == pytest.approx(2.0, abs=1e-9)


def test_calkin_norm_zero_element(c3, cfg):
    assert calkin_norm(el.zero(c3), cfg) == 0.0


def test_calkin_equal_examples(c3, cfg):
    ua_star_ua = el.parse_element(c3, "u*(e1).u(e1)")
    assert calkin_equal(ua_star_ua, el.parse_element(c3, "p(v1)"), cfg)
    # z commutes with u(e)u*(f) at matching levels
    lhs = el.parse_element(c3, "z.u(e1).u*(e1)")
    rhs = el.parse_element(c3, "u(e1).u*(e1).z")
    assert calkin_equal(lhs, rhs, cfg)
    assert not calkin_equal(el.parse_element(c3, "z"), el.unit(c3), cfg)


def test_calkin_norm_isometry_mixed_grading(c3, cfg):
    # a graded word still has norm 1: compression cannot exceed it and
    # interior levels realize it
    assert calkin_norm(el.parse_element(c3, "u(e1)"), cfg) == pytest.approx(
        1.0, abs=1e-9
    )


def test_inclusion_identity(c3, c3w, cfg):
    # u_α z^l u_β* equals the sum of its one-step expansions
    # Σ_{|γ|=p} u_{αγ} z^l u_{βγ}*
    alpha = c3.parse_path("e1")
    beta = c3.parse_path("e1")
    x = el.mul(
        el.path_isometry(c3, alpha),
        el.mul(el.parse_element(c3, "z"), el.adjoint(el.path_isometry(c3, beta))),
    )
    total = el.zero(c3)
    for gamma in c3.paths(2):
        if c3.range_of(gamma) != alpha.source:
            continue
        ag = c3.compose(alpha, gamma)
        bg = c3.compose(beta, gamma)
        term = el.mul(
            el.path_isometry(c3, ag),
            el.mul(el.parse_element(c3, "z"), el.adjoint(el.path_isometry(c3, bg))),
        )
        total = el.add(total, term)
    assert calkin_equal(x, total, cfg)


def test_unweighted_norms():
    g = corpus_graphs()["O2"]
    w = WeightSpec.unweighted(g)
    cfg = WindowConfig(weights=w)
    assert calkin_norm(el.parse_element(g, "z"), cfg) == pytest.approx(1.0, abs=1e-9)
    assert calkin_norm(el.parse_element(g, "u(e)"), cfg) == pytest.approx(1.0, abs=1e-9)
    x = el.parse_element(g, "u(e).u*(e) + u(f).u*(f)")
    assert calkin_equal(x, el.unit(g), cfg)


def test_dimension_guard_raises():
    g = corpus_graphs()["O2"]
    w = WeightSpec.unweighted(g)
    cfg = WindowConfig(weights=w, max_level_dim=2)
    with pytest.raises(WindowUnstableError, match="guard"):
        calkin_norm(el.parse_element(g, "z"), cfg)


def test_window_vector_shape(c3, c3w):
    rep = window_rep(el.unit(c3), c3w, 3, 4)
    assert rep.vector().shape == (4 * 9,)
    assert rep.vector(4, 2).shape == (2 * 9,)


# -- span helpers -------------------------------------------------------------


def test_onb_and_membership():
    rng = np.random.default_rng(3)
    rows = rng.normal(size=(3, 8)) + 1j * rng.normal(size=(3, 8))
    rows = np.vstack([rows, rows[0] + rows[1]])
    basis = win.onb(rows)
    assert basis.shape[0] == 3
    assert np.allclose(basis.conj() @ basis.T, np.eye(3), atol=1e-10)
    assert win.in_span(rows[3], basis)
    assert not win.in_span(rng.normal(size=8), basis)


def test_span_intersection():
    e = np.eye(6, dtype=np.complex128)
    a = win.onb(np.vstack([e[0], e[1], e[2]]))
    b = win.onb(np.vstack([e[2], e[3], (e[0] + e[1]) / np.sqrt(2)]))
    inter = win.span_intersect(a, b)
    assert inter.shape[0] == 2
    for row in inter:
        assert win.in_span(row, a) and win.in_span(row, b)


def test_span_intersection_empty():
    e = np.eye(4, dtype=np.complex128)
    a = win.onb(e[:1])
    b = win.onb(e[1:2])
    assert win.span_intersect(a, b).shape[0] == 0
    assert win.span_intersect(a, np.zeros((0, 4), dtype=np.complex128)).shape[0] == 0

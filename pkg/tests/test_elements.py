"""Normal form and grammar for formal quotient-algebra elements.

The ground-truth oracle is matrix evaluation: a raw letter word acts on
the graded path spaces through its product of letter matrices, and the
normalizer must preserve that action while it rewrites. Rewriting never
touches z, so syntactically distinct normal forms can still act
identically; those pairs are compared through evaluation instead.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from util import corpus_graphs, cycle_graph, cycle_weight_spec, random_diag_spec
from wck import elements as el
from wck.elements import P, U, US, Z
from wck.errors import ElementError
from wck.weights import WeightSpec
from wck.windows import word_matrix


@pytest.fixture(scope="module")
def c3():
    return cycle_graph(3)


@pytest.fixture(scope="module")
def o2():
    return corpus_graphs()["O2"]


def letters_of(g):
    pool = [(U, e) for e in range(g.n_edges)]
    pool += [(US, e) for e in range(g.n_edges)]
    pool += [(P, v) for v in range(g.n_vertices)]
    pool += [(Z, 1), (Z, -1), (Z, 2)]
    return pool


def raw_words(g, max_len=4):
    return st.lists(
        st.sampled_from(letters_of(g)), min_size=0, max_size=max_len
    ).map(tuple)


def elem_matrix(w, x, k):
    """Sum of word-matrix actions of an element's terms at level k."""
    total = 0
    for word, c in x.terms.items():
        total = total + c * word_matrix(w, word, k)
    return total


# -- normalizer vs matrix oracle ---------------------------------------------


@settings(deadline=None, max_examples=150)
@given(st.data(), st.sampled_from(["C3", "G2", "theta", "O2"]), st.integers(0, 2**31 - 1))
def test_normal_form_preserves_action(data, name, seed):
    g = corpus_graphs()[name]
    w = random_diag_spec(g, 2, 1, np.random.default_rng(seed))
    word = data.draw(raw_words(g))
    x = el.make(g, word)
    for k in range(3, 6):
        raw = word_matrix(w, word, k)
        if x.is_zero:
            assert np.allclose(raw, 0, atol=1e-12)
        else:
            assert np.allclose(raw, elem_matrix(w, x, k), atol=1e-12)


@settings(deadline=None, max_examples=100)
@given(st.data(), st.integers(0, 2**31 - 1))
def test_mul_matches_concatenation(data, seed):
    g = corpus_graphs()["G2"]
    w = random_diag_spec(g, 1, 1, np.random.default_rng(seed))
    wa = data.draw(raw_words(g, 3))
    wb = data.draw(raw_words(g, 3))
    prod = el.mul(el.make(g, wa), el.make(g, wb))
    db = el.word_offset(wb)
    for k in range(3, 5):
        raw = word_matrix(w, wa, k + db) @ word_matrix(w, wb, k)
        if prod.is_zero:
            assert np.allclose(raw, 0, atol=1e-12)
        else:
            assert np.allclose(raw, elem_matrix(w, prod, k), atol=1e-12)


# -- specific rewrite identities ----------------------------------------------


def test_isometry_relation(c3):
    x = el.mul(el.make(c3, ((US, 0),)), el.make(c3, ((U, 0),)))
    assert x == el.make(c3, ((P, 0),))  # s(e1) = v1


def test_distinct_edges_annihilate(o2):
    x = el.mul(el.make(o2, ((US, 0),)), el.make(o2, ((U, 1),)))
    assert x.is_zero


def test_projection_absorption(c3):
    u_e1 = el.make(c3, ((U, 0),))
    assert el.mul(el.make(c3, ((P, 1),)), u_e1) == u_e1  # r(e1) = v2
    assert el.mul(u_e1, el.make(c3, ((P, 0),))) == u_e1  # s(e1) = v1
    assert el.mul(el.make(c3, ((P, 2),)), u_e1).is_zero
    assert el.mul(u_e1, el.make(c3, ((P, 1),))).is_zero


def test_vertex_projections_orthogonal(c3):
    pv = el.make(c3, ((P, 0),))
    assert el.mul(pv, pv) == pv
    assert el.mul(pv, el.make(c3, ((P, 1),))).is_zero


def test_z_powers_merge(c3):
    x = el.make(c3, ((Z, 1), (Z, 2), (Z, -3)))
    assert x == el.unit(c3)
    y = el.mul(el.make(c3, ((Z, 2),)), el.make(c3, ((Z, 1),)))
    assert list(y.terms) == [((Z, 3),)]


def test_partial_isometry_word(c3):
    x = el.make(c3, ((U, 0), (US, 0), (U, 0)))
    assert x == el.make(c3, ((U, 0),))


def test_z_is_not_rewritten(c3):
    x = el.make(c3, ((P, 1), (Z, 1), (U, 0)))
    assert list(x.terms) == [((P, 1), (Z, 1), (U, 0))]


def test_path_mismatch_annihilates(c3):
    # u(e1)u(e1) needs s(e1) = r(e1), false on a 3-cycle
    assert el.make(c3, ((U, 0), (U, 0))).is_zero
    assert el.make(c3, ((U, 1), (U, 0))) == el.make(c3, ((U, 1), (U, 0)))
    assert el.make(c3, ((US, 0), (US, 1))).is_zero is False
    assert el.make(c3, ((US, 1), (US, 0))).is_zero


def test_adjoint_involution_and_products(c3):
    a = el.parse_element(c3, "u(e1).z.u*(e2) + 2*p(v1)")
    assert el.adjoint(el.adjoint(a)) == a
    b = el.parse_element(c3, "z^2 - u(e3)")
    left = el.adjoint(el.mul(a, b))
    right = el.mul(el.adjoint(b), el.adjoint(a))
    assert left == right


@settings(deadline=None, max_examples=80)
@given(st.data())
def test_mul_is_associative(data):
    g = corpus_graphs()["C3"]
    xs = [el.make(g, data.draw(raw_words(g, 3))) for _ in range(3)]
    a, b, c = xs
    assert el.mul(el.mul(a, b), c) == el.mul(a, el.mul(b, c))


def test_offsets(c3):
    assert el.offset(el.parse_element(c3, "u(e1).z.u*(e2)")) == 0
    assert el.offset(el.parse_element(c3, "u(e1).u(e3)")) == 2
    assert el.offset(el.zero(c3)) == 0
    with pytest.raises(ElementError, match="mixes grading"):
        el.offset(el.parse_element(c3, "u(e1) + z"))


def test_path_isometry(c3):
    path = c3.parse_path("e1.e2")
    x = el.path_isometry(c3, path)
    assert list(x.terms) == [((U, 1), (U, 0))]
    v = c3.paths(0)[2]
    assert el.path_isometry(c3, v) == el.make(c3, ((P, 2),))


# -- grammar ------------------------------------------------------------------


def test_parse_basic_word(c3):
    x = el.parse_element(c3, "u(e1).z^2.u*(e3)")
    assert x.terms == {((U, 0), (Z, 2), (US, 2)): 1.0 + 0j}


def test_parse_adjoint_letter(c3):
    x = el.parse_element(c3, "u*(e1)")
    assert x.terms == {((US, 0),): 1.0 + 0j}
    y = el.parse_element(c3, "2*u*(e1)")
    assert y.terms == {((US, 0),): 2.0 + 0j}


def test_parse_scalar_prefix(c3):
    x = el.parse_element(c3, "2.5*u(e1)")
    assert x.terms == {((U, 0),): 2.5 + 0j}
    y = el.parse_element(c3, "1e-3*z")
    assert y.terms == {((Z, 1),): 0.001 + 0j}


def test_parse_negative_z_power(c3):
    assert el.parse_element(c3, "z^-2").terms == {((Z, -2),): 1.0 + 0j}


def test_parse_sums_and_signs(c3):
    x = el.parse_element(c3, "u(e1) + 2*p(v2) - z^2")
    assert x.terms[((U, 0),)] == 1.0
    assert x.terms[((P, 1),)] == 2.0
    assert x.terms[((Z, 2),)] == -1.0
    assert el.parse_element(c3, "z - z").is_zero
    assert el.parse_element(c3, "-z").terms == {((Z, 1),): -1.0 + 0j}


def test_parse_unit_terms(c3):
    one = el.parse_element(c3, "1")
    assert one == el.unit(c3)
    three = el.parse_element(c3, "3")
    assert three == el.scale(3.0, el.unit(c3))
    mixed = el.parse_element(c3, "z.1.z")
    assert mixed.terms == {((Z, 2),): 1.0 + 0j}


def test_parse_integer_factor_scales(c3):
    x = el.parse_element(c3, "2.z")
    assert x.terms == {((Z, 1),): 2.0 + 0j}


def test_parse_errors(c3):
    for bad in ["", "u(nope)", "p(nope)", "q(v1)", "u(e1", "z^", "u(e1)..z", "+"]:
        with pytest.raises(ElementError):
            el.parse_element(c3, bad)


def test_render_roundtrip(c3):
    for text in [
        "u(e1).z^2.u*(e3)",
        "u(e1) + 2*p(v2) - z^2",
        "z^-1",
        "3",
        "p(v1).z.u(e1)",
    ]:
        x = el.parse_element(c3, text)
        assert el.parse_element(c3, el.element_str(x)) == x


@settings(deadline=None, max_examples=60)
@given(st.data())
def test_render_roundtrip_random(data):
    g = corpus_graphs()["theta"]
    x = el.zero(g)
    for _ in range(data.draw(st.integers(0, 3))):
        word = data.draw(raw_words(g, 3))
        coeff = data.draw(st.sampled_from([1.0, -2.0, 0.5, 1j]))
        x = el.add(x, el.make(g, word, coeff))
    assert el.parse_element(g, el.element_str(x)) == x

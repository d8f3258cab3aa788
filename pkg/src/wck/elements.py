"""Formal elements of the quotient algebra and their normal form.

An element is a complex linear combination of words over the letters

    u(e)   partial isometry of an edge e,
    u*(e)  its adjoint,
    p(v)   vertex projection,
    z      the diagonal weight operator (kept as a free letter),
    z^m    integer powers of it, including negative ones.

Words are rewritten with the defining relations of the quotient:
adjacent letters either merge, annihilate the word, or drop out, except
that z is never resolved against the graph structure; it stays a free
letter and all weight dependence enters later through evaluation.
A normalized element stores each surviving word once with its
accumulated coefficient, so syntactically different expressions of the
same combination compare equal.
"""

from __future__ import annotations

import re

from .errors import ElementError

# letter kinds
U = "u"      # u(e), payload: edge index
US = "u*"    # u*(e), payload: edge index
P = "p"      # p(v), payload: vertex index
Z = "z"      # z^m, payload: nonzero integer exponent


class CalkinElement:
    """Normalized linear combination of words over the quotient letters."""

    def __init__(self, graph, terms):
        self.graph = graph
        self.terms = dict(terms)

    def __eq__(self, other):
        return (
            isinstance(other, CalkinElement)
            and self.graph is other.graph
            and self.terms == other.terms
        )

    def __repr__(self):
        return "CalkinElement(%s)" % (element_str(self) or "0")

    @property
    def is_zero(self):
        return not self.terms


def _normalize_word(graph, word):
    """Rewrite a letter tuple to normal form; None when the word dies.

    Implemented as a left-to-right stack pass: each incoming letter is
    resolved against the top of the stack, and any replacement letters
    are pushed back through the same resolution step.
    """
    esrc, edst = graph.esrc, graph.edst
    stack = []
    pending = list(word)
    pending.reverse()
    while pending:
        letter = pending.pop()
        kind, payload = letter
        if kind == Z and payload == 0:
            continue
        if not stack:
            stack.append(letter)
            continue
        tkind, tpayload = stack[-1]
        # merge z powers
        if tkind == Z and kind == Z:
            stack.pop()
            m = tpayload + payload
            if m != 0:
                pending.append((Z, m))
            continue
        # p against p
        if tkind == P and kind == P:
            if tpayload != payload:
                return None
            continue
        # u* u -> p(s(e)) or 0
        if tkind == US and kind == U:
            if tpayload != payload:
                return None
            stack.pop()
            pending.append((P, esrc[payload]))
            continue
        # projections absorb into adjacent edge letters
        if tkind == P and kind == U:
            if edst[payload] != tpayload:
                return None
            stack.pop()
            pending.append(letter)
            continue
        if tkind == U and kind == P:
            if esrc[tpayload] != payload:
                return None
            continue
        if tkind == P and kind == US:
            if esrc[payload] != tpayload:
                return None
            stack.pop()
            pending.append(letter)
            continue
        if tkind == US and kind == P:
            if edst[tpayload] != payload:
                return None
            continue
        # range/source compatibility of edge letters
        if tkind == U and kind == U:
            if esrc[tpayload] != edst[payload]:
                return None
            stack.append(letter)
            continue
        if tkind == US and kind == US:
            if esrc[payload] != edst[tpayload]:
                return None
            stack.append(letter)
            continue
        if tkind == U and kind == US:
            if esrc[tpayload] != esrc[payload]:
                return None
            stack.append(letter)
            continue
        # z is a free letter: no structural resolution
        stack.append(letter)
    return tuple(stack)


def _accumulate(graph, terms, word, coeff):
    """Add coeff times the normalized word into a term dict.

    The empty word is the unit and is canonicalized to the sum of
    vertex projections, so the unit has a single representation.
    """
    normal = _normalize_word(graph, word)
    if normal is None or coeff == 0:
        return
    words = [normal] if normal else [((P, v),) for v in range(graph.n_vertices)]
    for wrd in words:
        c = terms.get(wrd, 0j) + coeff
        if c == 0:
            terms.pop(wrd, None)
        else:
            terms[wrd] = c


def make(graph, word, coeff=1.0):
    """Element from one letter tuple, e.g. ((U, 0), (Z, 1), (US, 2))."""
    for kind, payload in word:
        if kind in (U, US):
            if not 0 <= payload < graph.n_edges:
                raise ElementError("edge index %r out of range" % (payload,))
        elif kind == P:
            if not 0 <= payload < graph.n_vertices:
                raise ElementError("vertex index %r out of range" % (payload,))
        elif kind == Z:
            if not isinstance(payload, int):
                raise ElementError("z exponent must be an integer")
        else:
            raise ElementError("unknown letter kind %r" % (kind,))
    terms = {}
    _accumulate(graph, terms, word, complex(coeff))
    return CalkinElement(graph, terms)


def zero(graph):
    return CalkinElement(graph, {})


def unit(graph):
    """The unit Σ_v p(v)."""
    terms = {((P, v),): 1.0 + 0j for v in range(graph.n_vertices)}
    return CalkinElement(graph, terms)


def add(a, b):
    _check_same_graph(a, b)
    terms = dict(a.terms)
    for word, c in b.terms.items():
        c2 = terms.get(word, 0j) + c
        if c2 == 0:
            terms.pop(word, None)
        else:
            terms[word] = c2
    return CalkinElement(a.graph, terms)


def scale(c, a):
    if c == 0:
        return CalkinElement(a.graph, {})
    return CalkinElement(a.graph, {w: complex(c) * x for w, x in a.terms.items()})


def sub(a, b):
    return add(a, scale(-1.0, b))


def mul(a, b):
    _check_same_graph(a, b)
    terms = {}
    for wa, ca in a.terms.items():
        for wb, cb in b.terms.items():
            _accumulate(a.graph, terms, wa + wb, ca * cb)
    return CalkinElement(a.graph, terms)


def adjoint(a):
    terms = {}
    for word, c in a.terms.items():
        conj = []
        for kind, payload in reversed(word):
            if kind == U:
                conj.append((US, payload))
            elif kind == US:
                conj.append((U, payload))
            else:
                conj.append((kind, payload))
        _accumulate(a.graph, terms, tuple(conj), c.conjugate())
    return CalkinElement(a.graph, terms)


def path_isometry(graph, path):
    """u_α = u(e_1)...u(e_k) for a path α in operator order."""
    word = tuple((U, e) for e in path.edges)
    if len(path) == 0:
        word = ((P, path.source),)
    return make(graph, word)


def word_offset(word):
    """Grading offset: how many levels the word raises."""
    return sum(1 if k == U else -1 if k == US else 0 for k, _ in word)


def offset(a):
    """Common grading offset of a homogeneous element.

    The zero element reports offset 0; mixed-grading elements raise.
    """
    offsets = {word_offset(w) for w in a.terms}
    if not offsets:
        return 0
    if len(offsets) > 1:
        raise ElementError("element mixes grading offsets %s" % sorted(offsets))
    return offsets.pop()


def _check_same_graph(a, b):
    if a.graph is not b.graph:
        raise ElementError("elements live over different graphs")


# -- string grammar -----------------------------------------------------------

_FACTOR_RE = re.compile(
    r"""^(?:
        (?P<one>1) |
        (?P<z>z(?:\^(?P<zexp>-?\d+))?) |
        u\*\((?P<us>[^()]+)\) |
        u\((?P<u>[^()]+)\) |
        p\((?P<p>[^()]+)\)
    )$""",
    re.VERBOSE,
)

_NUMBER_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?[jJ]?$")


def _split_top_level(text, seps, keep_sep=False):
    """Split on separator characters, respecting parentheses and exponents.

    With keep_sep the separator starts the next part, which is how signs
    stay attached to their terms.
    """
    parts = []
    buf = []
    depth = 0
    prev = ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ElementError("unbalanced parentheses in %r" % text)
        if ch in seps and depth == 0 and prev not in ("e", "E", "^") and buf:
            stripped = "".join(buf).strip()
            # a buffer of bare signs is a sign run for the coming term,
            # not a term of its own
            if stripped and not all(c in "+-" for c in stripped):
                parts.append("".join(buf))
                buf = [ch] if keep_sep else []
                prev = ch
                continue
        buf.append(ch)
        prev = ch
    if depth != 0:
        raise ElementError("unbalanced parentheses in %r" % text)
    parts.append("".join(buf))
    return parts


_SCALAR_PREFIX_RE = re.compile(
    r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?[jJ]?)\s*\*\s*"
)


def parse_element(graph, text):
    """Parse the dotted word grammar.

    Terms are separated by top-level + and -; factors within a term by
    dots. Factors are u(edge), u*(edge), p(vertex), z, z^m (integer m,
    negative allowed), or 1. A term may carry scalar prefixes glued with
    '*' as in "2.5*u(e1)"; a term that is just a number is a multiple of
    the unit. Decimal scalars must use the '*' form, since a dot inside
    a term separates factors.
    """
    text = text.strip()
    if not text:
        raise ElementError("empty element string")
    result = CalkinElement(graph, {})
    for chunk in _split_top_level(text, "+-", keep_sep=True):
        chunk = chunk.strip()
        if not chunk:
            raise ElementError("empty term in %r" % text)
        sign = 1.0
        while chunk and chunk[0] in "+-":
            if chunk[0] == "-":
                sign = -sign
            chunk = chunk[1:].strip()
        if not chunk:
            raise ElementError("dangling sign in %r" % text)
        result = add(result, _parse_term(graph, chunk, sign))
    return result


def _parse_term(graph, chunk, sign):
    coeff = complex(sign)
    m = _SCALAR_PREFIX_RE.match(chunk)
    while m:
        coeff *= complex(m.group(1))
        chunk = chunk[m.end():].strip()
        m = _SCALAR_PREFIX_RE.match(chunk)
    if not chunk:
        raise ElementError("scalar prefix without a factor")
    if _NUMBER_RE.match(chunk):
        return scale(coeff * complex(chunk), unit(graph))
    word = []
    for factor in _split_top_level(chunk, "."):
        factor = factor.strip()
        if not factor:
            raise ElementError("empty factor in %r" % chunk)
        if _NUMBER_RE.match(factor):
            coeff *= _parse_number(factor)
            continue
        m = _FACTOR_RE.match(factor)
        if not m:
            raise ElementError("cannot parse factor %r" % factor)
        if m.group("one"):
            continue
        if m.group("z"):
            exp = int(m.group("zexp") or 1)
            word.append((Z, exp))
        elif m.group("u") is not None:
            word.append((U, _edge_index(graph, m.group("u"))))
        elif m.group("us") is not None:
            word.append((US, _edge_index(graph, m.group("us"))))
        elif m.group("p") is not None:
            word.append((P, _vertex_index(graph, m.group("p"))))
    if not word:
        return scale(coeff, unit(graph))
    return make(graph, tuple(word), coeff)


def _parse_number(text):
    if not _NUMBER_RE.match(text):
        raise ElementError("cannot parse scalar %r" % text)
    return complex(text)


def _edge_index(graph, name):
    name = name.strip()
    for i, e in enumerate(graph.edges):
        if e.name == name:
            return i
    raise ElementError("unknown edge %r" % name)


def _vertex_index(graph, name):
    name = name.strip()
    for i, v in enumerate(graph.vertices):
        if v == name:
            return i
    raise ElementError("unknown vertex %r" % name)


def _fmt_scalar(x):
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def element_str(a):
    """Render an element back into the dotted grammar.

    A coefficient with both real and imaginary parts becomes two terms
    over the same word, since scalars in the grammar are real or purely
    imaginary; parsing re-adds them.
    """
    if not a.terms:
        return "0"
    pieces = []
    for word in sorted(a.terms, key=_word_sort_key):
        c = a.terms[word]
        factors = []
        for kind, payload in word:
            if kind == U:
                factors.append("u(%s)" % a.graph.edges[payload].name)
            elif kind == US:
                factors.append("u*(%s)" % a.graph.edges[payload].name)
            elif kind == P:
                factors.append("p(%s)" % a.graph.vertices[payload])
            else:
                factors.append("z" if payload == 1 else "z^%d" % payload)
        body = ".".join(factors) if factors else "1"
        if c.real != 0:
            mag = abs(c.real)
            prefix = body if mag == 1 and factors else "%s*%s" % (_fmt_scalar(mag), body)
            pieces.append((c.real < 0, prefix))
        if c.imag != 0:
            mag = abs(c.imag)
            pieces.append((c.imag < 0, "%sj*%s" % (_fmt_scalar(mag), body)))
    out = []
    for i, (neg, text) in enumerate(pieces):
        if i == 0:
            out.append("-" + text if neg else text)
        else:
            out.append((" - " if neg else " + ") + text)
    return "".join(out)


def _word_sort_key(word):
    return (len(word), word)

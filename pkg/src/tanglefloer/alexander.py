"""
Graded Alexander polynomials of tangles from Kauffman states.

Conventions: whole powers throughout.  A colour variable x here stands for
the square of the variable in the usual normalisation, so ``nabla`` returns
N(x) = nabla(x^2).  The δ exponent is stored doubled so that every stored
exponent is an integer; ``h`` has its own exponent.
"""

from __future__ import annotations

from fractions import Fraction
from collections import defaultdict

from .diagram import DiagramError
from .states import enumerate_states, site_word

H = 'h'
DELTA = 'δ'


def _var_key(name):
    return (name == DELTA, name == H, name)


class GradedPoly:
    """Sparse Laurent polynomial with integer coefficients.

    Terms are stored as {monomial: coefficient}, a monomial being a sorted
    tuple of (variable, exponent) pairs with nonzero exponents.  For the
    variable ``δ`` the stored exponent is twice the actual one.
    """

    __slots__ = ('terms',)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for mono, c in terms.items():
                if c:
                    mono = _canon(mono)
                    clean[mono] = clean.get(mono, 0) + c
                    if not clean[mono]:
                        del clean[mono]
        self.terms = clean

    @classmethod
    def monomial(cls, exps=None, coeff=1, **kw):
        exps = dict(exps or {})
        exps.update(kw)
        return cls({tuple(exps.items()): coeff})

    @classmethod
    def one(cls):
        return cls({(): 1})

    @classmethod
    def zero(cls):
        return cls()

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, 0) + c
        return GradedPoly(t)

    __radd__ = __add__

    def __neg__(self):
        return GradedPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        t = defaultdict(int)
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                t[_mono_mul(m1, m2)] += c1 * c2
        return GradedPoly(t)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            if len(self.terms) != 1:
                raise ValueError('only monomials can be inverted')
            (m, c), = self.terms.items()
            if c not in (1, -1):
                raise ValueError('coefficient not a unit')
            return GradedPoly({tuple((v, -e) for v, e in m): c}) ** (-n)
        result = GradedPoly.one()
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = _coerce(other)
        return isinstance(other, GradedPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    # -- inspection ---------------------------------------------------------
    def variables(self):
        return sorted({v for m in self.terms for v, _ in m}, key=_var_key)

    def colours(self):
        return [v for v in self.variables() if v not in (H, DELTA)]

    def items(self):
        """Terms in canonical order."""
        return sorted(self.terms.items(), key=lambda t: _order_key(t[0]))

    def exponent(self, mono, var):
        return dict(mono).get(var, 0)

    # -- substitution -------------------------------------------------------
    def subs(self, values):
        """Substitute variables by GradedPolys or ints (monomials may be inverted)."""
        result = GradedPoly()
        cache = {}
        for m, c in self.terms.items():
            term = GradedPoly.monomial({v: e for v, e in m if v not in values}, c)
            for v, e in m:
                if v in values:
                    key = (v, e)
                    if key not in cache:
                        cache[key] = _power(_coerce(values[v]), e)
                    term = term * cache[key]
            result = result + term
        return result

    def rename(self, mapping):
        """Rename variables (merging them if two map to the same name)."""
        t = defaultdict(int)
        for m, c in self.terms.items():
            exps = defaultdict(int)
            for v, e in m:
                exps[mapping.get(v, v)] += e
            t[tuple(exps.items())] += c
        return GradedPoly(t)

    def scale_exponents(self, var, factor):
        t = {}
        for m, c in self.terms.items():
            t[tuple((v, e * factor if v == var else e) for v, e in m)] = c
        return GradedPoly(t)

    def drop(self, *names):
        """Forget variables (set them to 1)."""
        return self.subs({v: 1 for v in names})

    def leading(self, names=None):
        """Largest term in the lex order on dense exponent vectors over ``names``."""
        names = sorted(self.variables(), key=_var_key) if names is None else names
        m = max(self.terms, key=lambda mono: _dense(mono, names))
        return m, self.terms[m]

    def normalised(self, names=None):
        """Divide by the leading monomial and its sign (unit normalisation)."""
        if not self.terms:
            return self
        m, c = self.leading(names)
        sign = 1 if c > 0 else -1
        inv = GradedPoly({tuple((v, -e) for v, e in m): sign})
        return self * inv

    def equal_up_to_unit(self, other):
        other = _coerce(other)
        names = sorted(set(self.variables()) | set(other.variables()), key=_var_key)
        return self.normalised(names) == other.normalised(names)

    def equal_up_to_sign(self, other):
        other = _coerce(other)
        return self == other or self == -other

    # -- text ---------------------------------------------------------------
    def __str__(self):
        if not self.terms:
            return '0'
        return ' + '.join(format_term(m, c) for m, c in self.items()).replace('+ -', '- ')

    def __repr__(self):
        return 'GradedPoly({})'.format(self)


def _canon(mono):
    acc = defaultdict(int)
    for v, e in mono:
        acc[v] += e
    return tuple(sorted(((v, e) for v, e in acc.items() if e), key=lambda t: _var_key(t[0])))


def _dense(mono, names):
    e = dict(mono)
    return tuple(e.get(v, 0) for v in names)


def _mono_mul(m1, m2):
    return _canon(m1 + m2)


def _order_key(mono):
    return tuple((_var_key(v), e) for v, e in mono)


def _coerce(x):
    if isinstance(x, GradedPoly):
        return x
    if isinstance(x, int):
        return GradedPoly({(): x})
    raise TypeError('cannot use {!r} as a polynomial'.format(x))


def _power(p, e):
    return p ** e


def format_term(mono, coeff):
    parts = []
    for v, e in mono:
        if v == DELTA:
            parts.append('δ^{{{}/2}}'.format(e) if e % 2 else 'δ^{}'.format(e // 2))
        else:
            parts.append(v if e == 1 else '{}^{}'.format(v, e))
    if not parts:
        return str(coeff)
    if coeff == 1:
        return ' * '.join(parts)
    if coeff == -1:
        return '-' + ' * '.join(parts)
    return '{} * {}'.format(coeff, ' * '.join(parts))


# ---------------------------------------------------------------------------
# Alexander codes and the state sum

def label_of(d, crossing, quadrant):
    """Alexander code of a quadrant (1-based) at a crossing.

    o, u are the over and under colours; they may coincide, so exponents
    are accumulated rather than assigned.
    """
    c = d.crossings[crossing]
    o, u = c.over, c.under
    if c.positive:
        codes = ([(o, 1), (u, 1), (DELTA, 1)],
                 [(o, 1), (u, -1)],
                 [(H, -1), (o, -1), (u, -1), (DELTA, 1)],
                 [(o, -1), (u, 1)])
    else:
        codes = ([(o, -1), (u, -1), (DELTA, -1)],
                 [(o, 1), (u, -1)],
                 [(H, 1), (o, 1), (u, 1), (DELTA, -1)],
                 [(o, -1), (u, 1)])
    return GradedPoly({tuple(codes[quadrant - 1]): 1})


def state_monomial(d, x):
    result = GradedPoly.one()
    for i, k in enumerate(x.markers):
        result = result * label_of(d, i, k)
    return result


def nabla_hat(d, states=None):
    """Site -> sum of state monomials (with h and δ)."""
    states = enumerate_states(d) if states is None else states
    out = {}
    for site, xs in states.items():
        total = GradedPoly()
        for x in xs:
            total = total + state_monomial(d, x)
        out[site] = total
    return out


def specialise(poly):
    """h = -1, δ = 1."""
    return poly.subs({H: -1, DELTA: 1})


def nabla(d, site, states=None):
    """N(x) = nabla(x^2) at ``site`` (h = -1, δ = 1)."""
    site = frozenset(site)
    table = nabla_hat(d, states)
    return specialise(table.get(site, GradedPoly()))


def nabla_all(d, states=None):
    return {s: specialise(p) for s, p in nabla_hat(d, states).items()}


def generator_table(d, states=None):
    """One row (site word, state word, monomial) per Kauffman state."""
    states = enumerate_states(d) if states is None else states
    rows = []
    for site, xs in states.items():
        for x in xs:
            rows.append((site_word(site), x.word(d), state_monomial(d, x)))
    return rows


def generator_table_tsv(d):
    lines = ['site\tstate\tmonomial']
    for s, w, m in generator_table(d):
        lines.append('{}\t{}\t{}'.format(s, w, m))
    return '\n'.join(lines) + '\n'


def linking_number(d, c1, c2):
    """Half the signed count of crossings between the two colours."""
    colours = set(d.colours)
    for c in (c1, c2):
        if c not in colours:
            raise DiagramError('unknown colour {}'.format(c))
    if c1 == c2:
        raise DiagramError('linking number needs two different colours')
    total = 0
    for c in d.crossings:
        if {c.over, c.under} == {c1, c2}:
            total += 1 if c.positive else -1
    return Fraction(total, 2)


def total_linking(d, colour):
    return sum((linking_number(d, colour, c) for c in d.colours if c != colour), Fraction(0))


# ---------------------------------------------------------------------------
# determinant oracle

def alexander_matrix(d, site):
    """Regions x crossings matrix (sympy) restricted to the closed regions and ``site``.

    Column of a positive crossing: o^-1 on the two quadrants to the right
    of the over strand (3 and 4), 1 on the other two; for a negative
    crossing the over strand runs the other diagonal, so the o^-1 entries
    sit in quadrants 4 and 1.
    """
    import sympy
    site = set(site)
    rows = [r for r in d.regions if r in site or r not in d.open_regions]
    syms = {c: sympy.Symbol(c) for c in d.colours}
    mat = sympy.zeros(len(rows), len(d.crossings))
    index = {r: i for i, r in enumerate(rows)}
    for j, c in enumerate(d.crossings):
        o = syms[c.over]
        right = (2, 3) if c.positive else (3, 0)
        for k, r in enumerate(c.quadrants):
            if r in index:
                mat[index[r], j] += o ** -1 if k in right else 1
    return mat, syms


def nabla_via_determinant(d, site):
    """Determinant of the reduced Alexander matrix, in whole-power variables.

    The matrix variable t corresponds to x^4 here, so the result is
    comparable with ``nabla(d, site)`` up to a signed monomial.
    """
    import sympy
    mat, syms = alexander_matrix(d, site)
    if mat.rows != mat.cols:
        raise DiagramError('matrix is {}x{} after restricting to the site; '
                           'wrong site size or non-disc face'.format(mat.rows, mat.cols))
    det = sympy.expand(mat.det(method='berkowitz'))
    return _from_sympy(det, syms, power=4)


def _from_sympy(expr, syms, power=1):
    import sympy
    if expr == 0:
        return GradedPoly()
    names = list(syms)
    gens = [syms[n] for n in names]
    # clear denominators by a monomial, then read off the polynomial
    num, den = sympy.fraction(sympy.together(expr))
    pnum = sympy.Poly(sympy.expand(num), *gens)
    pden = sympy.Poly(sympy.expand(den), *gens)
    if len(pden.terms()) != 1:
        raise ValueError('denominator is not a monomial')
    (dexp, dcoef), = pden.terms()
    terms = {}
    for exps, coef in pnum.terms():
        c = sympy.Rational(coef, dcoef)
        if c.q != 1:
            raise ValueError('non-integer coefficient')
        mono = tuple((n, (e - de) * power) for n, e, de in zip(names, exps, dexp))
        terms[mono] = int(c)
    return GradedPoly(terms)


# ---------------------------------------------------------------------------
# text grid

def render_grid(poly, colours):
    """Arrange the monomials of ``poly`` in a grid indexed by two colours.

    Rows follow the first colour, columns the second; every cell lists
    coefficient and δ exponents of its terms.  The origin cell is wrapped
    in brackets.
    """
    c1, c2 = colours
    extra = [v for v in poly.colours() if v not in (c1, c2)]
    if extra:
        raise ValueError('polynomial has more than two colours: {}'.format(', '.join(extra)))
    if not poly:
        return ''
    cells = defaultdict(list)
    for m, c in poly.items():
        e = dict(m)
        key = (e.get(c1, 0), e.get(c2, 0))
        bits = []
        if e.get(H):
            bits.append('h{}'.format(e[H]))
        if DELTA in e:
            bits.append('δ{}'.format(_half(e[DELTA])))
        text = '{}{}'.format(c if c != 1 else '', ''.join(bits) or ('1' if c == 1 else ''))
        cells[key].append(text)
    rows = sorted({k[0] for k in cells})
    cols = sorted({k[1] for k in cells})
    rows = list(range(rows[0], rows[-1] + 1))
    cols = list(range(cols[0], cols[-1] + 1))
    table = [['{}\\{}'.format(c1, c2)] + [str(c) for c in cols]]
    for r in rows:
        line = [str(r)]
        for c in cols:
            txt = ','.join(cells.get((r, c), []))
            if (r, c) == (0, 0):
                txt = '[' + (txt or ' ') + ']'
            line.append(txt or '.')
        table.append(line)
    width = max(len(x) for row in table for x in row)
    return '\n'.join(' '.join(x.rjust(width) for x in row) for row in table) + '\n'


def _half(e):
    return str(e // 2) if e % 2 == 0 else '{}/2'.format(e)


__all__ = ['GradedPoly', 'H', 'DELTA', 'label_of', 'state_monomial', 'nabla_hat', 'nabla',
           'nabla_all', 'specialise', 'generator_table', 'generator_table_tsv',
           'linking_number', 'total_linking', 'alexander_matrix', 'nabla_via_determinant',
           'render_grid', 'format_term']

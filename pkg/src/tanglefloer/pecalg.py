"""
The peculiar algebra: an F2 path algebra on the 4-cycle quiver with arrows
p_i: i -> i-1 and q_i: i-1 -> i, subject to p_i q_i = 0 = q_i p_i.

Basis elements are integer intervals [t0, t1] up to shifting both ends by a
multiple of 4.  [t, t] is the idempotent of site t mod 4 (a=1, b=2, c=3,
d=4); a decreasing interval is a product of p's, an increasing one a
product of q's.  Products are written in path order: ``a * b`` means
"first a, then b" and is nonzero only when a ends where b starts and the
two run in the same direction.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import NamedTuple

SITES = 'abcd'


def _mod4(t):
    return (t - 1) % 4 + 1


class Path(NamedTuple):
    """A basis interval [t0, t1] with t0 normalised into 1..4."""
    t0: int
    t1: int

    @classmethod
    def make(cls, t0, t1):
        shift = _mod4(t0) - t0
        return cls(t0 + shift, t1 + shift)

    @property
    def source(self):
        return self.t0

    @property
    def target(self):
        return _mod4(self.t1)

    @property
    def length(self):
        return abs(self.t1 - self.t0)

    @property
    def kind(self):
        if self.t1 < self.t0:
            return 'p'
        if self.t1 > self.t0:
            return 'q'
        return 'i'

    def is_idempotent(self):
        return self.t0 == self.t1

    def letters(self):
        """Single-letter factors in path order, e.g. p214 -> (p2, p1, p4)."""
        if self.t1 < self.t0:
            return tuple(('p', _mod4(t)) for t in range(self.t0, self.t1, -1))
        return tuple(('q', _mod4(t)) for t in range(self.t0 + 1, self.t1 + 1))

    def punctures(self):
        return tuple(i for _, i in self.letters())

    def delta(self):
        return Fraction(self.length, 2)

    def __mul__(self, other):
        if _mod4(self.t1) != other.t0:
            return None
        if (self.t1 - self.t0) * (other.t1 - other.t0) < 0:
            return None
        return Path.make(self.t0, self.t1 + other.t1 - other.t0)

    def __str__(self):
        if self.is_idempotent():
            return 'i{}'.format(self.t0)
        return self.kind + ''.join(str(i) for _, i in self.letters())

    def __repr__(self):
        return 'Path({})'.format(self)


def idem(i):
    return Path.make(i, i)


def p(i):
    return Path.make(i, i - 1)


def q(i):
    return Path.make(i - 1, i)


_PATH_RE = re.compile(r'^(?:([pq])([1-4]+)|i([1-4]))$')


def parse_path(text):
    """Inverse of ``str(path)``: 'p214', 'q341', 'i3'."""
    m = _PATH_RE.match(text.strip())
    if not m:
        raise ValueError('not a path: {!r}'.format(text))
    if m.group(3):
        return idem(int(m.group(3)))
    kind, digits = m.group(1), [int(c) for c in m.group(2)]
    step = -1 if kind == 'p' else 1
    for a, b in zip(digits, digits[1:]):
        if _mod4(a + step) != b:
            raise ValueError('indices of {!r} are not consecutive'.format(text))
    if kind == 'p':
        return Path.make(digits[0], digits[0] - len(digits))
    return Path.make(digits[0] - 1, digits[0] - 1 + len(digits))


def _path_key(a):
    return ({'i': 0, 'p': 1, 'q': 2}[a.kind], a.t0, a.length)


class Element:
    """F2-linear combination of basis paths (a set of paths)."""

    __slots__ = ('paths',)

    def __init__(self, paths=()):
        if isinstance(paths, Path):
            paths = (paths,)
        acc = set()
        for a in paths:
            acc ^= {a}
        self.paths = frozenset(acc)

    @classmethod
    def parse(cls, text):
        text = text.strip()
        if text in ('', '0'):
            return cls()
        return cls(parse_path(t) for t in text.split('+'))

    def __add__(self, other):
        return Element(self.paths ^ _as_element(other).paths)

    __radd__ = __add__

    def __mul__(self, other):
        return multiply(self, other)

    def __eq__(self, other):
        if isinstance(other, (Path, Element)) or other == 0:
            return self.paths == _as_element(other).paths
        return NotImplemented

    def __hash__(self):
        return hash(self.paths)

    def __bool__(self):
        return bool(self.paths)

    def __iter__(self):
        return iter(sorted(self.paths, key=_path_key))

    def __len__(self):
        return len(self.paths)

    def __contains__(self, a):
        return a in self.paths

    def restrict(self, i=None, j=None):
        """iota_i . self . iota_j"""
        return Element(a for a in self.paths
                       if (i is None or a.source == i) and (j is None or a.target == j))

    def has_idempotent(self):
        return any(a.is_idempotent() for a in self.paths)

    def __str__(self):
        return '+'.join(str(a) for a in self) or '0'

    def __repr__(self):
        return 'Element({})'.format(self)


def _as_element(x):
    if isinstance(x, Element):
        return x
    if isinstance(x, Path):
        return Element((x,))
    if x == 0:
        return Element()
    raise TypeError('cannot use {!r} as an algebra element'.format(x))


def multiply(a, b):
    """Bilinear product in path order."""
    out = set()
    for x in _as_element(a).paths:
        for y in _as_element(b).paths:
            z = x * y
            if z is not None:
                out ^= {z}
    return Element(out)


def basis(max_length):
    """All basis paths of length at most ``max_length``."""
    out = []
    for i in range(1, 5):
        out.append(idem(i))
        for n in range(1, max_length + 1):
            out.append(Path.make(i, i - n))
            out.append(Path.make(i, i + n))
    return out


def paths_between(i, j, max_length):
    return [a for a in basis(max_length) if a.source == i and a.target == j]


def curvature():
    """p^4 + q^4: the eight cycles of length 4."""
    return Element([Path.make(i, i - 4) for i in range(1, 5)]
                   + [Path.make(i, i + 4) for i in range(1, 5)])


def unit():
    return Element(idem(i) for i in range(1, 5))


class PunctureOrientation:
    """Colour and in/out label of each of the four punctures.

    Puncture i sits between sites i-1 and i (puncture 1 between d and a).
    """

    def __init__(self, labels):
        self.labels = {i: (c, bool(inc)) for i, (c, inc) in dict(labels).items()}
        if sorted(self.labels) != [1, 2, 3, 4]:
            raise ValueError('need labels for punctures 1..4')
        balance = {}
        for c, inc in self.labels.values():
            balance[c] = balance.get(c, 0) + (1 if inc else -1)
        if any(balance.values()):
            raise ValueError('each colour needs as many ins as outs')

    @classmethod
    def parse(cls, text):
        """'p+,q-,q+,p-': colour then + (in) or - (out), punctures 1..4."""
        parts = [t.strip() for t in text.split(',')]
        if len(parts) != 4 or any(t[-1] not in '+-' for t in parts):
            raise ValueError('orientation must look like p+,q-,q+,p-')
        return cls({i + 1: (t[:-1], t[-1] == '+') for i, t in enumerate(parts)})

    @classmethod
    def from_diagram(cls, d):
        """Read off the boundary of a 4-ended diagram; sites are the open
        regions in their listed order."""
        ends = d.boundary()
        if len(ends) != 4:
            raise ValueError('need a 4-ended diagram')
        # boundary position k sits between sites k and k+1, i.e. at puncture k+2
        return cls({(k + 1) % 4 + 1: (e.colour, e.incoming) for k, e in enumerate(ends)})

    @property
    def colours(self):
        return tuple(sorted({c for c, _ in self.labels.values()}))

    def collapse(self, colour='t'):
        return PunctureOrientation({i: (colour, inc) for i, (c, inc) in self.labels.items()})

    def __eq__(self, other):
        return isinstance(other, PunctureOrientation) and self.labels == other.labels

    def __str__(self):
        return ','.join('{}{}'.format(c, '+' if inc else '-')
                        for _, (c, inc) in sorted(self.labels.items()))

    def __repr__(self):
        return 'PunctureOrientation({})'.format(self)


def alexander(a, po):
    """Alexander grading of a basis path as {colour: int}."""
    out = {}
    for _, i in a.letters():
        c, inc = po.labels[i]
        out[c] = out.get(c, 0) + (1 if inc else -1)
    return {c: v for c, v in out.items() if v}


def gradings(a, po):
    """(delta, Alexander) of a basis path."""
    return a.delta(), alexander(a, po)


def homological(a, po):
    """h = A/2 - delta with the colours identified."""
    return Fraction(sum(alexander(a, po).values()), 2) - a.delta()


__all__ = ['SITES', 'Path', 'Element', 'idem', 'p', 'q', 'parse_path', 'multiply', 'basis',
           'paths_between', 'curvature', 'unit', 'PunctureOrientation', 'alexander',
           'gradings', 'homological']

"""
Closing 4-ended tangles: the closing type A structure, the box tensor
product with a peculiar module, F2 homology, and the lazy closure obtained
by setting algebra letters to 0 or 1.

Closing at site a (or c) joins the ends at punctures 1, 2 and at 3, 4;
closing at b (or d) joins 2, 3 and 4, 1.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from typing import NamedTuple

from . import f2
from .pecalg import SITES, Element, Path, parse_path, alexander as path_alexander
from .pecmod import (ModuleError, PecModule, cancel_all_identities, has_identity_arrows,
                     homological_grading, site_index)
from .alexander import GradedPoly


class PairingError(ValueError):
    pass


# closing type A structure at site a, as (source, label sequence, target)
_CLOSING_A = [
    ('b2', (), 'b1'),
    ('b2', ('p21', 'q12'), 'b1'),
    ('a1', ('q2',), 'b1'),
    ('a2', ('p1', 'q12'), 'b1'),
    ('a2', ('p1', 'q1'), 'a1'),
    ('b2', ('p21', 'q1'), 'a1'),
    ('b2', ('p2',), 'a2'),
]


class TypeAStructure:
    """Strictly unital type A structure with finitely many actions.

    ``actions`` maps (generator, tuple of basis paths) to a frozenset of
    generators; the empty sequence is the differential.  Sequences are read
    left to right along the path, starting at the generator's idempotent.
    Identity actions are implicit.
    """

    def __init__(self, generators, actions):
        self.generators = dict(generators)
        acc = defaultdict(set)
        for (x, seq), targets in actions.items():
            for y in targets:
                acc[(x, tuple(seq))] ^= {y}
        self.actions = {k: frozenset(v) for k, v in acc.items() if v}
        for (x, seq), targets in self.actions.items():
            at = self.generators[x]
            for a in seq:
                if a.source != at:
                    raise PairingError('action on {} by {} breaks idempotents'.format(
                        x, ','.join(map(str, seq))))
                at = a.target
            for y in targets:
                if self.generators[y] != at:
                    raise PairingError('action on {} by {} ends at the wrong idempotent'.format(
                        x, ','.join(map(str, seq))))

    @property
    def max_length(self):
        return max((len(seq) for _, seq in self.actions), default=0)

    def action_list(self):
        return sorted(((x, seq, y) for (x, seq), ys in self.actions.items() for y in ys),
                      key=lambda t: (t[0], len(t[1]), tuple(map(str, t[1])), t[2]))

    def __str__(self):
        lines = []
        for x, seq, y in self.action_list():
            lines.append('{}; {} -> {}'.format(x, ','.join(map(str, seq)) or '-', y))
        return '\n'.join(lines)


def _shift_path(a, k):
    return Path.make(a.t0 + k, a.t1 + k)


def closing_type_a(site):
    """The closing structure C(site).  Other sites are obtained from site a
    by shifting every index."""
    k = site_index(site) - 1
    letter = lambda g: SITES[(SITES.index(g[0]) + k) % 4] + g[1:]
    gens = {}
    for g in ('a1', 'a2', 'b1', 'b2'):
        gens[letter(g)] = (SITES.index(g[0]) + k) % 4 + 1
    actions = defaultdict(set)
    for x, seq, y in _CLOSING_A:
        actions[(letter(x), tuple(_shift_path(parse_path(t), k) for t in seq))].add(letter(y))
    return TypeAStructure(gens, actions)


def joined_punctures(site):
    """The two pairs of punctures joined when closing at ``site``."""
    k = site_index(site)
    if k in (1, 3):
        return ((1, 2), (3, 4))
    return ((2, 3), (4, 1))


def closure_colours(po, site):
    """Map each colour of ``po`` to the colour of its closed component
    (joined colours take the smallest name)."""
    parent = {c: c for c in po.colours}

    def find(c):
        while parent[c] != c:
            c = parent[c]
        return c

    for i, j in joined_punctures(site):
        a, b = find(po.labels[i][0]), find(po.labels[j][0])
        if a != b:
            parent[max(a, b)] = min(a, b)
    return {c: find(c) for c in parent}


def closure_components(po, site):
    """Number of closed components made by closing at ``site``, if the
    colours determine how the strands run (two distinct colours)."""
    if len(po.colours) != 2:
        return None
    return len(set(closure_colours(po, site).values()))


def stabilisation_exponent(po, site):
    """i with CFL(L) ⊗ V^i: 1 if closing creates one component, 0 if two."""
    n = closure_components(po, site)
    return None if n is None else (1 if n == 1 else 0)


class ChainComplexF2:
    """Finite chain complex over F2.

    ``gradings`` maps each generator to (Alexander tuple, homological
    grading) or is None for an ungraded complex; the differential lowers the
    homological grading by one and preserves the Alexander grading.
    """

    def __init__(self, generators, differential, gradings=None):
        self.generators = list(generators)
        self.differential = {x: frozenset(differential.get(x, ())) for x in self.generators}
        self.gradings = gradings
        self._check()

    def _check(self):
        for x in self.generators:
            twice = set()
            for y in self.differential[x]:
                twice ^= set(self.differential[y])
            if twice:
                raise PairingError('∂² is nonzero at {}'.format(x))
        if self.gradings is not None:
            for x in self.generators:
                ax, hx = self.gradings[x]
                for y in self.differential[x]:
                    ay, hy = self.gradings[y]
                    if ax != ay or hy != hx - 1:
                        raise PairingError('differential {} -> {} is not homogeneous'.format(x, y))

    def __len__(self):
        return len(self.generators)

    def n_arrows(self):
        return sum(len(v) for v in self.differential.values())

    def euler_characteristic(self):
        """Sum of (-1)^h times the Alexander monomial (exponents as stored)."""
        if self.gradings is None:
            raise PairingError('Euler characteristic needs a graded complex')
        total = GradedPoly()
        for x in self.generators:
            a, h = self.gradings[x]
            total = total + GradedPoly.monomial(dict(a), -1 if h % 2 else 1)
        return total

    def to_dot(self, name='complex'):
        lines = ['digraph "{}" {{'.format(name)]
        for x in self.generators:
            lines.append('  "{}";'.format(x))
        for x in self.generators:
            for y in sorted(self.differential[x], key=self.generators.index):
                lines.append('  "{}" -> "{}";'.format(x, y))
        lines.append('}')
        return '\n'.join(lines) + '\n'


def homology(C):
    """Ranks of homology: {(Alexander, h): rank} for graded complexes,
    {(): rank} otherwise.  Zero entries are left out."""
    if C.gradings is None:
        groups = {(): list(C.generators)}
    else:
        groups = defaultdict(list)
        for x in C.generators:
            groups[C.gradings[x]].append(x)
    index = {x: k for k, x in enumerate(C.generators)}

    def rank_from(sources):
        return f2.rank(sum(1 << index[y] for y in C.differential[x]) for x in sources)

    ranks = {g: rank_from(xs) for g, xs in groups.items()}
    out = {}
    for g, xs in groups.items():
        if C.gradings is None:
            r = len(xs) - 2 * ranks[g]
        else:
            a, h = g
            incoming = ranks.get((a, h + 1), 0)
            r = len(xs) - ranks[g] - incoming
        if r:
            out[g] = r
    return out


def total_rank(ranks):
    return sum(ranks.values())


def rank_table_tsv(ranks, colours=None):
    """Rows: Alexander exponents, 2δ, rank.  δ = A/2 - h with A summed over
    colours in the half-integer convention."""
    if not ranks:
        return ''
    if () in ranks:
        return 'rank\n{}\n'.format(ranks[()])
    colours = colours or sorted({c for (a, _h) in ranks for c, _ in a})
    lines = ['\t'.join(list(colours) + ['2delta', 'rank'])]
    for (a, h), r in sorted(ranks.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        ad = dict(a)
        # stored exponents are twice the half-integer Alexander grading
        two_delta = Fraction(sum(ad.values()), 2) - 2 * h
        lines.append('\t'.join([str(ad.get(c, 0)) for c in colours] + [str(two_delta), str(r)]))
    return '\n'.join(lines) + '\n'


def _type_a_gradings(A, po, rename):
    """Relative gradings of A's generators: Alexander per closed component
    and homological, from A(y) = A(x) + Σ A(a_i) and
    h(y) = h(x) - 1 + k + Σ h(a_i).  None if inconsistent."""
    def path_grading(a):
        al = defaultdict(Fraction)
        for c, v in path_alexander(a, po).items():
            al[rename[c]] += v
        h = Fraction(sum(al.values()), 2) - a.delta()
        return al, h

    edges = defaultdict(list)
    for x, seq, y in A.action_list():
        da = defaultdict(Fraction)
        dh = Fraction(len(seq) - 1)
        for a in seq:
            al, h = path_grading(a)
            for c, v in al.items():
                da[c] += v
            dh += h
        edges[x].append((y, dict(da), dh))
        edges[y].append((x, {c: -v for c, v in da.items()}, -dh))
    grades = {}
    for start in sorted(A.generators):
        if start in grades:
            continue
        grades[start] = ({}, Fraction(0))
        todo = [start]
        while todo:
            x = todo.pop()
            ax, hx = grades[x]
            for y, da, dh in edges[x]:
                ay = dict(ax)
                for c, v in da.items():
                    ay[c] = ay.get(c, 0) + v
                ay = {c: v for c, v in ay.items() if v}
                if y in grades:
                    if grades[y] != (ay, hx + dh):
                        return None
                else:
                    grades[y] = (ay, hx + dh)
                    todo.append(y)
    return grades


def _alex_key(a):
    """Store Alexander gradings as doubled integer exponents."""
    out = []
    for c, v in sorted(a.items()):
        e = 2 * Fraction(v)
        if e:
            out.append((c, int(e)))
    return tuple(out)


def box_tensor(A, D, site=None):
    """A ⊠ D as a chain complex.

    Generators are pairs (x, v) with matching idempotents, named 'x|v'.
    The component (x, v) -> (y, w) counts, mod 2, pairs of an action of x
    by a sequence (a_1, ..., a_k) landing on y and a path v -> ... -> w in D
    whose i-th arrow label contains a_i.  ``site`` (the closing site) is
    needed to merge colours in the gradings.
    """
    if has_identity_arrows(D):
        raise PairingError('the module has identity arrows; cancel them first')
    by_path = defaultdict(lambda: defaultdict(list))
    for (s, t), lab in D.arrows.items():
        for a in lab:
            by_path[s][a].append(t)
    gens = []
    for x, i in sorted(A.generators.items()):
        for g in D.generators:
            if g.site == i:
                gens.append((x, g.name))
    name = lambda x, v: '{}|{}'.format(x, v)
    diff = defaultdict(set)
    for (x, v) in gens:
        for (ax, seq), ys in A.actions.items():
            if ax != x:
                continue
            ends = defaultdict(int)
            ends[v] = 1
            for a in seq:
                nxt = defaultdict(int)
                for u, n in ends.items():
                    for w in by_path[u].get(a, ()):
                        nxt[w] += n
                ends = nxt
            for w, n in ends.items():
                if n % 2:
                    for y in ys:
                        diff[name(x, v)] ^= {name(y, w)}
    gradings = None
    if D.graded and D.po is not None and site is not None:
        rename = closure_colours(D.po, site)
        ga = _type_a_gradings(A, D.po, rename)
        if ga is not None:
            gradings = {}
            for x, v in gens:
                g = D.gen(v)
                al = defaultdict(Fraction)
                for c, e in g.alex:
                    al[rename[c]] += e
                for c, e in ga[x][0].items():
                    al[c] += e
                h = homological_grading(g) + ga[x][1]
                if h.denominator != 1:
                    gradings = None
                    break
                gradings[name(x, v)] = (_alex_key(al), int(h))
    return ChainComplexF2([name(x, v) for x, v in gens], diff, gradings)


def lazy_closure(D, site):
    """The module with letters set to 1 or 0: at site a, p1 = p2 = q3 = q4 = 1
    and q1 = q2 = p3 = p4 = 0; other sites by shifting indices.  A label
    becomes 1 exactly when every letter of it is set to 1."""
    k = site_index(site) - 1
    ones = {('p', (1 + k - 1) % 4 + 1), ('p', (2 + k - 1) % 4 + 1),
            ('q', (3 + k - 1) % 4 + 1), ('q', (4 + k - 1) % 4 + 1)}
    diff = defaultdict(set)
    for (s, t), lab in D.arrows.items():
        n = 0
        for a in lab:
            if a.is_idempotent() or all(l in ones for l in a.letters()):
                n += 1
        if n % 2:
            diff[s] ^= {t}
    return ChainComplexF2(D.names(), diff, None)


class ClosureReport(NamedTuple):
    site: str
    box_ranks: dict
    lazy_ranks: dict
    box_total: int
    lazy_total: int
    stabilisation: int | None
    euler: GradedPoly | None

    def consistent(self):
        """Box and lazy totals agree up to one factor of 2."""
        b, l = self.box_total, self.lazy_total
        return b == l or b == 2 * l or l == 2 * b


def close_tangle(M, site='a'):
    """Homology of the closure at ``site`` computed two ways."""
    s = SITES[site_index(site) - 1]
    M = cancel_all_identities(M)
    box = box_tensor(closing_type_a(s), M, s)
    hb = homology(box)
    hl = homology(lazy_closure(M, s))
    i = stabilisation_exponent(M.po, s) if M.po is not None else None
    chi = box.euler_characteristic() if box.gradings is not None else None
    report = ClosureReport(s, hb, hl, total_rank(hb), total_rank(hl), i, chi)
    if not report.consistent():
        raise PairingError('box rank {} and lazy rank {} disagree beyond a factor of 2'
                           .format(report.box_total, report.lazy_total))
    return report


__all__ = ['PairingError', 'TypeAStructure', 'closing_type_a', 'joined_punctures',
           'closure_colours', 'closure_components', 'stabilisation_exponent',
           'ChainComplexF2', 'homology', 'total_rank', 'rank_table_tsv', 'box_tensor',
           'lazy_closure', 'ClosureReport', 'close_tangle']

"""
Curved type D structures over the peculiar algebra ("peculiar modules").

A module is a set of generators, each sitting over one idempotent (site
a, b, c or d) with a δ-grading and an Alexander multigrading, and a
differential given by labelled arrows.  An arrow (x, y, label) means that
∂x contains label ⊗ y, so label runs from the site of x to the site of y.
The differential squares to the curvature p^4 + q^4.

Gradings obey, for every basis path a in the label of x -> y,

    δ(a) + δ(y) = δ(x) + 1        A(x) = A(a) + A(y)

with A(a) read off from a puncture orientation.  Alexander gradings are
stored in the half-integer convention, so a single crossing has generators
in gradings like (1/2, -1/2).
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from typing import NamedTuple

from . import f2
from .alexander import GradedPoly
from .pecalg import (SITES, Element, Path, PunctureOrientation, curvature, idem,
                     alexander as path_alexander)


class ModuleError(ValueError):
    pass


def site_index(site):
    if isinstance(site, str):
        if site not in SITES:
            raise ModuleError('unknown site {!r}'.format(site))
        return SITES.index(site) + 1
    if site not in (1, 2, 3, 4):
        raise ModuleError('unknown site {!r}'.format(site))
    return site


def _alex(values):
    return tuple(sorted((c, Fraction(v)) for c, v in dict(values or {}).items() if v))


def _fmt(x):
    return str(Fraction(x))


class Generator(NamedTuple):
    name: str
    site: int
    delta: Fraction | None = None
    alex: tuple = ()

    @property
    def site_letter(self):
        return SITES[self.site - 1]

    def alexander(self):
        return dict(self.alex)

    def label(self, colours=None):
        """Text like ``a^{(1/2,-1/2)} δ^{0}``."""
        a = self.alexander()
        colours = colours or sorted(a)
        parts = ','.join(_fmt(a.get(c, 0)) for c in colours)
        d = '?' if self.delta is None else _fmt(self.delta)
        return '{}^{{({})}} δ^{{{}}}'.format(self.site_letter, parts, d)


def make_generator(name, site, delta=None, alex=None):
    return Generator(name, site_index(site), None if delta is None else Fraction(delta),
                     _alex(alex))


class PecModule:
    """Immutable peculiar module.

    ``arrows`` maps (source name, target name) to an Element; an iterable of
    (source, target, label) triples is also accepted, with repeated pairs
    added together.
    """

    def __init__(self, generators, arrows=(), po: PunctureOrientation | None = None):
        self.generators = tuple(generators)
        self._by_name = {g.name: g for g in self.generators}
        if len(self._by_name) != len(self.generators):
            raise ModuleError('generator names must be unique')
        if isinstance(arrows, dict):
            arrows = ((s, t, lab) for (s, t), lab in arrows.items())
        acc = {}
        for s, t, lab in arrows:
            lab = lab if isinstance(lab, Element) else Element.parse(lab) if isinstance(lab, str) \
                else Element(lab)
            acc[(s, t)] = acc.get((s, t), Element()) + lab
        self.arrows = {}
        for (s, t), lab in acc.items():
            if s not in self._by_name or t not in self._by_name:
                raise ModuleError('arrow {}->{} refers to an unknown generator'.format(s, t))
            if not lab:
                continue
            i, j = self._by_name[s].site, self._by_name[t].site
            if lab.restrict(i, j) != lab:
                raise ModuleError('label {} of {}->{} does not run from site {} to site {}'
                                  .format(lab, s, t, SITES[i - 1], SITES[j - 1]))
            self.arrows[(s, t)] = lab
        self.po = po
        self._out = defaultdict(dict)
        self._in = defaultdict(dict)
        for (s, t), lab in self.arrows.items():
            self._out[s][t] = lab
            self._in[t][s] = lab

    def gen(self, name) -> Generator:
        return self._by_name[name]

    def names(self):
        return [g.name for g in self.generators]

    def __contains__(self, name):
        return name in self._by_name

    def __len__(self):
        return len(self.generators)

    def out(self, name):
        return self._out.get(name, {})

    def into(self, name):
        return self._in.get(name, {})

    @property
    def graded(self):
        return all(g.delta is not None for g in self.generators)

    @property
    def colours(self):
        if self.po is not None:
            return self.po.colours
        return tuple(sorted({c for g in self.generators for c, _ in g.alex}))

    def arrow_list(self):
        order = {n: i for i, n in enumerate(self.names())}
        return sorted(((s, t, lab) for (s, t), lab in self.arrows.items()),
                      key=lambda a: (order[a[0]], order[a[1]]))

    def by_site(self):
        out = {s: [] for s in SITES}
        for g in self.generators:
            out[g.site_letter].append(g)
        return out

    def __eq__(self, other):
        return (isinstance(other, PecModule) and self.generators == other.generators
                and self.arrows == other.arrows and self.po == other.po)

    def __hash__(self):
        return hash((self.generators, frozenset(self.arrows.items())))

    def __repr__(self):
        return 'PecModule({} generators, {} arrows)'.format(len(self.generators), len(self.arrows))

    def serialise(self):
        """Canonical text form, one record per line."""
        lines = []
        if self.po is not None:
            lines.append('orientation {}'.format(self.po))
        for g in self.generators:
            d = '-' if g.delta is None else _fmt(g.delta)
            a = ','.join('{}:{}'.format(c, _fmt(v)) for c, v in g.alex) or '0'
            lines.append('gen {} {} delta={} alex={}'.format(g.name, g.site_letter, d, a))
        for s, t, lab in self.arrow_list():
            lines.append('arrow {} {} {}'.format(s, t, lab))
        return '\n'.join(lines) + '\n'

    def to_dot(self, name='module'):
        colours = self.colours
        lines = ['digraph "{}" {{'.format(name)]
        for g in self.generators:
            lines.append('  "{}" [label="{}"];'.format(g.name, g.label(colours)))
        for s, t, lab in self.arrow_list():
            lines.append('  "{}" -> "{}" [label="{}"];'.format(s, t, lab))
        lines.append('}')
        return '\n'.join(lines) + '\n'


def parse_module(text):
    """Inverse of ``PecModule.serialise``."""
    po = None
    gens, arrows = [], []
    for lineno, line in enumerate(text.splitlines(), 1):
        parts = line.split()
        if not parts or parts[0].startswith('#'):
            continue
        try:
            if parts[0] == 'orientation':
                po = PunctureOrientation.parse(parts[1])
            elif parts[0] == 'gen':
                name, site = parts[1], parts[2]
                fields = dict(f.split('=', 1) for f in parts[3:])
                d = fields.get('delta', '-')
                a = fields.get('alex', '0')
                alex = {} if a == '0' else {c: Fraction(v) for c, v in
                                            (t.split(':') for t in a.split(','))}
                gens.append(make_generator(name, site, None if d == '-' else Fraction(d), alex))
            elif parts[0] == 'arrow':
                arrows.append((parts[1], parts[2], Element.parse(parts[3])))
            else:
                raise ValueError('unknown record {!r}'.format(parts[0]))
        except (ValueError, IndexError) as e:
            raise ModuleError('line {}: {}'.format(lineno, e)) from None
    return PecModule(gens, arrows, po)


# -- validation -----------------------------------------------------------

def curvature_defects(M):
    """Pairs (x, z) where ∂∘∂ differs from the curvature, with both values."""
    ac = curvature()
    bad = []
    for g in M.generators:
        x = g.name
        sq = defaultdict(Element)
        for y, a in M.out(x).items():
            for z, b in M.out(y).items():
                sq[z] = sq[z] + a * b
        expected = {x: ac.restrict(g.site, g.site)}
        for z in set(sq) | set(expected):
            got = sq.get(z, Element())
            want = expected.get(z, Element())
            if got != want:
                bad.append((x, z, got, want))
    return bad


def check_curved(M) -> bool:
    return not curvature_defects(M)


def check_gradings(M):
    """Problems with the grading rule, as a list of strings (empty if fine)."""
    if not M.graded:
        return []
    problems = []
    for s, t, lab in M.arrow_list():
        x, y = M.gen(s), M.gen(t)
        for a in lab:
            if a.delta() + y.delta != x.delta + 1:
                problems.append('δ: {} -{}-> {}'.format(s, a, t))
            if M.po is not None:
                want = dict(x.alex)
                got = dict(y.alex)
                for c, v in path_alexander(a, M.po).items():
                    got[c] = got.get(c, 0) + v
                if _alex(want) != _alex(got):
                    problems.append('Alexander: {} -{}-> {}'.format(s, a, t))
    return problems


def has_identity_arrows(M):
    return any(lab.has_idempotent() for lab in M.arrows.values())


# -- grading manipulation -------------------------------------------------

def shifted(M, delta=0, alex=None):
    alex = dict(alex or {})
    gens = []
    for g in M.generators:
        a = dict(g.alex)
        for c, v in alex.items():
            a[c] = a.get(c, 0) + Fraction(v)
        d = None if g.delta is None else g.delta + Fraction(delta)
        gens.append(g._replace(delta=d, alex=_alex(a)))
    return PecModule(gens, M.arrows, M.po)


def collapse_colours(M, colour='t'):
    """Identify all colours into one."""
    gens = [g._replace(alex=_alex({colour: sum(v for _, v in g.alex)})) for g in M.generators]
    po = None if M.po is None else M.po.collapse(colour)
    return PecModule(gens, M.arrows, po)


def forget_gradings(M):
    gens = [g._replace(delta=None, alex=()) for g in M.generators]
    return PecModule(gens, M.arrows, None)


def renamed(M, mapping):
    ren = lambda n: mapping.get(n, n)
    gens = [g._replace(name=ren(g.name)) for g in M.generators]
    return PecModule(gens, {(ren(s), ren(t)): lab for (s, t), lab in M.arrows.items()}, M.po)


def _fresh_names(taken, names):
    out = {}
    taken = set(taken)
    for n in names:
        m = n
        while m in taken:
            m += "'"
        taken.add(m)
        out[n] = m
    return out


def direct_sum(*modules):
    """Disjoint union; clashing names in later summands get primes."""
    gens, arrows = [], {}
    po = modules[0].po if modules else None
    taken = set()
    for M in modules:
        if M.po != po:
            po = None
        ren = _fresh_names(taken, M.names())
        taken |= set(ren.values())
        N = renamed(M, ren)
        gens.extend(N.generators)
        arrows.update(N.arrows)
    return PecModule(gens, arrows, po)


# -- cancellation ---------------------------------------------------------

def cancel_arrow(M, src, dst=None):
    """Cancel an arrow labelled by an idempotent.

    For each z -α-> dst and src -β-> w the arrow z -αβ-> w is added; the two
    endpoints disappear.  ``src`` may also be an (src, dst) pair.
    """
    if dst is None:
        src, dst = src
    if src == dst:
        raise ModuleError('cannot cancel a loop at {}'.format(src))
    lab = M.arrows.get((src, dst))
    if lab is None or len(lab) != 1 or not lab.has_idempotent():
        raise ModuleError('arrow {}->{} is not labelled by an idempotent'.format(src, dst))
    gone = {src, dst}
    arrows = {k: v for k, v in M.arrows.items() if not (set(k) & gone)}
    for z, alpha in M.into(dst).items():
        if z in gone:
            continue
        for w, beta in M.out(src).items():
            if w in gone:
                continue
            arrows[(z, w)] = arrows.get((z, w), Element()) + alpha * beta
    out = PecModule([g for g in M.generators if g.name not in gone], arrows, M.po)
    if check_curved(M) and not check_curved(out):
        raise ModuleError('cancelling {}->{} broke the curvature condition'.format(src, dst))
    return out


def identity_arrows(M):
    return [(s, t) for s, t, lab in M.arrow_list()
            if s != t and len(lab) == 1 and lab.has_idempotent()]


def cancel_all_identities(M):
    while True:
        todo = identity_arrows(M)
        if not todo:
            return M
        M = cancel_arrow(M, todo[0])


# -- morphisms ------------------------------------------------------------

def _same(M, N):
    return M is N or M == N


class PecMorphism:
    """Morphism of type D structures, components keyed by (x in source, y in target)."""

    def __init__(self, source, target, components=()):
        self.source, self.target = source, target
        if isinstance(components, dict):
            components = ((x, y, lab) for (x, y), lab in components.items())
        comps = {}
        for x, y, lab in components:
            lab = Element.parse(lab) if isinstance(lab, str) else Element(lab) \
                if not isinstance(lab, Element) else lab
            if x not in source or y not in target:
                raise ModuleError('component {}->{} refers to an unknown generator'.format(x, y))
            i, j = source.gen(x).site, target.gen(y).site
            if lab.restrict(i, j) != lab:
                raise ModuleError('label {} of component {}->{} has the wrong idempotents'
                                  .format(lab, x, y))
            comps[(x, y)] = comps.get((x, y), Element()) + lab
        self.components = {k: v for k, v in comps.items() if v}

    def is_zero(self):
        return not self.components

    def __add__(self, other):
        if not (_same(self.source, other.source) and _same(self.target, other.target)):
            raise ModuleError('cannot add morphisms between different modules')
        comps = dict(self.components)
        for k, v in other.components.items():
            comps[k] = comps.get(k, Element()) + v
        return PecMorphism(self.source, self.target, comps)

    def __eq__(self, other):
        return (isinstance(other, PecMorphism) and _same(self.source, other.source)
                and _same(self.target, other.target) and self.components == other.components)

    def __repr__(self):
        body = ', '.join('{}->{}: {}'.format(x, y, lab)
                         for (x, y), lab in sorted(self.components.items()))
        return 'PecMorphism({})'.format(body)


def identity(M):
    return PecMorphism(M, M, {(g.name, g.name): Element(idem(g.site)) for g in M.generators})


def differential(M):
    """∂ as a morphism M -> M."""
    return PecMorphism(M, M, M.arrows)


def compose(f, g):
    """g∘f: apply f first, so labels multiply as (f label)(g label)."""
    if not _same(f.target, g.source):
        raise ModuleError('cannot compose: target of the first map is not the source of the second')
    comps = defaultdict(Element)
    by_src = defaultdict(list)
    for (y, z), b in g.components.items():
        by_src[y].append((z, b))
    for (x, y), a in f.components.items():
        for z, b in by_src[y]:
            comps[(x, z)] = comps[(x, z)] + a * b
    return PecMorphism(f.source, g.target, comps)


def d_of_morphism(f):
    """D(f) = ∂_N∘f + f∘∂_M."""
    return compose(f, differential(f.target)) + compose(differential(f.source), f)


def morphism_shift(f):
    """The grading shift (Δδ, ΔA) to apply to the source so that f has the
    degree of a differential, or None if no single shift works."""
    M, N = f.source, f.target
    if not (M.graded and N.graded):
        return None
    use_alex = M.po is not None and M.po == N.po
    shift = None
    for (x, y), lab in f.components.items():
        gx, gy = M.gen(x), N.gen(y)
        for a in lab:
            dd = a.delta() + gy.delta - gx.delta - 1
            da = {}
            if use_alex:
                da = dict(gy.alex)
                for c, v in path_alexander(a, N.po).items():
                    da[c] = da.get(c, 0) + v
                for c, v in gx.alex:
                    da[c] = da.get(c, 0) - v
            here = (dd, _alex(da))
            if shift is None:
                shift = here
            elif shift != here:
                return None
    return shift or (Fraction(0), ())


def mapping_cone(f, graded=True, collapse=False):
    """Cone of a chain map f: M -> N.

    The differential is ∂_M ⊕ ∂_N plus f; the source is shifted so that the
    components of f obey the grading rule.  With ``collapse`` the colours
    are identified first (for maps that only respect the single-variable
    grading).  If no consistent shift exists, ``graded=True`` raises and
    ``graded=False`` returns an ungraded cone.
    """
    if not d_of_morphism(f).is_zero():
        raise ModuleError('not a chain map: D(f) is nonzero')
    M, N = f.source, f.target
    if collapse:
        M, N = collapse_colours(M), collapse_colours(N)
        f = PecMorphism(M, N, f.components)
    same_po = M.po is not None and M.po == N.po
    shift = morphism_shift(f)
    if shift is None or not (M.graded and N.graded):
        if graded:
            raise ModuleError('the map has no consistent grading shift')
        M, N, po = forget_gradings(M), forget_gradings(N), None
    else:
        dd, da = shift
        M = shifted(M, dd, dict(da))
        po = M.po if same_po else None
        if not same_po:
            # only δ is meaningful when the two orientations differ
            M = PecModule([g._replace(alex=()) for g in M.generators], M.arrows, None)
            N = PecModule([g._replace(alex=()) for g in N.generators], N.arrows, None)
    ren = _fresh_names(M.names(), N.names())
    N2 = renamed(N, ren)
    arrows = dict(M.arrows)
    arrows.update(N2.arrows)
    for (x, y), lab in f.components.items():
        arrows[(x, ren[y])] = arrows.get((x, ren[y]), Element()) + lab
    cone = PecModule(M.generators + N2.generators, arrows, po)
    if not check_curved(cone):
        raise ModuleError('cone fails the curvature condition')
    return cone


# -- clean-up homotopies --------------------------------------------------

def homotopy_problems(M, h):
    if not (_same(h.source, M) and _same(h.target, M)):
        return ['the homotopy is not an endomorphism of the module']
    Dh = d_of_morphism(h)
    problems = []
    if not compose(h, h).is_zero():
        problems.append('h∘h is nonzero')
    if not compose(Dh, h).is_zero():
        problems.append('h∘D(h) is nonzero')
    if not compose(h, Dh).is_zero():
        problems.append('D(h)∘h is nonzero')
    return problems


def apply_homotopy(M, h):
    """Replace ∂ by ∂ + D(h)."""
    problems = homotopy_problems(M, h)
    if problems:
        raise ModuleError('; '.join(problems))
    arrows = dict(M.arrows)
    for k, v in d_of_morphism(h).components.items():
        arrows[k] = arrows.get(k, Element()) + v
    out = PecModule(M.generators, arrows, M.po)
    if not check_curved(out):
        raise ModuleError('clean-up broke the curvature condition')
    if check_gradings(out):
        raise ModuleError('clean-up broke the grading rule')
    return out


def change_basis(M, h):
    """Conjugate ∂ by the isomorphism 1 + h, which is its own inverse when
    h∘h = 0.  The new differential is ∂ + D(h) + h∂h."""
    if not (_same(h.source, M) and _same(h.target, M)):
        raise ModuleError('the basis change is not an endomorphism of the module')
    if not compose(h, h).is_zero():
        raise ModuleError('h∘h is nonzero, so 1 + h is not an involution')
    new = differential(M) + d_of_morphism(h) + compose(compose(h, differential(M)), h)
    out = PecModule(M.generators, new.components, M.po)
    if not check_curved(out):
        raise ModuleError('basis change broke the curvature condition')
    return out


def find_basis_change(M, target, max_length=1, max_candidates=20):
    """Search for h with h∘h = 0 such that ``change_basis(M, h)`` has the
    arrows of ``target`` (a module with the same generator names, or an
    arrow dict).  Components with idempotent labels are excluded and, for
    graded M, only degree-zero components are tried."""
    want = target.arrows if isinstance(target, PecModule) else target
    cands = []
    for x in M.names():
        for y in M.names():
            gx, gy = M.gen(x), M.gen(y)
            for a in _candidate_paths(gx.site, gy.site, max_length):
                if a.is_idempotent():
                    continue
                if M.graded and a.delta() + gy.delta != gx.delta:
                    continue
                cands.append((x, y, a))
    if len(cands) > max_candidates:
        raise ModuleError('{} candidate components; raise max_candidates to search them all'
                          .format(len(cands)))
    for mask in range(1, 1 << len(cands)):
        h = PecMorphism(M, M, [c for k, c in enumerate(cands) if mask >> k & 1])
        if not compose(h, h).is_zero():
            continue
        try:
            out = change_basis(M, h)
        except ModuleError:
            continue
        if out.arrows == want:
            return h
    return None


def _candidate_paths(i, j, max_length):
    out = []
    for n in range(max_length + 1):
        for a in (Path.make(i, i - n), Path.make(i, i + n)):
            if a.target == j and a not in out:
                out.append(a)
    return out


def find_homotopy(M, target_arrows, max_length=4):
    """Some h with ∂ + D(h) equal to ``target_arrows`` and satisfying the
    clean-up conditions, or None.  h ranges over components whose labels
    have length at most ``max_length``; when M is graded only components
    of degree zero are used."""
    names = M.names()
    unknowns = []
    for x in names:
        for y in names:
            gx, gy = M.gen(x), M.gen(y)
            for a in _candidate_paths(gx.site, gy.site, max_length):
                if M.graded and a.delta() + gy.delta != gx.delta:
                    continue
                unknowns.append((x, y, a))
    rows = defaultdict(int)
    for k, (y, z, a) in enumerate(unknowns):
        bit = 1 << k
        for x, lab in M.into(y).items():
            for m in lab:
                r = m * a
                if r is not None:
                    rows[(x, z, r)] ^= bit
        for w, lab in M.out(z).items():
            for m in lab:
                r = a * m
                if r is not None:
                    rows[(y, w, r)] ^= bit
    want = set()
    target = target_arrows.arrows if isinstance(target_arrows, PecModule) else target_arrows
    for (s, t), lab in target.items():
        for a in Element(lab) if not isinstance(lab, Element) else lab:
            want ^= {(s, t, a)}
    for (s, t), lab in M.arrows.items():
        for a in lab:
            want ^= {(s, t, a)}
    keys = list(set(rows) | want)
    x = f2.solve([rows.get(k, 0) for k in keys], [1 if k in want else 0 for k in keys])
    if x is None:
        return None
    comps = [(u[0], u[1], u[2]) for k, u in enumerate(unknowns) if x >> k & 1]
    h = PecMorphism(M, M, comps)
    if homotopy_problems(M, h):
        return None
    return h


# -- isomorphism ----------------------------------------------------------

def _signature(M, name):
    g = M.gen(name)
    outs = sorted(str(lab) for lab in M.out(name).values())
    ins = sorted(str(lab) for lab in M.into(name).values())
    return g.site, tuple(outs), tuple(ins)


def _components(M):
    parent = {n: n for n in M.names()}

    def find(n):
        while parent[n] != n:
            parent[n] = parent[parent[n]]
            n = parent[n]
        return n

    for s, t in M.arrows:
        parent[find(s)] = find(t)
    return {n: find(n) for n in M.names()}


def _grading_shift_ok(M, N, iso):
    if not (M.graded and N.graded):
        return True
    comp = _components(M)
    shift = {}
    for x, y in iso.items():
        gx, gy = M.gen(x), N.gen(y)
        da = dict(gy.alex)
        for c, v in gx.alex:
            da[c] = da.get(c, 0) - v
        here = (gy.delta - gx.delta, _alex(da))
        if shift.setdefault(comp[x], here) != here:
            return False
    return True


def isomorphism(M, N, graded=True):
    """A name map M -> N preserving sites and arrow labels, or None.

    With ``graded`` the gradings must agree up to a shift that is constant
    on each connected component.
    """
    if len(M) != len(N) or len(M.arrows) != len(N.arrows):
        return None
    sig_n = defaultdict(list)
    for n in N.names():
        sig_n[_signature(N, n)].append(n)
    cands = {}
    for m in M.names():
        cands[m] = sig_n.get(_signature(M, m), [])
        if not cands[m]:
            return None
    order = sorted(M.names(), key=lambda m: len(cands[m]))
    iso, used = {}, set()

    def consistent(m, n):
        if M.arrows.get((m, m)) != N.arrows.get((n, n)):
            return False
        for m2, n2 in iso.items():
            if M.arrows.get((m, m2)) != N.arrows.get((n, n2)):
                return False
            if M.arrows.get((m2, m)) != N.arrows.get((n2, n)):
                return False
        return True

    def search(k):
        if k == len(order):
            return not graded or _grading_shift_ok(M, N, iso)
        m = order[k]
        for n in cands[m]:
            if n in used or not consistent(m, n):
                continue
            iso[m] = n
            used.add(n)
            if search(k + 1):
                return True
            del iso[m]
            used.discard(n)
        return False

    return dict(iso) if search(0) else None


def isomorphic(M, N, graded=True) -> bool:
    return isomorphism(M, N, graded) is not None


# -- loops ----------------------------------------------------------------

class Loop(NamedTuple):
    """One component of a loop-type module: generators in cyclic order and
    the segment leaving each one."""
    generators: tuple
    segments: tuple

    def word(self, M):
        return tuple((M.gen(g).site_letter, str(a)) for g, a in zip(self.generators, self.segments))

    def __len__(self):
        return len(self.generators)


def canonical_word(word):
    """Smallest rotation of a cyclic word, for comparisons."""
    word = tuple(word)
    if not word:
        return word
    return min(word[i:] + word[:i] for i in range(len(word)))


def loop_decompose(M):
    """Split a loop-type module into its loops; None if it is not loop-type.

    Arrows must pair up as segments: between two generators, one p-path each
    way (or one q-path each way) composing to a length-4 cycle.  Every
    generator must meet exactly one p-segment and one q-segment.
    """
    if has_identity_arrows(M):
        raise ModuleError('cancel identity arrows before decomposing into loops')
    segs = defaultdict(list)
    for (s, t), lab in M.arrows.items():
        if s == t:
            return None
        for a in lab:
            key = (frozenset((s, t)), a.kind)
            segs[key].append((s, t, a))
    ends = defaultdict(dict)
    for (pair, kind), items in segs.items():
        if len(items) != 2:
            return None
        (s1, t1, a1), (s2, t2, a2) = items
        if (s1, t1) != (t2, s2) or a1.length + a2.length != 4:
            return None
        for s, t, a in items:
            if kind in ends[s]:
                return None
            ends[s][kind] = (t, a)
    if any(set(ends[n]) != {'p', 'q'} for n in M.names()):
        return None
    loops, seen = [], set()
    for start in M.names():
        if start in seen:
            continue
        gens, path_out = [], []
        x, kind = start, 'p'
        while True:
            seen.add(x)
            y, a = ends[x][kind]
            gens.append(x)
            path_out.append(a)
            x, kind = y, 'q' if kind == 'p' else 'p'
            if x == start:
                break
        loops.append(Loop(tuple(gens), tuple(path_out)))
    return loops


def _segment(kind, s, t):
    if kind == 'p':
        n = (s - t) % 4
        return Path.make(s, s - n), Path.make(t, t - (4 - n)), n
    n = (t - s) % 4
    return Path.make(s, s + n), Path.make(t, t + (4 - n)), n


def parse_word(word):
    """'b p d q' or 'bpdq' -> [(2, 'p'), (4, 'q')]."""
    if isinstance(word, str):
        tokens = [c for c in word if not c.isspace() and c not in ',-']
    else:
        tokens = [t for pair in word for t in pair]
    if not tokens or len(tokens) % 2:
        raise ModuleError('a loop word alternates sites and segment kinds')
    out = []
    for s, k in zip(tokens[::2], tokens[1::2]):
        if k not in ('p', 'q'):
            raise ModuleError('segment kind must be p or q, got {!r}'.format(k))
        out.append((site_index(s), k))
    return out


def loop_from_word(word, po=None, names=None, start_delta=0, start_alex=None):
    """Loop module from a cyclic word of sites and segments.

    The word lists each generator's site followed by the kind of segment
    leading to the next generator.  Each p-segment between sites i and j
    contributes the p-paths i -> j and j -> i that compose to a length-4
    cycle; likewise for q.  Gradings are propagated from the first
    generator; a word whose gradings do not close up is rejected.
    """
    steps = parse_word(word)
    n = len(steps)
    kinds = [k for _, k in steps]
    if any(kinds[i] == kinds[(i + 1) % n] for i in range(n)):
        raise ModuleError('p- and q-segments must alternate around a loop')
    if names is None:
        names = ['{}{}'.format(SITES[s - 1], i) for i, (s, _) in enumerate(steps)]
    names = list(names)
    if len(names) != n:
        raise ModuleError('need one name per generator')
    arrows = []
    delta = [Fraction(start_delta)]
    alex = [dict(start_alex or {})]
    for i, (s, k) in enumerate(steps):
        t = steps[(i + 1) % n][0]
        fwd, back, length = _segment(k, s, t)
        if length == 0:
            raise ModuleError('{}-segment joins site {} to itself'.format(k, SITES[s - 1]))
        arrows.append((names[i], names[(i + 1) % n], Element(fwd)))
        arrows.append((names[(i + 1) % n], names[i], Element(back)))
        d = delta[-1] + 1 - fwd.delta()
        a = dict(alex[-1])
        if po is not None:
            for c, v in path_alexander(fwd, po).items():
                a[c] = a.get(c, 0) - v
        delta.append(d)
        alex.append(a)
    if delta[-1] != delta[0] or _alex(alex[-1]) != _alex(alex[0]):
        raise ModuleError('gradings do not close up around the loop')
    gens = [make_generator(names[i], s, delta[i], alex[i] if po is not None else None)
            for i, (s, _) in enumerate(steps)]
    M = PecModule(gens, arrows, po)
    if not check_curved(M):
        raise ModuleError('loop word does not give a curved module')
    return M


# -- invariants -----------------------------------------------------------

def homological_grading(g):
    """h = A/2 - δ with all colours added up (half-integer Alexander)."""
    h = Fraction(sum(v for _, v in g.alex)) / 2 - g.delta
    if h.denominator != 1:
        raise ModuleError('generator {} has non-integral homological grading {}'.format(g.name, h))
    return int(h)


def euler_characteristic(M):
    """Per site, the sum of (-1)^h times the Alexander monomial.

    Exponents are twice the stored Alexander gradings, so the result is in
    the same whole-power convention as ``alexander.nabla``.
    """
    if not M.graded:
        raise ModuleError('Euler characteristic needs a graded module')
    out = {}
    for s in SITES:
        total = GradedPoly()
        for g in M.generators:
            if g.site_letter != s:
                continue
            exps = {}
            for c, v in g.alex:
                e = 2 * v
                if e.denominator != 1:
                    raise ModuleError('Alexander grading of {} is not a half-integer'.format(g.name))
                exps[c] = int(e)
            total = total + GradedPoly.monomial(exps, -1 if homological_grading(g) % 2 else 1)
        out[s] = total
    return out


LETTERS = tuple('{}{}'.format(k, i) for k in 'pq' for i in range(1, 5))
RANK_FAMILIES = (('p1', 'q2', 'p3', 'q4'), ('q1', 'p2', 'q3', 'p4'))


def letter_path(name):
    i = int(name[1])
    return Path.make(i, i - 1) if name[0] == 'p' else Path.make(i - 1, i)


def rank_profile(M):
    """{(letter, δ of the source generators): rank of that letter's component}."""
    if has_identity_arrows(M):
        raise ModuleError('rank profile needs a module without identity arrows')
    if not M.graded:
        raise ModuleError('rank profile needs a graded module')
    out = {}
    for name in LETTERS:
        a = letter_path(name)
        sources = [g for g in M.generators if g.site == a.source]
        targets = [g.name for g in M.generators if g.site == a.target]
        for d in sorted({g.delta for g in sources}):
            rows = [g.name for g in sources if g.delta == d]
            entries = {(s, t) for s in rows for t, lab in M.out(s).items() if a in lab}
            out[(name, d)] = f2.matrix_rank(entries, rows, targets)
    return out


def rank_symmetry_failures(profile):
    """Entries where the rank families disagree; empty when both families
    are constant at every δ."""
    deltas = sorted({d for _, d in profile})
    bad = []
    for fam in RANK_FAMILIES:
        for d in deltas:
            ranks = [profile.get((n, d), 0) for n in fam]
            if len(set(ranks)) > 1:
                bad.append((fam, d, ranks))
    return bad


# -- builders -------------------------------------------------------------

VERTICAL_PO = PunctureOrientation.parse('p-,p+,q+,q-')
HORIZONTAL_PO = PunctureOrientation.parse('p-,q+,q-,p+')
ODD_TWIST_PO = PunctureOrientation.parse('q-,p+,q+,p-')
PRETZEL_PO = PunctureOrientation.parse('p-,p+,q-,q+')


def cftd_trivial(axis='vertical'):
    """Two generators joined by a pair of length-2 arrows.  The vertical
    trivial tangle has generators in sites b and d, the horizontal one in a
    and c."""
    if axis in ('vertical', 'bd'):
        gens = [make_generator('b', 'b', 0), make_generator('d', 'd', 0)]
        arrows = [('d', 'b', 'p43+q12'), ('b', 'd', 'p21+q34')]
        return PecModule(gens, arrows, VERTICAL_PO)
    if axis in ('horizontal', 'ac'):
        gens = [make_generator('a', 'a', 0), make_generator('c', 'c', 0)]
        arrows = [('a', 'c', 'p14+q23'), ('c', 'a', 'p32+q41')]
        return PecModule(gens, arrows, HORIZONTAL_PO)
    raise ModuleError('axis must be vertical or horizontal')


def _propagate_alexander(names, arrows, po, start, value):
    """Solve A(x) = A(label) + A(y) over all arrows from one known value."""
    known = {start: dict(value)}
    adj = defaultdict(list)
    for s, t, lab in arrows:
        for a in Element.parse(lab) if isinstance(lab, str) else lab:
            adj[s].append((t, a, -1))
            adj[t].append((s, a, 1))
    todo = [start]
    while todo:
        x = todo.pop()
        for y, a, sign in adj[x]:
            v = dict(known[x])
            for c, e in path_alexander(a, po).items():
                v[c] = v.get(c, 0) + sign * e
            if y in known:
                if _alex(known[y]) != _alex(v):
                    raise ModuleError('inconsistent Alexander gradings at {}'.format(y))
            else:
                known[y] = v
                todo.append(y)
    missing = [n for n in names if n not in known]
    if missing:
        raise ModuleError('cannot reach {} from {}'.format(missing, start))
    return known


def _twist_chains(n):
    """The two a/c chains of an |n|-twist, as lists of (site, exponent)."""
    m = abs(n)
    chains = []
    for first in 'ac':
        site, e, chain = first, 1 - m, []
        for _ in range(m):
            chain.append((site, e))
            site = 'c' if site == 'a' else 'a'
            e += 2
        chains.append(chain)
    return chains


def cftd_twist(n):
    """Module of the n-twist tangle; n > 0 positive twists, n < 0 negative.

    Between the b and d generators run two chains alternating between sites
    a and c, with Alexander exponent (colours added) going up by 2 along
    each chain.  For n = ±1 this is a single crossing.
    """
    if n == 0:
        raise ModuleError('twist needs n != 0')
    m = abs(n)
    po = ODD_TWIST_PO if m % 2 else VERTICAL_PO
    chains = _twist_chains(n)
    name = (lambda s, e: s) if m == 1 else (lambda s, e: '{}{}'.format(s, e))
    ends_delta = Fraction(m, 2) if n > 0 else Fraction(-m, 2)
    chain_delta = ends_delta - Fraction(1, 2) if n > 0 else ends_delta + Fraction(1, 2)
    arrows = []
    for chain in chains:
        for (s1, e1), (s2, e2) in zip(chain, chain[1:]):
            lo, hi = name(s1, e1), name(s2, e2)
            if s1 == 'a':
                arrows += [(lo, hi, 'p14'), (hi, lo, 'p32')]
            else:
                arrows += [(lo, hi, 'q41'), (hi, lo, 'q23')]
    a_lo, c_lo = name('a', 1 - m), name('c', 1 - m)
    a_hi, c_hi = name('a', m - 1), name('c', m - 1)
    if n > 0:
        arrows += [(c_lo, 'b', 'p3'), ('b', c_lo, 'p214'), (a_lo, 'b', 'q2'), ('b', a_lo, 'q341'),
                   (a_hi, 'd', 'p1'), ('d', a_hi, 'p432'), (c_hi, 'd', 'q4'), ('d', c_hi, 'q123')]
    else:
        arrows += [('d', c_lo, 'p4'), (c_lo, 'd', 'p321'), ('d', a_lo, 'q1'), (a_lo, 'd', 'q234'),
                   ('b', a_hi, 'p2'), (a_hi, 'b', 'p143'), ('b', c_hi, 'q3'), (c_hi, 'b', 'q412')]
    names = ['b', 'd'] + [name(s, e) for chain in chains for s, e in chain]
    half = Fraction(-m, 2) if n > 0 else Fraction(m, 2)
    alex = _propagate_alexander(names, arrows, po, 'b', {c: half for c in po.colours})
    gens = []
    for nm in names:
        d = ends_delta if nm in ('b', 'd') else chain_delta
        site = nm[0]
        gens.append(make_generator(nm, site, d, alex[nm]))
    order = {s: i for i, s in enumerate(SITES)}
    gens.sort(key=lambda g: (order[g.site_letter], sum(v for _, v in g.alex)))
    M = PecModule(gens, arrows, po)
    return M


def cftd_crossing(sign):
    """Single crossing; sign '+' or '-' (or ±1)."""
    if sign in ('+', 1, '1', 'L', 'positive'):
        return cftd_twist(1)
    if sign in ('-', -1, '-1', 'R', 'negative'):
        return cftd_twist(-1)
    raise ModuleError('crossing sign must be + or -')


def phi_n(n):
    """The skein map from the n-twist to the (-n)-twist module: identity on
    the chains, length-2 labels from b to d and from d to b."""
    if n <= 0:
        raise ModuleError('phi_n needs n > 0')
    src, dst = cftd_twist(n), cftd_twist(-n)
    comps = [(g.name, g.name, Element(idem(g.site))) for g in src.generators
             if g.name not in ('b', 'd')]
    comps += [('b', 'd', 'p21+q34'), ('d', 'b', 'p43+q12')]
    return PecMorphism(src, dst, comps)


def skein_cone(n):
    """Cone of phi_n.  Odd n only respects the single-variable grading."""
    return mapping_cone(phi_n(n), collapse=bool(n % 2))


def singular_morphisms():
    """The two maps from the vertical trivial tangle to the positive crossing
    whose cones give the two figure-8 modules."""
    T, X = cftd_trivial('vertical'), cftd_crossing('+')
    f1 = PecMorphism(T, X, [('d', 'd', 'i4'), ('b', 'a', 'p2'), ('b', 'c', 'q3')])
    f2_ = PecMorphism(T, X, [('b', 'b', 'i2'), ('d', 'c', 'p4'), ('d', 'a', 'q1')])
    return f1, f2_


def resolution_morphism():
    """Map from the vertical to the horizontal trivial tangle whose cone is
    homotopic to a single negative crossing."""
    return PecMorphism(cftd_trivial('vertical'), cftd_trivial('horizontal'),
                       [('b', 'c', 'q3'), ('b', 'a', 'p2'), ('d', 'a', 'q1'), ('d', 'c', 'p4')])


# (name, site, (p, q) Alexander, δ) for the (2,-3)-pretzel tangle, after
# cancelling identity arrows
PRETZEL_GENERATORS = [
    ("x2d'", 'd', (-1, 3), -1), ('x2c1', 'c', (-1, 2), Fraction(-1, 2)),
    ('by1', 'b', (-1, 1), 0), ('x2c2', 'c', (-1, 0), Fraction(-1, 2)),
    ('by2', 'b', (-1, -1), 0), ('x2c3', 'c', (-1, -2), Fraction(-1, 2)),
    ('a1y1', 'a', (0, 3), Fraction(-1, 2)), ('a1y2', 'a', (0, 1), Fraction(-1, 2)),
    ('a2y1', 'a', (0, 1), Fraction(-1, 2)), ('a1y3', 'a', (0, -1), Fraction(-1, 2)),
    ('a2y2', 'a', (0, -1), Fraction(-1, 2)), ('a2y3', 'a', (0, -3), Fraction(-1, 2)),
    ('x1c1', 'c', (1, 2), Fraction(-1, 2)), ('dy2', 'd', (1, 1), 0),
    ('x1c2', 'c', (1, 0), Fraction(-1, 2)), ('dy3', 'd', (1, -1), 0),
    ('x1c3', 'c', (1, -2), Fraction(-1, 2)), ("x1b'", 'b', (1, -3), -1),
]

PRETZEL_LOOPS = [
    ["x2d'", 'x2c1', 'a1y2', 'dy2', 'x1c1', 'a1y1'],
    ['by1', 'x2c2', 'a1y3', 'dy3', 'x1c2', 'a2y1'],
    ['by2', 'x2c3', 'a2y3', "x1b'", 'x1c3', 'a2y2'],
]


def cftd_pretzel_2m3():
    """Three loops of six generators each; every loop starts with a
    p-segment.  Gradings are propagated along each loop and checked
    against the stored table."""
    info = {nm: (site, alex, Fraction(d)) for nm, site, alex, d in PRETZEL_GENERATORS}
    parts = []
    for loop in PRETZEL_LOOPS:
        word = [(info[nm][0], 'pq'[i % 2]) for i, nm in enumerate(loop)]
        site, (ap, aq), d = info[loop[0]]
        parts.append(loop_from_word(word, PRETZEL_PO, loop, d,
                                    {'p': Fraction(ap), 'q': Fraction(aq)}))
    M = direct_sum(*parts)
    for nm, site, (ap, aq), d in PRETZEL_GENERATORS:
        g = M.gen(nm)
        if g.delta != d or g.alex != _alex({'p': ap, 'q': aq}):
            raise ModuleError('pretzel grading table disagrees with the loops at {}'.format(nm))
    order = {nm: i for i, (nm, *_rest) in enumerate(PRETZEL_GENERATORS)}
    gens = sorted(M.generators, key=lambda g: order[g.name])
    return PecModule(gens, M.arrows, PRETZEL_PO)


BUILDERS = {
    'trivial': lambda arg=None: cftd_trivial(arg or 'vertical'),
    'crossing': lambda arg='+': cftd_crossing(arg),
    'twist': lambda arg='1': cftd_twist(int(arg)),
    'pretzel': lambda arg=None: cftd_pretzel_2m3(),
    'loop': lambda arg: loop_from_word(arg),
}


def build(spec):
    """Builder from text such as ``crossing:+``, ``twist:-3`` or ``loop:bpdq``."""
    name, _, arg = spec.partition(':')
    if name not in BUILDERS:
        raise ModuleError('unknown builder {!r}; choose from {}'.format(name, ', '.join(BUILDERS)))
    return BUILDERS[name](arg) if arg else BUILDERS[name]()


__all__ = [
    'ModuleError', 'Generator', 'make_generator', 'PecModule', 'parse_module',
    'curvature_defects', 'check_curved', 'check_gradings', 'has_identity_arrows',
    'shifted', 'collapse_colours', 'forget_gradings', 'renamed', 'direct_sum',
    'cancel_arrow', 'identity_arrows', 'cancel_all_identities',
    'PecMorphism', 'identity', 'differential', 'compose', 'd_of_morphism', 'morphism_shift',
    'mapping_cone', 'homotopy_problems', 'apply_homotopy', 'find_homotopy',
    'change_basis', 'find_basis_change',
    'isomorphism', 'isomorphic', 'Loop', 'canonical_word', 'loop_decompose', 'parse_word',
    'loop_from_word', 'homological_grading', 'euler_characteristic', 'LETTERS',
    'RANK_FAMILIES', 'rank_profile', 'rank_symmetry_failures',
    'cftd_trivial', 'cftd_twist', 'cftd_crossing', 'phi_n', 'skein_cone',
    'singular_morphisms', 'resolution_morphism', 'cftd_pretzel_2m3', 'build', 'BUILDERS',
]

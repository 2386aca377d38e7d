"""
Oriented tangle diagrams in the quadrant-list ("v-format") encoding.

A diagram is an anticlockwise list of open regions followed by one row per
crossing::

    {{a, b, c, d}, {h, f, b, c, R, q, q}, {a, e, f, d, L, p, q}, ...}

Each crossing row lists the regions in its four quadrants, anticlockwise,
starting with the quadrant between the two outgoing strands, then the sign
(L positive, R negative) and the colours of the over and under strand.

Orientation is never stored separately.  Placing a crossing so that its
outgoing arms point NE and NW, the over strand of an L crossing runs SW->NE
and the over strand of an R crossing runs SE->NW.  Everything else (arms,
edges, boundary endpoints, strand components) is recovered from this.
"""

from __future__ import annotations

import re
from collections import Counter, defaultdict
from itertools import permutations, product
from typing import NamedTuple

RESERVED_NAMES = {'h', 'δ'}


class DiagramError(ValueError):
    """Raised for malformed diagram text or a failed precondition."""

    def __init__(self, message, position=None):
        if position is not None:
            message = '{} (at offset {})'.format(message, position)
        super().__init__(message)
        self.position = position


class Crossing(NamedTuple):
    quadrants: tuple
    sign: str
    over: str
    under: str

    @property
    def positive(self):
        return self.sign == 'L'

    def arms(self):
        """The four arms as (name, colour, outgoing, left region, right region).

        Left/right are taken with respect to the direction of travel.
        """
        q1, q2, q3, q4 = self.quadrants
        if self.sign == 'L':
            ne, nw = self.over, self.under
        else:
            ne, nw = self.under, self.over
        return (('NE', ne, True, q1, q4),
                ('NW', nw, True, q2, q1),
                ('SW', ne, False, q2, q3),
                ('SE', nw, False, q3, q4))


# strand continuation through a crossing: incoming arm -> outgoing arm
_THROUGH = {'SW': 'NE', 'SE': 'NW'}
_ARM_INDEX = {'NE': 0, 'NW': 1, 'SW': 2, 'SE': 3}


class Endpoint(NamedTuple):
    """One boundary point of the tangle, between two consecutive open regions."""
    colour: str
    incoming: bool
    regions: tuple
    arm: tuple          # (crossing index, arm name) that the endpoint feeds


class TangleDiagram:
    """Immutable combinatorial tangle diagram.

    ``open_regions`` is the anticlockwise boundary order; ``crossings`` is a
    tuple of :class:`Crossing`.
    """

    def __init__(self, open_regions, crossings):
        self.open_regions = tuple(open_regions)
        self.crossings = tuple(Crossing(tuple(c[0]), c[1], c[2], c[3])
                               if not isinstance(c, Crossing) else c
                               for c in crossings)
        self._structure = None

    # -- basic derived data -------------------------------------------------
    @property
    def regions(self):
        seen = dict.fromkeys(self.open_regions)
        for c in self.crossings:
            for r in c.quadrants:
                seen.setdefault(r, None)
        return tuple(seen)

    @property
    def closed_regions(self):
        opens = set(self.open_regions)
        return tuple(r for r in self.regions if r not in opens)

    @property
    def n_strands(self):
        return len(self.open_regions) // 2

    @property
    def colours(self):
        seen = {}
        for c in self.crossings:
            seen.setdefault(c.over, None)
            seen.setdefault(c.under, None)
        return tuple(sorted(seen))

    def __eq__(self, other):
        return (isinstance(other, TangleDiagram)
                and self.open_regions == other.open_regions
                and self.crossings == other.crossings)

    def __hash__(self):
        return hash((self.open_regions, self.crossings))

    def __repr__(self):
        return 'TangleDiagram({})'.format(serialise(self))

    def __str__(self):
        return serialise(self)

    # -- edges, endpoints and components ------------------------------------
    def structure(self):
        """Boundary endpoints, internal edges and strand components.

        Raises DiagramError if the arms cannot be paired consistently.
        """
        if self._structure is None:
            self._structure = _resolve_structure(self)
        return self._structure

    def boundary(self):
        """BoundaryConfig: one :class:`Endpoint` per boundary position.

        Position k sits between ``open_regions[k]`` and ``open_regions[k+1]``.
        """
        return self.structure()['endpoints']

    def components(self):
        """(open strands, number of closed components).

        Each open strand is a pair (start position, end position) of boundary
        positions together with its colour.
        """
        s = self.structure()
        return s['strands'], s['closed']


def _arm_key(colour, left, right):
    return (colour, left, right)


def _resolve_structure(d):
    opens = d.open_regions
    m = len(opens)
    out_arms = defaultdict(list)
    in_arms = defaultdict(list)
    for i, c in enumerate(d.crossings):
        for name, colour, outgoing, left, right in c.arms():
            key = _arm_key(colour, left, right)
            (out_arms if outgoing else in_arms)[key].append((i, name))

    # candidates for each boundary position
    candidates = []
    for k in range(m):
        x, y = opens[k], opens[(k + 1) % m]
        cand = []
        for key, arms in in_arms.items():
            if key[1] == x and key[2] == y:
                cand.extend((a, key, True) for a in arms)
        for key, arms in out_arms.items():
            if key[1] == y and key[2] == x:
                cand.extend((a, key, False) for a in arms)
        candidates.append(sorted(cand))

    balance = Counter()
    for key, arms in out_arms.items():
        balance[key] += len(arms)
    for key, arms in in_arms.items():
        balance[key] -= len(arms)

    chosen = [None] * m
    used = set()
    found = []

    def search(k):
        if k == m:
            if any(balance.values()):
                return False
            for edges in _matchings(out_arms, in_arms, used):
                if _faces_ok(d, chosen, edges):
                    found.append((list(chosen), edges))
                    return True
            return False
        for arm, key, incoming in candidates[k]:
            if arm in used:
                continue
            # an incoming arm fed from the boundary no longer needs an outgoing partner
            delta = 1 if incoming else -1
            balance[key] += delta
            used.add(arm)
            chosen[k] = (arm, key, incoming)
            if search(k + 1):
                return True
            used.discard(arm)
            balance[key] -= delta
        return False

    if not search(0):
        raise DiagramError('cannot pair crossing arms with the boundary so that every '
                           'region is a disc; quadrant data is inconsistent')
    chosen, edges = found[0]

    endpoints = []
    for k, (arm, key, incoming) in enumerate(chosen):
        endpoints.append(Endpoint(key[0], incoming, (opens[k], opens[(k + 1) % m]), arm))

    # trace strands
    boundary_out = {e.arm: k for k, e in enumerate(endpoints) if not e.incoming}
    visited = set()
    strands = []
    for k, e in enumerate(endpoints):
        if not e.incoming:
            continue
        arm = e.arm
        while True:
            visited.add(arm)
            nxt = (arm[0], _THROUGH[arm[1]])
            visited.add(nxt)
            if nxt in boundary_out:
                strands.append((k, boundary_out[nxt], e.colour))
                break
            arm = edges[nxt]
    closed = 0
    for start in sorted(edges.values()):
        if start in visited:
            continue
        closed += 1
        arm = start
        while arm not in visited:
            visited.add(arm)
            nxt = (arm[0], _THROUGH[arm[1]])
            visited.add(nxt)
            arm = edges[nxt]
    return {'endpoints': tuple(endpoints), 'edges': edges,
            'strands': tuple(strands), 'closed': closed}


def _matchings(out_arms, in_arms, used):
    """All ways to join the free outgoing arms to free incoming arms of equal key."""
    groups = []
    for key in sorted(set(out_arms) | set(in_arms)):
        outs = [a for a in out_arms.get(key, []) if a not in used]
        ins = [a for a in in_arms.get(key, []) if a not in used]
        groups.append((outs, ins))
    options = [[list(zip(outs, perm)) for perm in permutations(ins)] for outs, ins in groups]
    for combo in product(*options):
        yield {a: b for pairs in combo for a, b in pairs}


# clockwise neighbour of each arm, and the quadrant (0-based) between them
_CW = {'NE': 'SE', 'SE': 'SW', 'SW': 'NW', 'NW': 'NE'}
_CW_QUADRANT = {'NE': 3, 'SE': 2, 'SW': 1, 'NW': 0}


def _faces_ok(d, chosen, edges):
    """Trace every face keeping it on the left; each region must be one cycle."""
    m = len(d.open_regions)
    partner = {}
    for a, b in edges.items():
        partner[a] = ('arm', b)
        partner[b] = ('arm', a)
    for k, (arm, _, _) in enumerate(chosen):
        partner[arm] = ('end', k)
    entry = [arm for arm, _, _ in chosen]
    seen = set()
    cycles = Counter()
    for start in partner:
        if start in seen:
            continue
        label = d.crossings[start[0]].quadrants[_CW_QUADRANT[start[1]]]
        arm, touches = start, False
        while arm not in seen:
            seen.add(arm)
            if d.crossings[arm[0]].quadrants[_CW_QUADRANT[arm[1]]] != label:
                return False
            kind, other = partner[(arm[0], _CW[arm[1]])]
            if kind == 'end':
                touches = True
                arm = entry[(other + 1) % m]
            else:
                arm = other
        if arm != start:
            return False
        if touches != (label in d.open_regions):
            return False
        cycles[label] += 1
    return all(v == 1 for v in cycles.values()) and len(cycles) == len(d.regions)


# ---------------------------------------------------------------------------
# parsing and serialisation

_TOKEN = re.compile(r'\s*(?:([{},])|([^\s{},]+))')


def _tokenise(text):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == '':
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise DiagramError('unexpected character {!r}'.format(text[pos]), pos)
        tok = m.group(1) or m.group(2)
        tokens.append((tok, m.start(1) if m.group(1) else m.start(2)))
        pos = m.end()
    return tokens


def parse_diagram(text, check=True):
    """Parse the v-format.  With ``check`` the result must also validate."""
    tokens = _tokenise(text)
    tokens.append(('<end>', len(text)))
    i = 0

    def expect(tok):
        nonlocal i
        got, pos = tokens[i]
        if got != tok:
            raise DiagramError('expected {!r}, got {!r}'.format(tok, got), pos)
        i += 1

    def group():
        nonlocal i
        start = tokens[i][1]
        expect('{')
        items = []
        while True:
            tok, pos = tokens[i]
            if tok in '{},' or tok == '<end>':
                raise DiagramError('expected a label, got {!r}'.format(tok), pos)
            items.append(tok)
            i += 1
            tok, pos = tokens[i]
            if tok == ',':
                i += 1
                continue
            expect('}')
            return items, start

    expect('{')
    opens, _ = group()
    rows = []
    while tokens[i][0] == ',':
        i += 1
        rows.append(group())
    expect('}')
    if tokens[i][0] != '<end>':
        raise DiagramError('trailing input', tokens[i][1])
    if not rows:
        raise DiagramError('no crossings listed', tokens[-1][1])

    crossings = []
    for items, pos in rows:
        if len(items) != 7:
            raise DiagramError('crossing row needs 7 entries, got {}'.format(len(items)), pos)
        if items[4] not in ('L', 'R'):
            raise DiagramError('crossing sign must be L or R, got {!r}'.format(items[4]), pos)
        crossings.append(Crossing(tuple(items[:4]), items[4], items[5], items[6]))
    d = TangleDiagram(opens, crossings)
    if check:
        problems = validate_diagram(d)
        if problems:
            raise DiagramError('invalid diagram: ' + '; '.join(problems))
    return d


def serialise(d):
    rows = ['{' + ', '.join(d.open_regions) + '}']
    for c in d.crossings:
        rows.append('{' + ', '.join(list(c.quadrants) + [c.sign, c.over, c.under]) + '}')
    return '{' + ', '.join(rows) + '}'


# ---------------------------------------------------------------------------
# validation

def validate_diagram(d):
    """List of violated invariants; empty iff the diagram is valid."""
    problems = []
    if not d.crossings:
        return ['no crossings']
    opens = d.open_regions
    if len(set(opens)) != len(opens):
        problems.append('open regions repeated')
    if len(opens) < 2 or len(opens) % 2:
        problems.append('number of open regions must be even and positive, got {}'.format(len(opens)))
    for name in d.colours:
        if name in RESERVED_NAMES:
            problems.append('reserved name {!r} used as a colour'.format(name))

    uses = Counter(r for c in d.crossings for r in c.quadrants)
    for r in opens:
        if uses[r] == 0:
            problems.append('open region {} meets no crossing'.format(r))
    for r, count in uses.items():
        if count == 1 and r not in opens:
            # a closed region seen once can only be a curl: a side quadrant
            # of a crossing whose two strands are the same colour
            c, k = next((c, k) for c in d.crossings for k, x in enumerate(c.quadrants) if x == r)
            if k not in (1, 3) or c.over != c.under:
                problems.append('dangling region {}'.format(r))

    # connectivity of the crossing/region incidence graph
    adj = defaultdict(set)
    for i, c in enumerate(d.crossings):
        for r in c.quadrants:
            adj[('x', i)].add(('r', r))
            adj[('r', r)].add(('x', i))
    start = ('x', 0)
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) != len(adj):
        problems.append('diagram is not connected')

    expected = len(d.crossings) + d.n_strands + 1
    if len(d.regions) != expected:
        problems.append('Euler mismatch: {} regions, expected {} for {} crossings and {} strands'
                        .format(len(d.regions), expected, len(d.crossings), d.n_strands))

    if not problems:
        try:
            ends = d.boundary()
        except DiagramError as err:
            problems.append(str(err))
        else:
            flow = Counter()
            for e in ends:
                flow[e.colour] += 1 if e.incoming else -1
            for colour, v in sorted(flow.items()):
                if v:
                    problems.append('colour {} has unbalanced boundary orientation'.format(colour))
    return problems


def is_valid(d):
    return not validate_diagram(d)


# ---------------------------------------------------------------------------
# transforms

def _fresh_region(d, prefix='r'):
    taken = set(d.regions)
    k = 1
    while '{}{}'.format(prefix, k) in taken:
        k += 1
    return '{}{}'.format(prefix, k)


def add_twist(d, open_region, sign):
    """Add one crossing just outside the boundary arc of ``open_region``.

    The two endpoints flanking the region are twisted around each other; the
    old region becomes closed and a fresh open region takes its place.
    """
    if open_region not in d.open_regions:
        raise DiagramError('region {} is not open'.format(open_region))
    if sign not in ('L', 'R'):
        raise DiagramError('sign must be L or R')
    opens = d.open_regions
    m = len(opens)
    k = opens.index(open_region)
    ends = d.boundary()
    e1 = ends[(k - 1) % m]     # between previous region and the twisted one
    e2 = ends[k]               # between the twisted region and the next one
    prev, nxt = opens[(k - 1) % m], opens[(k + 1) % m]
    new = _fresh_region(d)
    # local picture: old region at the bottom, new one on top,
    # previous region on the right, next region on the left
    bottom, top, right, left = open_region, new, prev, nxt
    out1, out2 = not e1.incoming, not e2.incoming
    # strand A runs SE<->NW through e1, strand B runs SW<->NE through e2
    if out1 and out2:
        quads, ne_strand = (top, left, bottom, right), 'B'
    elif not out1 and not out2:
        quads, ne_strand = (bottom, right, top, left), 'B'
    elif out1:
        quads, ne_strand = (left, bottom, right, top), 'A'
    else:
        quads, ne_strand = (right, top, left, bottom), 'A'
    colour = {'A': e1.colour, 'B': e2.colour}
    other = 'A' if ne_strand == 'B' else 'B'
    if sign == 'L':
        over, under = colour[ne_strand], colour[other]
    else:
        over, under = colour[other], colour[ne_strand]
    new_opens = opens[:k] + (new,) + opens[k + 1:]
    return TangleDiagram(new_opens, d.crossings + (Crossing(quads, sign, over, under),))


def switch_crossing(d, index):
    """Change one crossing between over and under (sign flips)."""
    c = d.crossings[index]
    flipped = Crossing(c.quadrants, 'R' if c.sign == 'L' else 'L', c.under, c.over)
    cs = list(d.crossings)
    cs[index] = flipped
    return TangleDiagram(d.open_regions, cs)


def mirror(d):
    """Mirror image: every crossing switched."""
    for i in range(len(d.crossings)):
        d = switch_crossing(d, i)
    return d


def reverse_strands(d, colours):
    """Reverse the orientation of every strand carrying one of ``colours``."""
    colours = set(colours)
    unknown = colours - set(d.colours)
    if unknown:
        raise DiagramError('unknown colour(s): {}'.format(', '.join(sorted(unknown))))
    cs = []
    for c in d.crossings:
        ne, nw = (c.over, c.under) if c.sign == 'L' else (c.under, c.over)
        r_ne, r_nw = ne in colours, nw in colours
        q = c.quadrants
        if r_ne and r_nw:
            cs.append(Crossing((q[2], q[3], q[0], q[1]), c.sign, c.over, c.under))
        elif r_ne:
            cs.append(Crossing((q[1], q[2], q[3], q[0]), _flip(c.sign), c.over, c.under))
        elif r_nw:
            cs.append(Crossing((q[3], q[0], q[1], q[2]), _flip(c.sign), c.over, c.under))
        else:
            cs.append(c)
    return TangleDiagram(d.open_regions, cs)


def _flip(sign):
    return 'R' if sign == 'L' else 'L'


def rename(d, regions=None, colours=None):
    """Relabel regions and/or colours."""
    regions = regions or {}
    colours = colours or {}
    r = lambda x: regions.get(x, x)
    c = lambda x: colours.get(x, x)
    return TangleDiagram([r(x) for x in d.open_regions],
                         [Crossing(tuple(r(x) for x in cr.quadrants), cr.sign, c(cr.over), c(cr.under))
                          for cr in d.crossings])


def cap_off(d, open_region):
    """Join the two endpoints flanking ``open_region`` by a boundary-parallel arc.

    The region becomes closed and its two open neighbours merge (the label
    that comes first in the open-region list survives).  If the two joined
    strands carry different colours, the second colour is renamed to the first.
    """
    opens = d.open_regions
    if len(opens) < 4:
        raise DiagramError('capping needs at least 4 endpoints')
    if open_region not in opens:
        raise DiagramError('region {} is not open'.format(open_region))
    m = len(opens)
    k = opens.index(open_region)
    ends = d.boundary()
    e1, e2 = ends[(k - 1) % m], ends[k]
    if e1.incoming == e2.incoming:
        raise DiagramError('cannot cap region {}: both endpoints point {}'
                           .format(open_region, 'in' if e1.incoming else 'out'))
    prev, nxt = opens[(k - 1) % m], opens[(k + 1) % m]
    keep, drop = (prev, nxt) if opens.index(prev) < opens.index(nxt) else (nxt, prev)
    colour_map = {e2.colour: e1.colour} if e1.colour != e2.colour else {}
    new_opens = [r for r in opens if r not in (open_region, drop)]
    capped = rename(TangleDiagram(new_opens, d.crossings), {drop: keep}, colour_map)
    return capped


def rotate(d, steps):
    """Start the boundary list ``steps`` places later.

    For a 4-ended diagram with sites read as (left, bottom, right, top),
    ``rotate(d, 2)`` is the half turn in the plane.
    """
    k = steps % len(d.open_regions)
    return TangleDiagram(d.open_regions[k:] + d.open_regions[:k], d.crossings)


def smooth_crossing(d, index):
    """Oriented resolution of one crossing.

    Each incoming arm is joined to the outgoing arm on its own side, so the
    side quadrants 2 and 4 stay apart while quadrants 1 and 3 merge.  A
    second colour running through the crossing is renamed to the over colour.
    """
    c = d.crossings[index]
    top, bottom = c.quadrants[0], c.quadrants[2]
    if top == bottom:
        raise DiagramError('smoothing crossing {} would leave an annular face'.format(index))
    opens = set(d.open_regions)
    if top in opens and bottom in opens:
        raise DiagramError('smoothing crossing {} would merge two open regions'.format(index))
    keep, drop = (bottom, top) if bottom in opens else (top, bottom)
    rest = d.crossings[:index] + d.crossings[index + 1:]
    colours = {c.under: c.over} if c.under != c.over else {}
    return rename(TangleDiagram(d.open_regions, rest), {drop: keep}, colours)


def tangle_sum(left, right, suffix="'"):
    """Place two 4-ended diagrams side by side and join the middle endpoints.

    Open regions of both are read as (left, bottom, right, top).  The right
    diagram's regions get ``suffix`` appended where they clash; its bottom
    and top regions merge into those of ``left``, and the two facing side
    regions become one closed region.  Colours of joined strands are
    identified, keeping the name from ``left``.
    """
    for d in (left, right):
        if len(d.open_regions) != 4:
            raise DiagramError('tangle_sum needs 4-ended diagrams')
    taken = set(left.regions)
    ren = {}
    for r in right.regions:
        new = r
        while new in taken or new in ren.values():
            new += suffix
        ren[r] = new
    right = rename(right, ren)
    a1, b1, c1, d1 = left.open_regions
    a2, b2, c2, d2 = right.open_regions
    le, re_ = left.boundary(), right.boundary()
    pairs = [(le[2], re_[3]), (le[1], re_[0])]     # NE-NW and SE-SW
    for x, y in pairs:
        if x.incoming == y.incoming:
            raise DiagramError('joined endpoints have incompatible orientations')
    # colours: union-find over tagged names
    parent = {}

    def find(x):
        while parent.get(x, x) != x:
            x = parent[x]
        return x

    for x, y in pairs:
        rx, ry = find(('L', x.colour)), find(('R', y.colour))
        if rx != ry:
            lo, hi = sorted([rx, ry])       # names from the left diagram win
            parent[hi] = lo
    lmap = {c: find(('L', c))[1] for c in left.colours}
    rmap = {c: find(('R', c))[1] for c in right.colours}
    left = rename(left, colours=lmap)
    right = rename(right, {b2: b1, d2: d1, a2: c1}, rmap)
    return TangleDiagram((a1, b1, c2, d1), left.crossings + right.crossings)


__all__ = ['DiagramError', 'Crossing', 'Endpoint', 'TangleDiagram', 'parse_diagram',
           'serialise', 'validate_diagram', 'is_valid', 'add_twist', 'switch_crossing',
           'mirror', 'reverse_strands', 'rename', 'cap_off', 'rotate', 'smooth_crossing',
           'tangle_sum']

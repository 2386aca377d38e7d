"""
Generalised Kauffman states, transposition moves and the clock lattice.

A state puts one marker at every crossing, in one of its four quadrants,
such that every closed region receives exactly one marker and every open
region at most one.  The open regions that do receive a marker form the
state's site.
"""

from __future__ import annotations

import os
from collections import defaultdict
from typing import NamedTuple

from .diagram import DiagramError

# quadrant indices (0-based) on either side of each arm
_ARM_SIDES = {'NE': (0, 3), 'NW': (1, 0), 'SW': (1, 2), 'SE': (2, 3)}


class KauffmanState(NamedTuple):
    """Markers as 1-based quadrant indices, one per crossing in order."""
    markers: tuple

    def regions(self, d):
        return tuple(c.quadrants[k - 1] for c, k in zip(d.crossings, self.markers))

    def site(self, d):
        opens = set(d.open_regions)
        return frozenset(r for r in self.regions(d) if r in opens)

    def word(self, d):
        """The g(x) word: occupied region labels in crossing order."""
        return ''.join(self.regions(d))


class TranspositionMove(NamedTuple):
    crossings: tuple       # (A, B)
    regions: tuple         # (R1, R2): A moves R1 -> R2, B moves R2 -> R1
    direction: str         # 'clockwise' or 'anticlockwise'
    result: KauffmanState


class StateLimitExceeded(DiagramError):
    pass


def site_word(site):
    return ''.join(sorted(site))


def max_states():
    return int(os.environ.get('TFK_MAX_STATES', 10 ** 7))


def enumerate_states(d, limit=None):
    """All Kauffman states of ``d``, grouped by site.

    Returns a dict mapping site (frozenset) to a list of states; sites are
    ordered by their word and states by their marker vectors.
    """
    limit = max_states() if limit is None else limit
    opens = set(d.open_regions)
    closed = [r for r in d.regions if r not in opens]
    n = len(d.crossings)
    # crossings adjacent to each closed region
    touching = defaultdict(set)
    for i, c in enumerate(d.crossings):
        for r in c.quadrants:
            touching[r].add(i)
    order = sorted(range(n), key=lambda i: (len(set(d.crossings[i].quadrants)), i))

    found = []
    markers = [0] * n
    used = set()
    done = set()

    def feasible():
        # every unfilled closed region still needs an unplaced crossing
        for r in closed:
            if r not in used and not (touching[r] - done):
                return False
        return True

    def place(pos):
        if pos == n:
            if all(r in used for r in closed):
                found.append(tuple(markers))
                if len(found) > limit:
                    raise StateLimitExceeded('more than {} states'.format(limit))
            return
        i = order[pos]
        quads = d.crossings[i].quadrants
        for k in range(4):
            r = quads[k]
            if r in used:
                continue
            used.add(r)
            done.add(i)
            markers[i] = k + 1
            if feasible():
                place(pos + 1)
            done.discard(i)
            used.discard(r)
        markers[i] = 0

    place(0)
    by_site = defaultdict(list)
    for m in found:
        x = KauffmanState(m)
        by_site[x.site(d)].append(x)
    return {s: sorted(by_site[s]) for s in sorted(by_site, key=site_word)}


def states_of_site(d, site):
    site = frozenset(site)
    return enumerate_states(d).get(site, [])


def _internal_edges(d):
    edges = d.structure()['edges']
    result = []
    for (a, arm_a), (b, arm_b) in sorted(edges.items()):
        if a == b:
            continue
        c = d.crossings[a]
        arms = {name: (left, right) for name, _, _, left, right in c.arms()}
        left, right = arms[arm_a]
        result.append((a, arm_a, b, arm_b, left, right))
    return result


def _step(k_from, k_to):
    """Direction of a one-quadrant step (0-based indices, anticlockwise order)."""
    if (k_from - 1) % 4 == k_to:
        return 'clockwise'
    if (k_from + 1) % 4 == k_to:
        return 'anticlockwise'
    return None


def transposition_moves(d, x, report=None):
    """All transposition moves available from state ``x``.

    Moves are found along internal edges: the crossings A and B at the two
    ends of an edge, with markers in the two regions flanking that edge,
    swap the regions.  Candidates whose two marker steps disagree in
    direction are not moves; they are appended to ``report`` if given.
    """
    moves = {}
    for a, arm_a, b, arm_b, left, right in _internal_edges(d):
        ka, kb = x.markers[a] - 1, x.markers[b] - 1
        sides_a, sides_b = _ARM_SIDES[arm_a], _ARM_SIDES[arm_b]
        if ka not in sides_a or kb not in sides_b:
            continue
        ra = d.crossings[a].quadrants[ka]
        rb = d.crossings[b].quadrants[kb]
        if {ra, rb} != {left, right} or ra == rb:
            continue
        na = sides_a[1 - sides_a.index(ka)]
        nb = sides_b[1 - sides_b.index(kb)]
        if d.crossings[a].quadrants[na] != rb or d.crossings[b].quadrants[nb] != ra:
            continue
        da, db = _step(ka, na), _step(kb, nb)
        if da != db:
            if report is not None:
                report.append(((a, b), (ra, rb)))
            continue
        m = list(x.markers)
        m[a], m[b] = na + 1, nb + 1
        y = KauffmanState(tuple(m))
        moves.setdefault((y, da), TranspositionMove((a, b), (ra, rb), da, y))
    return [moves[k] for k in sorted(moves)]


def apply_move(x, move):
    return move.result


def _move_graph(d, states):
    index = {x: i for i, x in enumerate(states)}
    succ = defaultdict(set)
    for x in states:
        for mv in transposition_moves(d, x):
            if mv.direction == 'clockwise':
                succ[index[x]].add(index[mv.result])
    return succ


def clocked_state(d, site, start=None):
    """The unique state of ``site`` admitting no anticlockwise move.

    Found by following anticlockwise moves from ``start`` (default: the
    first state) until none is left.
    """
    states = states_of_site(d, site)
    if not states:
        raise DiagramError('site {} has no states'.format(site_word(site)))
    x = states[0] if start is None else start
    while True:
        step = [m for m in transposition_moves(d, x) if m.direction == 'anticlockwise']
        if not step:
            return x
        x = step[0].result


def counterclocked_state(d, site, start=None):
    """The unique state of ``site`` admitting no clockwise move."""
    states = states_of_site(d, site)
    if not states:
        raise DiagramError('site {} has no states'.format(site_word(site)))
    x = states[0] if start is None else start
    while True:
        step = [m for m in transposition_moves(d, x) if m.direction == 'clockwise']
        if not step:
            return x
        x = step[0].result


def _reachability(n, succ):
    reach = []
    for i in range(n):
        seen = {i}
        stack = [i]
        while stack:
            v = stack.pop()
            for w in succ[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        reach.append(seen)
    return reach


def lattice_report(d, site, full_check_limit=12):
    """Structure of the clockwise move graph on the states of one site."""
    states = states_of_site(d, site)
    n = len(states)
    report = {'site': site_word(site), 'states': n}
    if n == 0:
        report.update(connected=True, acyclic=True, tops=[], bottoms=[], lattice=None)
        return report
    succ = _move_graph(d, states)
    # undirected connectivity
    und = defaultdict(set)
    for v, ws in succ.items():
        for w in ws:
            und[v].add(w)
            und[w].add(v)
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for w in und[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    reach = _reachability(n, succ)
    acyclic = all(not (i in reach[j] and j in reach[i]) for i in range(n) for j in succ[i])
    has_pred = {w for ws in succ.values() for w in ws}
    sources = [states[i] for i in range(n) if i not in has_pred]
    sinks = [states[i] for i in range(n) if not succ[i]]
    report.update(connected=len(seen) == n, acyclic=acyclic,
                  clocked=sources, counterclocked=sinks)
    if n <= full_check_limit and acyclic:
        report['lattice'] = _is_lattice(n, reach)
    else:
        report['lattice'] = None
    return report


def _is_lattice(n, reach):
    # x <= y iff y is reachable from x by clockwise moves
    le = lambda x, y: y in reach[x]
    for x in range(n):
        for y in range(x + 1, n):
            ups = [z for z in range(n) if le(x, z) and le(y, z)]
            joins = [z for z in ups if all(le(z, w) for w in ups)]
            downs = [z for z in range(n) if le(z, x) and le(z, y)]
            meets = [z for z in downs if all(le(w, z) for w in downs)]
            if len(joins) != 1 or len(meets) != 1:
                return False
    return True


__all__ = ['KauffmanState', 'TranspositionMove', 'StateLimitExceeded', 'site_word',
           'enumerate_states', 'states_of_site', 'transposition_moves', 'apply_move',
           'clocked_state', 'counterclocked_state', 'lattice_report']

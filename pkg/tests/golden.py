"""Reference listings transcribed by hand from the published example output.

Exponents are in the whole-power convention used throughout the package,
δ stored doubled.
"""

# (site, coefficient, p, q, h, 2δ): the 20 terms of the hatted polynomial
EXAMPLE_HAT = [
    ('d', 1, -2, -6, -1, -2), ('b', 1, 2, -6, 0, -2), ('d', 1, 2, -6, 0, -2),
    ('d', 1, -2, -2, 0, -2), ('b', 1, 2, -2, 1, -2), ('d', 1, -2, 2, 1, -2),
    ('b', 1, 2, 2, 2, -2), ('b', 1, -2, 6, 2, -2), ('d', 1, -2, 6, 2, -2),
    ('b', 1, 2, 6, 3, -2), ('c', 1, -2, 0, 0, -1), ('c', 1, 2, 0, 1, -1),
    ('a', 1, 0, -6, -1, -1), ('c', 1, -2, -4, -1, -1), ('c', 1, 2, -4, 0, -1),
    ('a', 2, 0, -2, 0, -1), ('a', 2, 0, 2, 1, -1), ('c', 1, -2, 4, 1, -1),
    ('c', 1, 2, 4, 2, -1), ('a', 1, 0, 6, 2, -1),
]

# (site, state word, p, q, h): the 22 rows of the generator listing (δ forgotten)
EXAMPLE_ROWS = [
    ('c', 'hcgfe', -2, 0, 0), ('c', 'hcgef', 2, 0, 1), ('a', 'hgfea', 0, -6, -1),
    ('d', 'hgdfe', -2, -6, -1), ('d', 'hgdef', 2, -6, 0), ('b', 'hgfeb', 2, -6, 0),
    ('c', 'hgcfe', -2, -4, -1), ('c', 'hgcef', 2, -4, 0), ('a', 'hfgea', 0, -2, 0),
    ('a', 'hgfae', 0, -2, 0), ('d', 'hgfde', -2, -2, 0), ('b', 'hfgeb', 2, -2, 1),
    ('a', 'fhgea', 0, 2, 1), ('a', 'hfgae', 0, 2, 1), ('d', 'hfgde', -2, 2, 1),
    ('b', 'fhgeb', 2, 2, 2), ('c', 'chgfe', -2, 4, 1), ('c', 'chgef', 2, 4, 2),
    ('a', 'fhgae', 0, 6, 2), ('b', 'bhgfe', -2, 6, 2), ('d', 'fhgde', -2, 6, 2),
    ('b', 'bhgef', 2, 6, 3),
]

# (name, site, A_p, A_q, δ, cancelled) with half-integer Alexander gradings,
# exactly as printed, including the cancelled generators
PRETZEL_TABLE = [
    ('a1y1', 'a', 0, 3, -0.5, False), ('a1y2', 'a', 0, 1, -0.5, False),
    ('a1y3', 'a', 0, -1, -0.5, False), ('a2y1', 'a', 0, 1, -0.5, False),
    ('a2y2', 'a', 0, -1, -0.5, False), ('a2y3', 'a', 0, -3, -0.5, False),
    ('by1', 'b', -1, 1, 0, False), ('by2', 'b', -1, -1, 0, False),
    ('by3', 'b', -1, -3, 0, True), ("x1b'", 'b', 1, -3, -1, False),
    ("x2b'", 'b', -1, -3, -1, True),
    ('x1c1', 'c', 1, 2, -0.5, False), ('x1c2', 'c', 1, 0, -0.5, False),
    ('x1c3', 'c', 1, -2, -0.5, False), ('x2c1', 'c', -1, 2, -0.5, False),
    ('x2c2', 'c', -1, 0, -0.5, False), ('x2c3', 'c', -1, -2, -0.5, False),
    ('dy1', 'd', -1, -3, 0, True), ('dy2', 'd', 1, 1, 0, False),
    ('dy3', 'd', 1, -1, 0, False), ("x1d'", 'd', 1, 3, -1, True),
    ("x2d'", 'd', -1, 3, -1, False),
]

# the printed grading of dy1 cannot be right: it is cancelled against x1d',
# and a cancelled pair has equal Alexander gradings
PRETZEL_CORRECTIONS = {'dy1': (1, 3)}


def corrected_pretzel_table():
    out = []
    for name, site, ap, aq, delta, cancelled in PRETZEL_TABLE:
        if name in PRETZEL_CORRECTIONS:
            ap, aq = PRETZEL_CORRECTIONS[name]
        out.append((name, site, ap, aq, delta, cancelled))
    return out

import random

import pytest
from hypothesis import given, strategies as st

import identities as ids
from corpus import (EXAMPLE_V, PRETZEL_V, fixed_corpus, mutant_pairs, one_crossing,
                    random_diagram, single_colour, twist_column)
from golden import EXAMPLE_HAT, EXAMPLE_ROWS
from tanglefloer.alexander import (DELTA, H, GradedPoly, format_term, generator_table,
                                   generator_table_tsv, label_of, linking_number, nabla,
                                   nabla_all, nabla_hat, nabla_via_determinant, render_grid,
                                   specialise)
from tanglefloer.diagram import DiagramError, cap_off, parse_diagram
from tanglefloer.states import site_word

seeds = st.integers(min_value=0, max_value=10 ** 6)
small_ints = st.integers(min_value=-3, max_value=3)


def mono(**exps):
    return GradedPoly.monomial(exps)


def term_tuples(table, colours=('p', 'q')):
    out = []
    for s, poly in table.items():
        for m, c in poly.items():
            e = dict(m)
            out.append((site_word(s), c) + tuple(e.get(x, 0) for x in colours)
                       + (e.get(H, 0), e.get(DELTA, 0)))
    return sorted(out)


# -- GradedPoly --------------------------------------------------------------

def test_poly_arithmetic():
    x = mono(p=1)
    assert x * mono(p=-1) == 1
    assert (x + x) == GradedPoly({(('p', 1),): 2})
    assert not (x - x)
    assert (x + 1) ** 2 == mono(p=2) + 2 * x + 1


def test_poly_subs_and_units():
    f = mono(p=2, h=1) - mono(p=-2)
    assert f.subs({H: -1, 'p': 1}) == -2
    assert f.equal_up_to_unit(-mono(q=4) * f)
    assert not f.equal_up_to_unit(f + 1)
    assert f.equal_up_to_sign(-f)


def test_delta_stored_doubled():
    assert format_term(((DELTA, -1),), 1) == 'δ^{-1/2}'
    assert format_term(((DELTA, -2), ('q', -6)), 2) == '2 * δ^-1 * q^-6'


@given(st.dictionaries(st.tuples(small_ints, small_ints), st.integers(-3, 3), max_size=5),
       st.dictionaries(st.tuples(small_ints, small_ints), st.integers(-3, 3), max_size=5))
def test_poly_ring_laws(a, b):
    f = GradedPoly({(('p', i), ('q', j)): c for (i, j), c in a.items()})
    g = GradedPoly({(('p', i), ('q', j)): c for (i, j), c in b.items()})
    assert f * g == g * f
    assert (f + g) * g == f * g + g * g
    assert f - f == 0


# -- labels and the state sum -------------------------------------------------

def test_labels_positive_crossing():
    d = one_crossing('L')
    assert label_of(d, 0, 1) == mono(p=1, q=1) * GradedPoly.monomial({DELTA: 1})
    assert label_of(d, 0, 2) == mono(p=1, q=-1)


def test_labels_negative_crossing():
    d = one_crossing('R')
    # over q, under p after switching
    assert label_of(d, 0, 3) == mono(h=1, q=1, p=1) * GradedPoly.monomial({DELTA: -1})
    assert label_of(d, 0, 2) == label_of(one_crossing('L'), 0, 2).rename({'p': 'q', 'q': 'p'})


def test_one_crossing_hat():
    table = {site_word(s): p for s, p in nabla_hat(one_crossing('L')).items()}
    o, u = 'p', 'q'
    half = GradedPoly.monomial({DELTA: 1})
    assert table['a'] == mono(**{o: 1, u: -1})
    assert table['d'] == mono(**{o: 1, u: 1}) * half
    assert table['b'] == mono(h=-1, **{o: -1, u: -1}) * half
    assert table['c'] == mono(**{o: -1, u: 1})


def test_example_hat_listing():
    got = term_tuples(nabla_hat(parse_diagram(EXAMPLE_V)))
    assert got == sorted(EXAMPLE_HAT)
    assert len(got) == 20
    assert [t[1] for t in got].count(2) == 2


def test_example_generator_rows():
    d = parse_diagram(EXAMPLE_V)
    rows = []
    for s, w, m in generator_table(d):
        e = dict(next(iter(m.items()))[0])
        rows.append((s, w, e.get('p', 0), e.get('q', 0), e.get(H, 0)))
    assert sorted(rows) == sorted(EXAMPLE_ROWS)


def test_rows_sum_to_hat():
    d = parse_diagram(PRETZEL_V)
    hat = {site_word(s): p for s, p in nabla_hat(d).items()}
    sums = {}
    for s, w, m in generator_table(d):
        sums[s] = sums.get(s, GradedPoly()) + m
    assert sums == hat


def test_generator_table_tsv():
    text = generator_table_tsv(one_crossing())
    assert text.splitlines()[0] == 'site\tstate\tmonomial'
    assert len(text.splitlines()) == 5


def test_empty_site_is_zero():
    assert nabla(one_crossing(), {'a', 'b'}) == 0


def test_specialise():
    assert specialise(mono(h=3) * GradedPoly.monomial({DELTA: 3})) == -1


def test_trefoil_matches_skein_recursion():
    # N_n = N_{n-2} + (x^2 - x^-2) N_{n-1}, N_0 = 0 (split), N_1 = 1 (unknot)
    z = mono(t=2) - mono(t=-2)
    expect = [GradedPoly(), GradedPoly.one()]
    for n in range(2, 6):
        expect.append(expect[n - 2] + z * expect[n - 1])
    for n in range(1, 6):
        tw = twist_column(n)
        capped = single_colour(cap_off(tw, tw.open_regions[0]))
        assert nabla(capped, frozenset()) == expect[n]
    assert expect[3] == mono(t=4) - 1 + mono(t=-4)


def test_linking_numbers():
    d = parse_diagram(EXAMPLE_V)
    assert linking_number(d, 'p', 'q') == 1
    assert linking_number(d, 'q', 'p') == 1
    with pytest.raises(DiagramError):
        linking_number(d, 'p', 'zz')
    with pytest.raises(DiagramError):
        linking_number(d, 'p', 'p')


def test_linking_of_one_crossing():
    assert linking_number(one_crossing('L'), 'p', 'q') == 0.5
    assert linking_number(one_crossing('R'), 'p', 'q') == -0.5
    assert linking_number(twist_column(4), 'p', 'q') == 2


# -- determinant oracle ------------------------------------------------------

def test_determinant_one_crossing():
    d = one_crossing()
    for s in nabla_hat(d):
        assert nabla(d, s).equal_up_to_unit(nabla_via_determinant(d, s))


def test_determinant_example_site_b():
    d = parse_diagram(EXAMPLE_V)
    assert nabla(d, {'b'}).equal_up_to_unit(nabla_via_determinant(d, {'b'}))


def test_determinant_wrong_site_size():
    with pytest.raises(DiagramError):
        nabla_via_determinant(parse_diagram(EXAMPLE_V), {'a', 'b'})


# -- grid ----------------------------------------------------------------------

def test_grid_zero_and_monomial():
    assert render_grid(GradedPoly(), ('p', 'q')) == ''
    lines = render_grid(mono(p=1, q=-1), ('p', 'q')).splitlines()
    assert len(lines) == 2 and len(lines[0].split()) == 2
    with pytest.raises(ValueError):
        render_grid(mono(p=1, q=1, r=1), ('p', 'q'))


def test_grid_pretzel_site_a():
    d = parse_diagram(PRETZEL_V)
    poly = nabla_hat(d)[frozenset('a')]
    assert sum(abs(c) for _, c in poly.items()) == 6
    rows = render_grid(poly, ('p', 'q')).splitlines()
    assert len(rows) == 2          # header plus the single row p = 0
    assert rows[1].split()[0] == '0'


# -- identities on the fixed corpus --------------------------------------------

CORPUS = fixed_corpus()


@pytest.mark.parametrize('name', sorted(CORPUS))
def test_identities_on_corpus(name):
    d = CORPUS[name]
    assert all(ids.mirror_checks(d))
    assert all(ids.reversal_checks(d))
    assert all(ids.skein_checks(d))
    assert all(ids.exponent_parity_checks(d))
    assert all(ids.knot_normalisation_checks(d))
    assert all(ids.four_ended_checks(d))
    assert all(ids.determinant_checks(d))


def test_identities_apply_somewhere():
    seen = {k: 0 for k in ('skein', 'knot', 'bd', 'ring')}
    for d in CORPUS.values():
        seen['skein'] += len(ids.skein_checks(d))
        seen['knot'] += len(ids.knot_normalisation_checks(d))
        seen['bd'] += len(ids.four_ended_checks(d))
        seen['ring'] += len(ids.closed_ring_checks(d))
    assert all(v > 0 for v in seen.values()), seen


def test_glueing_on_corpus_pairs():
    fours = [d for d in CORPUS.values() if len(d.open_regions) == 4]
    checked = 0
    for left, right in zip(fours, fours[1:] + fours[:1]):
        res = ids.glueing_checks(left, right)
        checked += len(res)
        assert all(res)
    assert checked >= 20


@pytest.mark.parametrize('name', sorted(mutant_pairs()))
def test_mutants_agree(name):
    first, second = mutant_pairs()[name]
    res = ids.mutation_checks(first, second)
    assert res and all(res)


def test_mutation_check_detects_a_change():
    first, second = mutant_pairs()['2|3,-2|1']
    from tanglefloer.diagram import switch_crossing
    assert not all(ids.mutation_checks(first, switch_crossing(second, 0)))


def test_closed_ring_on_corpus():
    for d in CORPUS.values():
        assert all(ids.closed_ring_checks(d))


@given(seeds)
def test_identities_random(seed):
    d = random_diagram(random.Random(seed), max_crossings=5)
    assert all(ids.mirror_checks(d))
    assert all(ids.reversal_checks(d))
    assert all(ids.skein_checks(d))
    assert all(ids.exponent_parity_checks(d))
    assert all(ids.knot_normalisation_checks(d))
    assert all(ids.four_ended_checks(d))


@given(seeds, seeds)
def test_glueing_random(s1, s2):
    left = random_diagram(random.Random(s1), max_crossings=3, ends=4)
    right = random_diagram(random.Random(s2), max_crossings=3, ends=4)
    assert all(ids.glueing_checks(left, right))


def test_nabla_all_matches_hat():
    d = parse_diagram(EXAMPLE_V)
    assert nabla_all(d) == {s: specialise(p) for s, p in nabla_hat(d).items()}

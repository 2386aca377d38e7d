import pytest
from hypothesis import given, strategies as st

from corpus import builder_diagram
from identities import closure_euler_prediction
from tanglefloer.pecmod import (PecMorphism, apply_homotopy, build, cancel_all_identities,
                                mapping_cone, skein_cone)
from tanglefloer.pairing import (ChainComplexF2, PairingError, box_tensor, close_tangle,
                                 closing_type_a, closure_components, homology, lazy_closure,
                                 rank_table_tsv, stabilisation_exponent, total_rank)


def test_closing_structure_shape():
    A = closing_type_a('a')
    assert sorted(A.generators) == ['a1', 'a2', 'b1', 'b2']
    assert len(A.action_list()) == 7
    assert A.max_length == 2


def test_closing_structure_shifts_with_site():
    C = closing_type_a('c')
    assert sorted(C.generators) == ['c1', 'c2', 'd1', 'd2']
    assert C.generators['c1'] == 3
    assert len(C.action_list()) == 7
    assert '; q4 -> d1' in str(C)


def test_closing_at_unknown_site():
    with pytest.raises(ValueError):
        closing_type_a('e')


def test_homology_of_small_complexes():
    C = ChainComplexF2(['x', 'y'], {'x': {'y'}})
    assert homology(C) == {}
    C = ChainComplexF2(['x', 'y', 'z'], {'x': {'y'}})
    assert total_rank(homology(C)) == 1
    with pytest.raises(PairingError):
        ChainComplexF2(['x', 'y', 'z'], {'x': {'y'}, 'y': {'z'}})


def test_graded_homology_respects_degrees():
    g = {'x': ((), 1), 'y': ((), 0), 'z': ((), 0)}
    C = ChainComplexF2(['x', 'y', 'z'], {'x': {'y'}}, g)
    assert homology(C) == {((), 0): 1}
    with pytest.raises(PairingError, match='homogeneous'):
        ChainComplexF2(['x', 'y'], {'x': {'y'}}, {'x': ((), 0), 'y': ((), 0)})


@pytest.mark.parametrize('spec, rank, i', [
    ('trivial:vertical', 2, 0), ('crossing:+', 2, 1), ('crossing:-', 2, 1),
    ('twist:3', 6, 1), ('twist:-3', 6, 1), ('twist:2', 4, 0),
])
def test_closure_ranks(spec, rank, i):
    r = close_tangle(build(spec), 'a')
    assert r.box_total == rank
    assert r.lazy_total == rank
    assert r.stabilisation == i


def test_trivial_closure_has_zero_euler():
    assert close_tangle(build('trivial:vertical'), 'a').euler == 0


def test_pretzel_closures():
    P = build('pretzel')
    assert close_tangle(P, 'a').box_total == 12
    assert close_tangle(P, 'b').box_total == 2
    assert stabilisation_exponent(P.po, 'b') == 1
    assert closure_components(P.po, 'a') == 2


def test_box_requires_reduced_module():
    cone = skein_cone(2)
    with pytest.raises(PairingError, match='identity arrows'):
        box_tensor(closing_type_a('a'), cone, 'a')


def test_box_differential_squares_to_zero():
    for spec in ('crossing:+', 'twist:4', 'pretzel'):
        for s in 'abcd':
            box_tensor(closing_type_a(s), build(spec), s)


def test_lazy_closure_of_trivial():
    C = lazy_closure(build('trivial:vertical'), 'a')
    assert len(C) == 2 and C.n_arrows() == 0


def test_rank_table():
    r = close_tangle(build('crossing:+'), 'a')
    text = rank_table_tsv(r.box_ranks)
    assert text.splitlines()[0].endswith('2delta\trank')
    assert sum(int(l.split('\t')[-1]) for l in text.splitlines()[1:]) == 2
    assert rank_table_tsv({(): 3}) == 'rank\n3\n'
    assert rank_table_tsv({}) == ''


def test_dot_output():
    C = box_tensor(closing_type_a('a'), build('crossing:+'), 'a')
    text = C.to_dot()
    assert text.startswith('digraph') and text.count('->') == C.n_arrows()


@pytest.mark.parametrize('spec', ['crossing:+', 'crossing:-', 'twist:2', 'twist:-2', 'twist:3',
                                  'twist:-3', 'twist:4', 'pretzel'])
def test_euler_matches_capped_diagram(spec):
    M = build(spec)
    checked = 0
    for site in 'abcd':
        want = closure_euler_prediction(M, builder_diagram(spec), site)
        if want is None:
            # this closure cannot be oriented
            continue
        assert close_tangle(M, site).euler.equal_up_to_unit(want)
        checked += 1
    assert checked >= 2


@given(st.integers(-7, 7).filter(bool), st.sampled_from('ac'))
def test_euler_matches_capped_diagram_twists(n, site):
    spec = 'twist:{}'.format(n)
    M = build(spec)
    want = closure_euler_prediction(M, builder_diagram(spec), site)
    r = close_tangle(M, site)
    assert r.euler.equal_up_to_unit(want)
    # odd twists close to a (2, n) torus knot, even ones to a 2-component link
    assert r.stabilisation == n % 2


@pytest.mark.parametrize('n', [1, 2])
def test_skein_triangle_rank_bounds(n):
    def rank(M):
        return close_tangle(M, 'a').box_total

    top, bottom = rank(build('twist:{}'.format(n))), rank(build('twist:{}'.format(-n)))
    third = rank(cancel_all_identities(skein_cone(n)))
    assert abs(top - bottom) <= third <= top + bottom


def test_homotopy_keeps_ranks():
    P = build('pretzel')
    h = PecMorphism(P, P, [('a1y2', 'a2y1', 'i1')])
    Q = apply_homotopy(P, h)
    for s in 'abcd':
        assert close_tangle(Q, s).box_ranks == close_tangle(P, s).box_ranks


def test_cone_closure_matches_sum():
    T = build('trivial:vertical')
    cone = cancel_all_identities(mapping_cone(PecMorphism(T, T)))
    assert close_tangle(cone, 'a').box_total == 2 * close_tangle(T, 'a').box_total

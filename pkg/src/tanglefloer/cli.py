"""Command-line entry point: ``tanglefloer <command> ...``.

Diagrams are given as a file path or an inline v-string starting with
``{``.  Modules come from ``--builder name[:arg]`` or ``--module FILE``.
Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import alexander as alx
from . import pairing
from . import pecmod
from .diagram import DiagramError, cap_off, parse_diagram, validate_diagram
from .states import enumerate_states, lattice_report, site_word, transposition_moves


class UsageError(Exception):
    pass


def _read_diagram(source, check=True):
    text = source if source.lstrip().startswith('{') else Path(source).read_text()
    return parse_diagram(text, check=check)


def _site_text(site):
    return site_word(site) or '-'


def _parse_site(text):
    if text is None:
        return None
    return frozenset() if text in ('', '-') else frozenset(text)


def _selected(table, site):
    if site is None:
        return table
    return {site: table.get(site, alx.GradedPoly())}


def _load_module(args):
    if args.module:
        return pecmod.parse_module(Path(args.module).read_text())
    if args.builder:
        return pecmod.build(args.builder)
    raise UsageError('give --builder or --module')


# ---------------------------------------------------------------------------
# commands

def cmd_validate(args, out):
    d = _read_diagram(args.diagram, check=False)
    problems = validate_diagram(d)
    if problems:
        for p in problems:
            out.write('error: {}\n'.format(p))
        return 1
    out.write('ok: {} crossings, {} regions, {} open\n'.format(
        len(d.crossings), len(d.regions), len(d.open_regions)))
    return 0


def cmd_nabla(args, out):
    d = _read_diagram(args.diagram)
    states = enumerate_states(d)
    site = _parse_site(args.site)
    if args.hat:
        table = _selected(alx.nabla_hat(d, states), site)
    else:
        table = _selected(alx.nabla_all(d, states), site)
    if args.grid:
        colours = tuple(args.grid.split(','))
        if len(colours) != 2:
            raise UsageError('--grid wants two colours, e.g. p,q')
        for s, poly in table.items():
            out.write('site {}\n'.format(_site_text(s)))
            out.write(alx.render_grid(poly, colours))
        return 0
    if args.hat:
        for s, poly in table.items():
            for mono, c in poly.items():
                out.write('{}\t{}\n'.format(_site_text(s), alx.format_term(mono, c)))
    else:
        for s, poly in table.items():
            out.write('{}\t{}\n'.format(_site_text(s), poly))
    if args.oracle == 'det':
        failed = False
        for s in table:
            det = alx.nabla_via_determinant(d, s)
            ok = alx.nabla(d, s, states).equal_up_to_unit(det)
            failed |= not ok
            out.write('det {}\t{}\t{}\n'.format(_site_text(s), 'agree' if ok else 'DISAGREE', det))
        return 1 if failed else 0
    return 0


def cmd_states(args, out):
    d = _read_diagram(args.diagram)
    site = _parse_site(args.site)
    out.write('site\tstate\tmonomial\n')
    for s, w, m in alx.generator_table(d):
        if site is None or s == site_word(site):
            out.write('{}\t{}\t{}\n'.format(s or '-', w, m))
    return 0


def cmd_lattice(args, out):
    d = _read_diagram(args.diagram)
    sites = list(enumerate_states(d))
    site = _parse_site(args.site)
    if site is not None:
        sites = [site]
    out.write('site\tstates\tconnected\tacyclic\tclocked\tcounterclocked\tlattice\n')
    bad = False
    for s in sites:
        r = lattice_report(d, s)
        if r['states'] == 0:
            out.write('{}\t0\t-\t-\t-\t-\t-\n'.format(_site_text(s)))
            continue
        words = lambda xs: ','.join(x.word(d) for x in xs)
        lat = {True: 'yes', False: 'no', None: '-'}[r['lattice']]
        out.write('{}\t{}\t{}\t{}\t{}\t{}\t{}\n'.format(
            _site_text(s), r['states'], 'yes' if r['connected'] else 'no',
            'yes' if r['acyclic'] else 'no', words(r['clocked']),
            words(r['counterclocked']), lat))
        bad |= not r['acyclic'] or len(r['clocked']) != 1 or len(r['counterclocked']) != 1
    return 1 if bad else 0


def cmd_pecmod(args, out):
    M = _load_module(args)
    if not pecmod.check_curved(M):
        raise pecmod.ModuleError('structure map does not square to the curvature')
    if args.cancel:
        M = pecmod.cancel_all_identities(M)
    if args.dot:
        out.write(M.to_dot())
    elif args.euler:
        for s, poly in pecmod.euler_characteristic(M).items():
            out.write('{}\t{}\n'.format(s, poly))
    elif args.ranks:
        out.write('letter\tdelta\trank\n')
        for (letter, delta), r in sorted(pecmod.rank_profile(M).items(),
                                         key=lambda kv: (kv[0][0], kv[0][1])):
            out.write('{}\t{}\t{}\n'.format(letter, delta, r))
    elif args.loops:
        loops = pecmod.loop_decompose(M)
        if loops is None:
            out.write('not loop-type\n')
            return 1
        for loop in loops:
            out.write('{}\t{}\n'.format(len(loop), ' '.join(
                '{} {}'.format(g, a) for g, a in loop.word(M))))
    else:
        out.write(M.serialise())
    return 0


def cmd_pair(args, out):
    M = pecmod.cancel_all_identities(_load_module(args))
    site = args.site or 'a'
    box = pairing.box_tensor(pairing.closing_type_a(site), M, site)
    if args.dot:
        out.write(box.to_dot())
        return 0
    ranks = pairing.homology(box)
    out.write(pairing.rank_table_tsv(ranks))
    out.write('total\t{}\n'.format(pairing.total_rank(ranks)))
    if box.gradings is not None:
        out.write('euler\t{}\n'.format(box.euler_characteristic()))
    return 0


def cmd_close(args, out):
    if args.diagram:
        d = _read_diagram(args.diagram)
        if not args.site:
            raise UsageError('close on a diagram needs --site REGION')
        c = cap_off(d, args.site)
        for s, poly in alx.nabla_all(c).items():
            out.write('{}\t{}\n'.format(_site_text(s), poly))
        return 0
    r = pairing.close_tangle(_load_module(args), args.site or 'a')
    out.write('site\t{}\n'.format(r.site))
    out.write('box\t{}\n'.format(r.box_total))
    out.write('lazy\t{}\n'.format(r.lazy_total))
    out.write('stabilisation\t{}\n'.format('-' if r.stabilisation is None else r.stabilisation))
    out.write('euler\t{}\n'.format('-' if r.euler is None else r.euler))
    return 0


def cmd_export(args, out):
    d = _read_diagram(args.diagram)
    states = enumerate_states(d)
    if args.dot:
        # Kauffman states of every site, joined by clockwise moves
        out.write('digraph states {\n')
        for s, xs in states.items():
            out.write('  subgraph "cluster_{}" {{\n'.format(_site_text(s)))
            out.write('    label="{}";\n'.format(_site_text(s)))
            for x in xs:
                out.write('    "{}";\n'.format(x.word(d)))
            out.write('  }\n')
        for s, xs in states.items():
            for x in xs:
                for mv in transposition_moves(d, x):
                    if mv.direction == 'clockwise':
                        out.write('  "{}" -> "{}";\n'.format(x.word(d), mv.result.word(d)))
        out.write('}\n')
        return 0
    # one row per state: site, exponent per colour, h, 2δ
    colours = sorted(set(d.colours))
    out.write('\t'.join(['site', 'state'] + colours + ['h', '2delta']) + '\n')
    for s, xs in states.items():
        for x in xs:
            m = alx.state_monomial(d, x)
            (mono, _c), = m.items()
            e = dict(mono)
            row = [_site_text(s), x.word(d)] + [str(e.get(c, 0)) for c in colours]
            row += [str(e.get(alx.H, 0)), str(e.get(alx.DELTA, 0))]
            out.write('\t'.join(row) + '\n')
    return 0


# ---------------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog='tanglefloer',
                                 description='Kauffman-state invariants and peculiar modules of tangles.')
    sub = ap.add_subparsers(dest='command', required=True)

    def diagram_cmd(name, help_text, func):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument('diagram', help='v-format file or inline {{...}} string')
        sp.set_defaults(func=func)
        return sp

    def module_cmd(name, help_text, func):
        sp = sub.add_parser(name, help=help_text)
        src = sp.add_mutually_exclusive_group()
        src.add_argument('--builder', help='e.g. crossing:+, twist:-3, trivial:horizontal, pretzel, loop:bpdq')
        src.add_argument('--module', help='file written by "pecmod" without flags')
        sp.set_defaults(func=func)
        return sp

    diagram_cmd('validate', 'check a diagram', cmd_validate)

    sp = diagram_cmd('nabla', 'site polynomials', cmd_nabla)
    sp.add_argument('--hat', action='store_true', help='keep h and δ, one term per line')
    sp.add_argument('--site', help='site word, "-" for the empty site')
    sp.add_argument('--grid', metavar='C1,C2', help='arrange terms in a grid over two colours')
    sp.add_argument('--oracle', choices=['det'], help='compare with the determinant formula')

    sp = diagram_cmd('states', 'generator table (TSV)', cmd_states)
    sp.add_argument('--site')

    sp = diagram_cmd('lattice', 'clock lattice summary per site', cmd_lattice)
    sp.add_argument('--site')

    sp = module_cmd('pecmod', 'build and inspect a peculiar module', cmd_pecmod)
    view = sp.add_mutually_exclusive_group()
    view.add_argument('--dot', action='store_true')
    view.add_argument('--euler', action='store_true')
    view.add_argument('--ranks', action='store_true')
    view.add_argument('--loops', action='store_true')
    sp.add_argument('--cancel', action='store_true', help='cancel identity arrows first')

    sp = module_cmd('pair', 'box tensor with a closing type A structure', cmd_pair)
    sp.add_argument('--site', choices=list('abcd'))
    sp.add_argument('--dot', action='store_true')

    sp = module_cmd('close', 'close a tangle at a site', cmd_close)
    sp.add_argument('--diagram', help='cap off a diagram instead of pairing a module')
    sp.add_argument('--site', help='site letter (module) or open region (diagram)')

    sp = diagram_cmd('export', 'all states with gradings (TSV) or as a DOT graph', cmd_export)
    sp.add_argument('--dot', action='store_true')
    return ap


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        sys.stderr.write('tanglefloer: error: {}\n'.format(e))
        return 2
    except (DiagramError, pecmod.ModuleError, pairing.PairingError, ValueError, OSError) as e:
        sys.stderr.write('tanglefloer: {}: {}\n'.format(type(e).__name__, e))
        return 1


if __name__ == '__main__':
    sys.exit(main())

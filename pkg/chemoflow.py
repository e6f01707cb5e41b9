"""
Main file for simulations, verification and convergence studies.

    python chemoflow.py run --config run.cfg
    python chemoflow.py verify
    python chemoflow.py couple --config run.cfg
    python chemoflow.py spectrum --config run.cfg --field n --p 2
    python chemoflow.py refine --config run.cfg --axis dt --levels 0.04,0.02,0.01

Every subcommand that takes a config writes a canonical copy of the effective config
(defaults filled in) next to its outputs. Exit status: 0 ok, 1 invariant failure or
divergence, 2 usage or config error.
"""
import argparse
import logging
import os
import sys

import config
from Analysis import block_lp_norms
from Coupling import coupled_run, perturb_velocity_mode
from Model import build_preset, regularize_initial
from Persistence import (SnapshotCodec, coupling_csv, format_rows, parse_config,
                         records_csv)
from Solver import refine_study, run
from Spectral import differentiate, to_physical, to_spectral
from Utils.errors import (ChemoflowError, ConfigError, ParameterError, PreconditionError,
                          SnapshotFormatError)
from Verification import run_suite

logger = logging.getLogger('chemoflow')

SPECTRUM_FIELDS = ('n', 'c', 'u1', 'u2', 'v')


def build_parser():
    """Return the argument parser with one subparser per subcommand."""
    parser = argparse.ArgumentParser(prog='chemoflow', description='chemotaxis-fluid simulator')
    parser.add_argument('--log-level', default=config.LOG_LEVEL,
                        choices=('DEBUG', 'INFO', 'WARNING', 'ERROR'))
    sub = parser.add_subparsers(dest='command', metavar='{run,verify,couple,spectrum,refine}')
    sub.required = True

    run_parser = sub.add_parser('run', help='integrate one trajectory')
    run_parser.add_argument('--config', required=True)

    verify_parser = sub.add_parser('verify', help='run the invariant suite')
    verify_parser.add_argument('--only', action='append', default=None, metavar='CHECK',
                               help='run only this check (repeatable)')

    couple_parser = sub.add_parser('couple', help='two solutions on one Brownian path')
    couple_parser.add_argument('--config', required=True)

    spectrum_parser = sub.add_parser('spectrum', help='Littlewood-Paley block norms')
    spectrum_parser.add_argument('--config', required=True)
    spectrum_parser.add_argument('--field', choices=SPECTRUM_FIELDS, default='n')
    spectrum_parser.add_argument('--p', type=float, default=2.0)

    refine_parser = sub.add_parser('refine', help='refinement study on one axis')
    refine_parser.add_argument('--config', required=True)
    refine_parser.add_argument('--axis', required=True,
                               choices=('dt', 'eps', 'k_band', 'resolution'))
    refine_parser.add_argument('--levels', required=True,
                               help='comma separated values, coarse to fine')
    refine_parser.add_argument('--s', type=float, default=0.0,
                               help='Sobolev index of the comparison norm')
    return parser


def _output_path(run_cfg, suffix):
    directory = run_cfg['output.directory']
    os.makedirs(directory, exist_ok=True)
    return os.path.join(directory, '{}_{}'.format(run_cfg['output.prefix'], suffix))


def _write_text(path, text):
    with open(path, 'w', newline='') as f:
        f.write(text)


def _echo_config(run_cfg):
    path = _output_path(run_cfg, 'config.cfg')
    _write_text(path, run_cfg.canonical_text())
    return path


def load_initial(run_cfg, grid):
    """Return the initial State and Potential of a config.

    A snapshot given by initial.snapshot wins over initial.preset; its stored potential,
    if any, replaces the sinusoidal one built from physics.g.
    """
    path = run_cfg['initial.snapshot']
    if not path:
        return build_preset(run_cfg['initial.preset'], grid), run_cfg.build_potential(grid)
    try:
        snap = SnapshotCodec(config).read(path, grid.dealias_fraction)
    except OSError as err:
        raise ConfigError(['initial.snapshot: cannot read {!r}: {}'.format(path, err.strerror)])
    except SnapshotFormatError as err:
        raise ConfigError(['initial.snapshot: {}'.format(err)])
    if snap.state.grid != grid:
        raise ConfigError(['initial.snapshot: stored grid N={} L={!r} differs from grid.N={} '
                           'grid.L={!r}'.format(snap.state.grid.N, snap.state.grid.L,
                                                grid.N, grid.L)])
    if snap.potential is None:
        return snap.state, run_cfg.build_potential(grid)
    return snap.state, snap.potential


def _prepare(args):
    run_cfg = parse_config(args.config)
    grid = run_cfg.build_grid()
    initial, potential = load_initial(run_cfg, grid)
    solver_cfg = run_cfg.build_solver_config(potential)
    initial = regularize_initial(initial, solver_cfg.params)
    logger.info('config echo written to %s', _echo_config(run_cfg))
    return run_cfg, initial, solver_cfg


def cmd_run(args):
    """Integrate one trajectory and write diagnostics, snapshots and the config echo."""
    run_cfg, initial, solver_cfg = _prepare(args)
    trajectory = run(initial, solver_cfg)
    csv_path = _output_path(run_cfg, 'diagnostics.csv')
    _write_text(csv_path, records_csv(trajectory.records))
    print(csv_path)
    codec = SnapshotCodec(config)
    potential = solver_cfg.potential
    if potential is not None and potential.is_zero():
        potential = None
    for index, (t, state) in enumerate(trajectory.snapshots):
        path = _output_path(run_cfg, '{:06d}{}'.format(index, config.SNAPSHOT_SUFFIX))
        codec.write(path, state, t, solver_cfg.alpha, potential)
    negative = sum(r.negative_count for r in trajectory.records)
    if negative:
        logger.warning('%d negative n or c samples were clipped inside diagnostics', negative)
    return config.EXIT_OK


def cmd_verify(args):
    """Run the invariant suite and print one PASS/FAIL line per check."""
    results = run_suite(args.only)
    for result in results:
        print(result.line())
    if args.only and len(results) != len(set(args.only)):
        logger.error('unknown check name in %s', args.only)
        return config.EXIT_USAGE
    if all(r.passed for r in results):
        return config.EXIT_OK
    return config.EXIT_INVARIANT_FAILURE


def cmd_couple(args):
    """Run a coupled pair, the second perturbed in one velocity mode, and report the envelope."""
    run_cfg, initial, solver_cfg = _prepare(args)
    perturbed = perturb_velocity_mode(initial, run_cfg.coupling_mode,
                                      run_cfg['coupling.perturbation'])
    series = coupled_run(initial, perturbed, solver_cfg)
    csv_path = _output_path(run_cfg, 'coupling.csv')
    _write_text(csv_path, coupling_csv(series.records))
    print(csv_path)
    report = series.report
    print('rate={!r} r_squared={!r} envelope_rate={!r} max_w1inf={!r} below_cutoff={}'.format(
        report.rate, report.r_squared, report.envelope_rate, report.max_w1inf,
        report.stayed_below_cutoff))
    return config.EXIT_OK


def _spectrum_field(state, name):
    if name == 'n':
        return state.n
    if name == 'c':
        return state.c
    if name == 'v':
        return to_physical(differentiate(to_spectral(state.u), 'curl2d'))
    return state.u[SPECTRUM_FIELDS.index(name) - 2]


def cmd_spectrum(args):
    """Write the dyadic block norms of one field of the initial state."""
    run_cfg, initial, _ = _prepare(args)
    rows = block_lp_norms(_spectrum_field(initial, args.field), args.p)
    csv_path = _output_path(run_cfg, 'spectrum_{}.csv'.format(args.field))
    _write_text(csv_path, format_rows(['j', 'l2_norm', 'lp_norm'], rows))
    print(csv_path)
    return config.EXIT_OK


def _parse_levels(text, axis):
    try:
        convert = int if axis == 'resolution' else float
        return [convert(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise ConfigError(['--levels: expected comma separated numbers, got {!r}'.format(text)])


def cmd_refine(args):
    """Run a refinement study and write the table of consecutive differences."""
    levels = _parse_levels(args.levels, args.axis)
    run_cfg, initial, solver_cfg = _prepare(args)
    table = refine_study(initial, solver_cfg, args.axis, levels, s=args.s)
    csv_path = _output_path(run_cfg, 'refine_{}.csv'.format(args.axis))
    _write_text(csv_path, format_rows(['level', 'next_level', 'difference'], table.rows()))
    print(csv_path)
    print('order={!r} r_squared={!r} monotone={}'.format(
        table.order, table.r_squared, table.is_monotone_decreasing()))
    return config.EXIT_OK


COMMANDS = {
    'run': cmd_run,
    'verify': cmd_verify,
    'couple': cmd_couple,
    'spectrum': cmd_spectrum,
    'refine': cmd_refine,
}


def dispatch(argv):
    """Parse argv, run the subcommand and return the exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help and 2 for usage errors
        return config.EXIT_OK if not exc.code else config.EXIT_USAGE
    logging.basicConfig(level=args.log_level, format=config.LOG_FORMAT)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as err:
        for violation in err.violations:
            print('config error: {}'.format(violation), file=sys.stderr)
        return config.EXIT_USAGE
    except (PreconditionError, ParameterError) as err:
        print('error: {}'.format(err), file=sys.stderr)
        return config.EXIT_USAGE
    except ChemoflowError as err:
        logger.error('%s', err)
        return config.EXIT_INVARIANT_FAILURE


def main():
    """Entry point."""
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()

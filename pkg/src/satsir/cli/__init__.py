import functools
import json
import logging
import pathlib

import attr
import click

from satsir import _config as settings
from satsir.analysis import (
    DegenerateCaseError, basic_reproduction_number, cubic_coefficients,
    descartes_possible_counts, disease_free_equilibrium, endemic_equilibria,
    sensitivity_indices, transcritical_direction,
)
from satsir.continuation import (
    OutOfRangeError, StructureError, classify_regime, equilibrium_branch, locate_bifurcations,
    locate_node_focus, singular_infected, trace_cycle_branch,
)
from satsir.model import PARAM_KEYS, ModelParams, State, reference_params
from satsir.scenario import SCENARIO_INIT, builtin_schedule, run_hysteresis_demo, run_scenario
from satsir.solver import (
    GammaSchedule, IntegrationError, integrate, integrate_schedule, phase_portrait,
)
from satsir.utils import DetectionError, round_json, write_csv


logger = logging.getLogger(__name__)


EXIT_DETECTION = 1
EXIT_INPUT = 2


@attr.s
class CliConfig:
    params_path = attr.ib(default=None)
    overrides = attr.ib(factory=tuple)
    fmt = attr.ib(default=None)
    out_path = attr.ib(default=None)
    tol = attr.ib(default=None)

    def format_or(self, default):
        return self.fmt or default

    def load_params(self):
        """Parameters from ``--params`` (reference values without it), then ``--set`` overrides."""
        if self.params_path:
            p = ModelParams.from_json(pathlib.Path(self.params_path).read_text())
        else:
            p = reference_params()
        if not self.overrides:
            return p

        data = p.to_dict()
        for item in self.overrides:
            key, sep, value = item.partition('=')
            key = key.strip()
            if not sep or key not in PARAM_KEYS:
                raise click.BadParameter(
                    f'expected KEY=VALUE with KEY one of {", ".join(PARAM_KEYS)}, got {item!r}',
                    param_hint='--set',
                )
            try:
                data[key] = float(value)
            except ValueError:
                raise click.BadParameter(f'{key} needs a number, got {value!r}', param_hint='--set')
        return ModelParams.from_dict(data)

    def emit(self, text):
        if self.out_path:
            pathlib.Path(self.out_path).write_text(text)
        else:
            click.echo(text, nl=False)


def to_json(data):
    return json.dumps(round_json(data), indent=2) + '\n'


def handle_errors(fn):
    """Map library errors to exit codes, the message goes to stderr."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return fn(*args, **kwargs)
        except click.ClickException:
            raise
        except (DetectionError, IntegrationError) as e:
            logger.debug('Numerical failure', exc_info=True)
            click.echo(f'Error: {e}', err=True)
            ctx.exit(EXIT_DETECTION)
        except (ValueError, OSError) as e:
            logger.debug('Invalid input', exc_info=True)
            click.echo(f'Error: {e}', err=True)
            ctx.exit(EXIT_INPUT)
    return wrapper


def _parse_state(ctx, param, value):
    if value is None:
        return None
    try:
        S, I, R = (float(i) for i in value.split(','))
    except ValueError:
        raise click.BadParameter(f'expected S,I,R, got {value!r}')
    return State(S=S, I=I, R=R)


def _parse_tol(ctx, param, value):
    changes = {}
    for item in value:
        name, sep, number = item.partition('=')
        if not sep:
            raise click.BadParameter(f'expected NAME=VALUE, got {item!r}')
        changes[name.strip()] = number.strip()
    return changes


def load_schedule(path):
    text = pathlib.Path(path).read_text()
    if str(path).endswith('.json'):
        return GammaSchedule.from_json(text)
    return GammaSchedule.from_csv(text)


@click.group()
@click.option('--params', 'params_path', type=click.Path(dir_okay=False),
              help='Model parameters JSON file, reference values by default.')
@click.option('--set', 'overrides', multiple=True, metavar='KEY=VALUE',
              help='Override one parameter, repeatable.')
@click.option('--format', 'fmt', type=click.Choice(['csv', 'json']),
              help='Output format, each command has its own default.')
@click.option('--out', 'out_path', type=click.Path(dir_okay=False),
              help='Write data to this file instead of standard output.')
@click.option('--rtol', type=float, help='Integrator relative tolerance.')
@click.option('--atol', type=float, help='Integrator absolute tolerance.')
@click.option('--tol', 'tol_changes', multiple=True, metavar='NAME=VALUE', callback=_parse_tol,
              help='Override any configured tolerance, repeatable.')
@click.option('--seed', type=int, help='Accepted for reproducible sweeps, the pipeline is deterministic.')
@click.option('--log-level', help='Logging level, LOG_LEVEL by default.')
@click.pass_context
def cli(ctx, params_path, overrides, fmt, out_path, rtol, atol, tol_changes, seed, log_level):
    """Saturated-incidence SIR model: equilibria, bifurcations and simulations."""
    settings.setup_logging(log_level)

    if rtol is not None:
        tol_changes['rtol'] = rtol
    if atol is not None:
        tol_changes['atol'] = atol
    try:
        tol = settings.TOLERANCES.override(**tol_changes)
    except ValueError as e:
        raise click.BadParameter(str(e), param_hint='--tol/--rtol/--atol')
    if seed is not None:
        logger.debug(f'Ignoring seed {seed!r}')

    ctx.obj = CliConfig(
        params_path=params_path,
        overrides=overrides,
        fmt=fmt,
        out_path=out_path,
        tol=tol,
    )


pass_config = click.make_pass_decorator(CliConfig)


@cli.command('analyze')
@click.option('--gamma', type=float, help='Cautiousness level, overrides the parameters file.')
@pass_config
@handle_errors
def analyze_command(config, gamma):
    """Reproduction number, equilibria, sensitivity and regime."""
    if config.format_or('json') != 'json':
        raise click.UsageError('analyze only writes JSON')

    p = config.load_params()
    if gamma is not None:
        p = p.with_gamma(gamma)

    cubic = cubic_coefficients(p)
    report = {
        'params': p.to_dict(),
        'R0': basic_reproduction_number(p),
        'disease_free': disease_free_equilibrium(p, config.tol).to_dict(),
        'endemic': [i.to_dict() for i in endemic_equilibria(p, config.tol)],
        'cubic': {
            'coefficients': list(cubic.as_tuple()),
            'descartes_counts': sorted(descartes_possible_counts(cubic)),
        },
        'sensitivity': sensitivity_indices(p).to_dict(),
    }

    try:
        report['transcritical'] = transcritical_direction(p).to_dict()
    except DegenerateCaseError as e:
        logger.warning(f'Transcritical direction undefined: {e}')
        report['transcritical'] = None

    try:
        regime = classify_regime(p, p.gamma, tol=config.tol)
    except (OutOfRangeError, StructureError, DetectionError) as e:
        logger.warning(f'Regime undefined for these parameters: {e}')
        report['regime'] = None
    else:
        report['regime'] = regime.value
        report['regime_info'] = regime.info.to_dict()

    config.emit(to_json(report))


@cli.command('bifurcations')
@click.option('--with-transitions', is_flag=True, help='Append the node/focus transitions of e1.')
@pass_config
@handle_errors
def bifurcations_command(config, with_transitions):
    """Locate the TR, HB, HM, FLC and SN points."""
    p = config.load_params()
    found = locate_bifurcations(p, tol=config.tol)
    points = found.points()
    if with_transitions:
        points += locate_node_focus(p, found.sn)

    rows = [i.to_dict() for i in points]
    if config.format_or('json') == 'json':
        config.emit(to_json(rows))
    else:
        config.emit(write_csv(('kind', 'gamma', 'I', 'R0'), (tuple(r.values()) for r in rows)))


@cli.command('branch')
@click.option('--i-min', type=float, default=0.01, show_default=True)
@click.option('--i-max', type=float, help='Upper end of the grid, just below I^(s) by default.')
@click.option('--steps', type=int, default=500, show_default=True)
@pass_config
@handle_errors
def branch_command(config, i_min, i_max, steps):
    """Endemic equilibrium branch on a grid of infected levels."""
    p = config.load_params()
    if i_max is None:
        i_max = singular_infected(p) * (1 - 1e-6)
    points = equilibrium_branch(p, i_min, i_max, steps, tol=config.tol)

    if config.format_or('csv') == 'json':
        config.emit(to_json([
            {'I': i.I, 'gamma': i.gamma, 'S': i.S, 'stability': i.stability.value, 'R0': i.R0}
            for i in points
        ]))
    else:
        config.emit(write_csv(
            ('I', 'gamma', 'S', 'stability'),
            ((i.I, i.gamma, i.S, i.stability.value) for i in points),
        ))


def _emit_trajectory(config, trajectory):
    if config.format_or('csv') == 'json':
        config.emit(to_json(trajectory.to_dict()))
    else:
        config.emit(trajectory.to_csv())


@cli.command('simulate')
@click.option('--init', callback=_parse_state, help='Initial state S,I,R [100,0.001,0].')
@click.option('--t-end', type=float, help='Integrate on [0, T] at the parameters gamma.')
@click.option('--schedule', 'schedule_path', type=click.Path(dir_okay=False),
              help='Piecewise-constant gamma schedule, CSV or JSON.')
@pass_config
@handle_errors
def simulate_command(config, init, t_end, schedule_path):
    """Integrate the model at fixed gamma or along a schedule."""
    if (t_end is None) == (schedule_path is None):
        raise click.UsageError('Pass exactly one of --t-end and --schedule')

    p = config.load_params()
    init = init or SCENARIO_INIT
    if schedule_path:
        trajectory = integrate_schedule(p, load_schedule(schedule_path), init, tol=config.tol)
    else:
        trajectory = integrate(p, init, t_end, tol=config.tol)
    _emit_trajectory(config, trajectory)


@cli.command('cycles')
@click.option('--gamma-min', type=float, required=True)
@click.option('--gamma-max', type=float, required=True)
@click.option('--steps', type=int, default=30, show_default=True)
@pass_config
@handle_errors
def cycles_command(config, gamma_min, gamma_max, steps):
    """Stable and unstable limit cycles on a gamma grid."""
    p = config.load_params()
    rows = trace_cycle_branch(p, gamma_min, gamma_max, steps, tol=config.tol)

    if config.format_or('csv') == 'json':
        config.emit(to_json([attr.asdict(i) for i in rows]))
        return

    def cells(i):
        if i.absent:
            return (i.gamma, 'absent', None, None)
        return (i.gamma, i.period, i.stable, i.max_I)

    config.emit(write_csv(('gamma', 'period', 'stable', 'max_I'), (cells(i) for i in rows)))


@cli.command('scenario')
@click.option('--schedule', 'schedule_path', type=click.Path(dir_okay=False),
              help='Schedule file, the builtin event schedule by default.')
@click.option('--init', callback=_parse_state, help='Initial state S,I,R [100,0.001,0].')
@click.option('--hysteresis', is_flag=True, help='Run the hysteresis loop experiment instead.')
@click.option('--trajectory-out', type=click.Path(dir_okay=False),
              help='Also write the trajectory as CSV to this file.')
@pass_config
@handle_errors
def scenario_command(config, schedule_path, init, hysteresis, trajectory_out):
    """Run a schedule and check its checkpoints; exit 1 unless all are met."""
    p = config.load_params()
    if hysteresis:
        report = run_hysteresis_demo(p, tol=config.tol)
    else:
        sched = load_schedule(schedule_path) if schedule_path else builtin_schedule()
        report = run_scenario(sched, init or SCENARIO_INIT, p, tol=config.tol)

    if trajectory_out:
        pathlib.Path(trajectory_out).write_text(report.trajectory.to_csv())
    config.emit(to_json(report.to_dict()))

    if not report.hysteresis_verdict:
        click.echo('Not every checkpoint was met', err=True)
        click.get_current_context().exit(EXIT_DETECTION)


@cli.command('portrait')
@click.option('--gamma', type=float, help='Cautiousness level, overrides the parameters file.')
@click.option('--t-end', type=float, default=2000.0, show_default=True)
@pass_config
@handle_errors
def portrait_command(config, gamma, t_end):
    """Orbits from the default boundary initial states."""
    p = config.load_params()
    if gamma is not None:
        p = p.with_gamma(gamma)
    orbits = phase_portrait(p, t_end, tol=config.tol)

    if config.format_or('csv') == 'json':
        config.emit(to_json([
            {'init': init.as_tuple(), 'trajectory': trajectory.to_dict()} for init, trajectory in orbits
        ]))
        return

    rows = (
        (index, *(float(x) for x in row))
        for index, (_, trajectory) in enumerate(orbits)
        for row in trajectory.samples
    )
    config.emit(write_csv(('orbit', 't', 'S', 'I', 'R'), rows))

import logging
import logging.config
import os

import attr
import dynaconf
import yaml

from satsir import ROOT_PKG_PATH


DEFAULT_SETTINGS_FILE = ROOT_PKG_PATH / 'satsir.default.toml'


def _settings_files():
    files = [str(DEFAULT_SETTINGS_FILE)]
    extra = os.getenv('SATSIR_CONFIG')
    if extra:
        files.extend(i for i in extra.split(':') if i)
    return files


config = dynaconf.Dynaconf(
    settings_files=_settings_files(),
    envvar_prefix='SATSIR',
)


@attr.s(frozen=True)
class Tolerances:
    """
    Numeric tolerances shared by the solver, the analytic module and the
    locators. Defaults come from the ``[tolerances]`` settings table.
    """

    rtol = attr.ib(default=1e-9, converter=float)
    atol = attr.ib(default=1e-12, converter=float)
    max_step = attr.ib(default=1.0, converter=float)
    domain = attr.ib(default=1e-9, converter=float)
    zero = attr.ib(default=1e-9, converter=float)
    admissible_S = attr.ib(default=1e-10, converter=float)
    cycle_return = attr.ib(default=1e-8, converter=float)
    cycle_burn_in = attr.ib(default=10, converter=int)
    cycle_max_time = attr.ib(default=2e5, converter=float)
    section_time = attr.ib(default=1e-12, converter=float)
    cycle_start_fraction = attr.ib(default=0.05, converter=float)
    reversed_start_fraction = attr.ib(default=0.01, converter=float)
    homoclinic_offset = attr.ib(default=1e-6, converter=float)
    homoclinic_trap_ratio = attr.ib(default=0.3, converter=float)
    escape_I = attr.ib(default=1e-3, converter=float)
    homoclinic_width = attr.ib(default=1e-7, converter=float)
    fold_width = attr.ib(default=1e-5, converter=float)
    regime_equality = attr.ib(default=1e-9, converter=float)

    @rtol.validator
    @atol.validator
    @max_step.validator
    def _check_positive(self, attribute, value):
        if not value > 0:
            raise ValueError(f'Tolerance {attribute.name!r} must be positive, got {value!r}')

    @classmethod
    def from_settings(cls, settings=None):
        settings = settings if settings is not None else config
        values = {}
        for field in attr.fields(cls):
            values[field.name] = settings.get(f'tolerances.{field.name}', default=field.default)
        return cls(**values)

    def override(self, **changes):
        """
        Copy with some tolerances replaced.

        :raises: ValueError for unknown tolerance names
        """
        names = {f.name for f in attr.fields(type(self))}
        unknown = sorted(set(changes) - names)
        if unknown:
            raise ValueError(f'Unknown tolerance(s): {", ".join(unknown)}')
        return attr.evolve(self, **changes)


TOLERANCES = Tolerances.from_settings()

WORKERS = int(config.get('workers', default=1))


def resolve(tol):
    """Tolerances to use when a caller passes ``None``."""
    return TOLERANCES if tol is None else tol


_log_config_path = os.getenv('LOG_CONFIG')
if _log_config_path and os.path.exists(_log_config_path):
    try:
        with open(_log_config_path, 'r') as f:
            LOGGING_CONFIG = yaml.safe_load(f)
    except Exception:
        logging.exception(
            f'Failed to load logging configuration from {_log_config_path!r}!'
        )
        LOGGING_CONFIG = None
else:
    LOGGING_CONFIG = None

LOGGING_LEVEL = os.getenv('LOG_LEVEL', 'warning')


def setup_logging(level=None):
    if LOGGING_CONFIG:
        logging.config.dictConfig(LOGGING_CONFIG)
        return
    level = (level or LOGGING_LEVEL).upper()
    try:
        import coloredlogs
        coloredlogs.install(level=level)
    except ImportError:
        logging.basicConfig(level=level)

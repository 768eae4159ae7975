import logging
import os
import uuid
from logging.handlers import RotatingFileHandler

import click
from pythonjsonlogger import jsonlogger

from .config.config import config
from .models.matrix import Matrix

__version__ = '0.1.0'


class RunIdFilter(logging.Filter):
    """Add the run ID to log records"""

    def __init__(self, run_id: str):
        super().__init__()
        self.run_id = run_id

    def filter(self, record):
        record.run_id = self.run_id
        return True


def configure_logging(app_config, run_id: str) -> logging.Logger:
    """JSON records on stderr and, outside testing, in a rotating file"""
    logger = logging.getLogger('stratjet')
    for handler in [h for h in logger.handlers if getattr(h, 'stratjet_handler', False)]:
        logger.removeHandler(handler)
        handler.close()

    formatter = jsonlogger.JsonFormatter(app_config.LOG_FORMAT)
    run_filter = RunIdFilter(run_id)

    stream_handler = logging.StreamHandler()
    stream_handler.setFormatter(formatter)
    stream_handler.addFilter(run_filter)
    stream_handler.stratjet_handler = True
    logger.addHandler(stream_handler)

    if app_config.LOG_FILE and not app_config.TESTING:
        directory = os.path.dirname(app_config.LOG_FILE)
        if directory and not os.path.exists(directory):
            os.makedirs(directory)
        file_handler = RotatingFileHandler(
            app_config.LOG_FILE,
            maxBytes=app_config.LOG_MAX_BYTES,
            backupCount=app_config.LOG_BACKUP_COUNT
        )
        file_handler.setFormatter(formatter)
        file_handler.addFilter(run_filter)
        file_handler.stratjet_handler = True
        logger.addHandler(file_handler)

    logger.setLevel(app_config.LOG_LEVEL)
    logger.propagate = False
    return logger


def create_app(config_name='default'):
    """Application factory: a configured click group with every command registered"""
    app_config = config[config_name]
    run_id = str(uuid.uuid4())

    @click.group()
    @click.version_option(__version__, prog_name='stratjet')
    @click.pass_context
    def cli(ctx):
        """Exact verification of jets, stratifications, De Rham complexes and crystals"""
        ctx.ensure_object(dict)
        ctx.obj.setdefault('config', app_config)
        ctx.obj.setdefault('run_id', run_id)
        ctx.obj.setdefault('services', init_services(app_config))

    Matrix.max_columns = app_config.MAX_MATRIX_COLUMNS
    logger = configure_logging(app_config, run_id)
    logger.debug('stratjet startup', extra={'config': config_name})

    # Register command groups
    from .controllers.verify_controller import verify
    from .controllers.linearize_controller import linearize
    from .controllers.strat_controller import strat
    from .controllers.horizontal_controller import horizontal
    from .controllers.report_controller import report
    from .controllers.crystal_controller import crystal
    from .controllers.complex_controller import complex_group

    cli.add_command(verify)
    cli.add_command(linearize)
    cli.add_command(strat)
    cli.add_command(horizontal)
    cli.add_command(report)
    cli.add_command(crystal)
    cli.add_command(complex_group)

    # Register error handlers
    from .errors import register_error_handlers
    register_error_handlers(cli)

    return cli


def init_services(app_config=None):
    """Initialize all services, sharing the lower layers"""
    from .services import (
        CrystalService,
        DeRhamService,
        DiffOpService,
        ExactCoreService,
        FixtureService,
        JetService,
        ParserService,
        StratService,
        SuiteService
    )

    schema_version = getattr(app_config, 'REPORT_SCHEMA_VERSION', '1.0')
    exactcore = ExactCoreService()
    diffop = DiffOpService()
    strat = StratService(exactcore)
    derham = DeRhamService(exactcore, diffop, strat)
    crystal = CrystalService()
    fixtures = FixtureService(derham, crystal)
    return {
        'exactcore': exactcore,
        'parser': ParserService(),
        'jet': JetService(),
        'diffop': diffop,
        'strat': strat,
        'derham': derham,
        'crystal': crystal,
        'fixtures': fixtures,
        'suite': SuiteService(exactcore, diffop, strat, derham, crystal, fixtures, schema_version)
    }

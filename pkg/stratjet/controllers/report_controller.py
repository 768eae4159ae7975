from dataclasses import replace

import click

from .verify_controller import load_document, run_and_report, suite_config, suite_options
from ..models.report import CHECKS
from ..schemas.report import SuiteConfigSchema


@click.command()
@click.option('--input', 'input_path', type=click.Path(exists=True, dir_okay=False), default=None,
              help='Suite configuration file')
@suite_options
@click.pass_context
def report(ctx, input_path, dims, level, char, divided, deg_bounds, out, expect_fail, workers):
    """Run a whole suite and write its report; flags override the configuration file"""
    if input_path is None:
        config = suite_config(ctx, CHECKS, dims, level, char, divided, deg_bounds,
                              (), out, expect_fail, workers)
    else:
        config = load_document(input_path, SuiteConfigSchema())
        overrides = {}
        if dims:
            overrides['dims'] = tuple(dims)
        if level is not None:
            overrides['levels'] = tuple(range(level + 1))
        if char is not None:
            overrides['characteristic'] = char
        if divided:
            overrides['mode'] = 'divided'
        if deg_bounds:
            overrides['degree_bounds'] = tuple(deg_bounds)
        if out:
            overrides['out'] = out
        if expect_fail:
            overrides['expect_fail'] = tuple(dict.fromkeys(config.expect_fail + tuple(expect_fail)))
        if workers:
            overrides['workers'] = workers
        config = replace(config, **overrides)
    run_and_report(ctx, config)

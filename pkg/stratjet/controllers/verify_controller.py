import json
from typing import Optional

import click

from ..errors import FixtureError
from ..models.field import ScalarField
from ..models.report import CHECKS, SuiteConfig
from ..schemas.report import report_schema


def load_document(path: str, schema):
    """Read a JSON file and load it through a schema"""
    try:
        with open(path, encoding='utf-8') as handle:
            data = json.load(handle)
    except OSError as e:
        raise FixtureError(f'cannot read {path}: {e.strerror}', payload={'path': path})
    except ValueError as e:
        raise FixtureError(f'{path} is not valid JSON: {e}', payload={'path': path})
    return schema.load(data)


def emit(document, out: Optional[str] = None):
    """Write a JSON document to the output file or stdout"""
    text = json.dumps(document, indent=2, ensure_ascii=False)
    if out:
        with open(out, 'w', encoding='utf-8') as handle:
            handle.write(text + '\n')
    else:
        click.echo(text)


def scalar_field(ctx, char: Optional[int]) -> ScalarField:
    """Field from --char or the configured default"""
    return ScalarField(ctx.obj['config'].DEFAULT_CHAR if char is None else char)


def suite_options(f):
    """Options shared by every verify subcommand"""
    options = [
        click.option('--dim', 'dims', type=click.IntRange(1, 3), multiple=True,
                     help='Base dimension; repeatable (default 1 and 2)'),
        click.option('--level', type=click.IntRange(min=0), default=None,
                     help='Highest level n; levels 0..n are checked (default 3)'),
        click.option('--char', type=int, default=None, help='Characteristic: 0 or a prime'),
        click.option('--divided', is_flag=True, help='Use divided powers'),
        click.option('--deg-bound', 'deg_bounds', type=click.IntRange(min=0), multiple=True,
                     help='Coefficient degree bound; repeatable (default 0, 1 and 2)'),
        click.option('--out', type=click.Path(dir_okay=False, writable=True), default=None,
                     help='Write the report here instead of stdout'),
        click.option('--expect-fail', 'expect_fail', type=click.Choice(CHECKS), multiple=True,
                     help='Count failures of this check as expected'),
        click.option('--workers', type=click.IntRange(min=1), default=None, help='Suite thread pool size'),
    ]
    for option in reversed(options):
        f = option(f)
    return f


input_option = click.option('--input', 'inputs', type=click.Path(exists=True, dir_okay=False), multiple=True,
                            help='Connection file replacing the built-in catalog; repeatable')


def suite_config(ctx, checks, dims=(), level=None, char=None, divided=False, deg_bounds=(),
                 inputs=(), out=None, expect_fail=(), workers=None) -> SuiteConfig:
    """SuiteConfig from command-line flags, falling back to the defaults"""
    app_config = ctx.obj['config']
    defaults = SuiteConfig()
    return SuiteConfig(
        characteristic=app_config.DEFAULT_CHAR if char is None else char,
        mode='divided' if divided else 'plain',
        dims=tuple(dims) or defaults.dims,
        levels=defaults.levels if level is None else tuple(range(level + 1)),
        degree_bounds=tuple(deg_bounds) or defaults.degree_bounds,
        checks=tuple(checks),
        fixtures=tuple(inputs),
        out=out,
        expect_fail=tuple(expect_fail),
        workers=workers or app_config.SUITE_WORKERS,
        use_catalog=not inputs,
        seed=app_config.RANDOM_SEED
    )


def run_and_report(ctx, config: SuiteConfig):
    """Run the suite, write the report and exit with its code"""
    report = ctx.obj['services']['suite'].run_suite(config)
    emit(report_schema.dump(report), config.out)
    ctx.exit(report.exit_code)


@click.group()
def verify():
    """Run one family of checks and print its report"""


@verify.command()
@suite_options
@click.pass_context
def poincare(ctx, **options):
    """Exactness of the linearized De Rham complex at each level"""
    run_and_report(ctx, suite_config(ctx, ('poincare',), **options))


@verify.command()
@suite_options
@click.pass_context
def homotopy(ctx, **options):
    """Contracting homotopy identity on the graded pieces"""
    run_and_report(ctx, suite_config(ctx, ('homotopy',), **options))


@verify.command()
@suite_options
@click.pass_context
def order1(ctx, **options):
    """Order-one relations of the De Rham fixtures"""
    run_and_report(ctx, suite_config(ctx, ('order1',), **options))


@verify.command()
@suite_options
@input_option
@click.pass_context
def strat(ctx, **options):
    """Stratification axioms of Taylor stratifications and induced horizontal sections"""
    run_and_report(ctx, suite_config(ctx, ('strat',), **options))


@verify.command()
@suite_options
@click.pass_context
def phi(ctx, **options):
    """Phi is a chain map retracting the first-level inclusion"""
    run_and_report(ctx, suite_config(ctx, ('phi',), **options))


@verify.command()
@suite_options
@input_option
@click.pass_context
def psi(ctx, **options):
    """Exactness of the linearized De Rham complex of a stratified module"""
    run_and_report(ctx, suite_config(ctx, ('psi',), **options))


@verify.command()
@suite_options
@input_option
@click.pass_context
def crystal(ctx, **options):
    """Comparison isomorphisms on nilpotent thickenings satisfy the cocycle condition"""
    run_and_report(ctx, suite_config(ctx, ('crystal',), **options))


@verify.command()
@suite_options
@click.pass_context
def functoriality(ctx, **options):
    """Linearization respects composition on seeded random operators"""
    run_and_report(ctx, suite_config(ctx, ('functoriality',), **options))

import click

from .verify_controller import emit, load_document, scalar_field
from ..schemas.connection import ConnectionSchema
from ..schemas.stratification import StratModuleSchema


@click.group()
def strat():
    """Stratifications built from connections"""


@strat.command('from-connection')
@click.option('--input', 'input_path', required=True, type=click.Path(exists=True, dir_okay=False),
              help='Connection file')
@click.option('--level', type=click.IntRange(min=0), default=2, help='Truncation level N')
@click.option('--divided', is_flag=True, help='Divided-power Taylor coefficients')
@click.option('--char', type=int, default=None, help='Characteristic when the file has none')
@click.option('--out', type=click.Path(dir_okay=False, writable=True), default=None)
@click.pass_context
def from_connection(ctx, input_path, level, divided, char, out):
    """Taylor stratification of a flat connection, written as a stratification file"""
    field = scalar_field(ctx, char)
    conn = load_document(input_path, ConnectionSchema(field=field))
    M = ctx.obj['services']['strat'].taylor_stratification(conn, level, 'divided' if divided else 'plain')
    emit(StratModuleSchema(field=conn.field).dump(M), out)


@strat.command('check')
@click.option('--input', 'input_path', required=True, type=click.Path(exists=True, dir_okay=False),
              help='Stratification file')
@click.option('--char', type=int, default=None, help='Characteristic when the file has none')
@click.option('--out', type=click.Path(dir_okay=False, writable=True), default=None)
@click.pass_context
def check(ctx, input_path, char, out):
    """Co-identity, compatibility and co-associativity of a stratification file"""
    M = load_document(input_path, StratModuleSchema(field=scalar_field(ctx, char)))
    result = ctx.obj['services']['strat'].verify_stratification(M)
    emit(result, out)
    ctx.exit(0 if result['pass'] else 1)

import click

from .verify_controller import emit, load_document, scalar_field
from ..schemas.complex import ChainComplexSchema

KINDS = ('linearized', 'graded')


@click.group('complex')
def complex_group():
    """Dense Poincaré complexes for external audit"""


@complex_group.command('export')
@click.option('--kind', type=click.Choice(KINDS), default='linearized', help='Which level complex')
@click.option('--dim', type=click.IntRange(1, 3), default=1, help='Base dimension d')
@click.option('--level', type=click.IntRange(min=0), default=2, help='Level n')
@click.option('--divided', is_flag=True, help='Divided-power basis')
@click.option('--char', type=int, default=None, help='Characteristic: 0 or a prime')
@click.option('--out', type=click.Path(dir_okay=False, writable=True), default=None)
@click.pass_context
def export(ctx, kind, dim, level, divided, char, out):
    """Write the matrices and contracting homotopy of one level"""
    field = scalar_field(ctx, char)
    derham = ctx.obj['services']['derham']
    mode = 'divided' if divided else 'plain'
    if kind == 'graded':
        C = derham.graded_derham_level(level, dim, field, mode)
    else:
        C = derham.linearized_derham_level(level, dim, field, mode)
    emit(ChainComplexSchema(field=field).dump(C), out)


@complex_group.command('check')
@click.option('--input', 'input_path', required=True, type=click.Path(exists=True, dir_okay=False),
              help='Complex file')
@click.option('--char', type=int, default=None, help='Characteristic when the file has none')
@click.option('--out', type=click.Path(dir_okay=False, writable=True), default=None)
@click.pass_context
def check(ctx, input_path, char, out):
    """Homology ranks of a complex file, and its homotopy identity when one is given"""
    C = load_document(input_path, ChainComplexSchema(field=scalar_field(ctx, char)))
    exactcore = ctx.obj['services']['exactcore']
    homology = exactcore.complex_homology_ranks(C)
    result = {'name': C.name, 'homology': homology, 'exact': not any(homology)}
    passed = result['exact']
    if C.homotopy is not None:
        result['homotopy'] = exactcore.check_homotopy_identity(C)
        passed = passed and result['homotopy']['pass']
    emit(result, out)
    ctx.exit(0 if passed else 1)

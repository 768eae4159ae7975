import click

from .verify_controller import emit, load_document, scalar_field
from ..schemas import matrix_text
from ..schemas.operator import DiffOperatorSchema


@click.command()
@click.option('--input', 'input_path', required=True, type=click.Path(exists=True, dir_okay=False),
              help='Operator file')
@click.option('--level', type=click.IntRange(min=0), default=0, help='Target level n')
@click.option('--shift', type=click.IntRange(min=0), default=None,
              help='Source level offset (default: the operator order)')
@click.option('--char', type=int, default=None, help='Characteristic when the file has none')
@click.option('--out', type=click.Path(dir_okay=False, writable=True), default=None)
@click.pass_context
def linearize(ctx, input_path, level, shift, char, out):
    """Print the level map P^(n+shift) ⊗ L -> P^n ⊗ L' of an operator"""
    D = load_document(input_path, DiffOperatorSchema(field=scalar_field(ctx, char)))
    M = ctx.obj['services']['diffop'].linearize(D, level, shift)
    emit({
        'level': level,
        'shift': D.effective_order if shift is None else shift,
        'shape': list(M.shape),
        'matrix': matrix_text(M, D.source.field)
    }, out)

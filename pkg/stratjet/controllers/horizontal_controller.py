import click

from .verify_controller import emit, load_document, scalar_field
from ..models.jet import JetElement
from ..models.module import FreeModule
from ..schemas import poly_text
from ..schemas.jet import jet_element_schema
from ..schemas.stratification import StratModuleSchema


def section_text(entry, field):
    if isinstance(entry, JetElement):
        return jet_element_schema.dump(entry)
    return poly_text(entry, field)


@click.command()
@click.option('--input', 'input_path', type=click.Path(exists=True, dir_okay=False), default=None,
              help='Stratification file; without it the induced tower of O is used')
@click.option('--dim', type=click.IntRange(1, 3), default=1, help='Base dimension of the induced tower')
@click.option('--deg-bound', 'bound', type=click.IntRange(min=0), default=1, help='Coefficient degree bound')
@click.option('--divided', is_flag=True, help='Divided-power induced tower')
@click.option('--char', type=int, default=None, help='Characteristic: 0 or a prime')
@click.option('--out', type=click.Path(dir_okay=False, writable=True), default=None)
@click.pass_context
def horizontal(ctx, input_path, dim, bound, divided, char, out):
    """Horizontal sections up to a coefficient degree bound, with a stabilization certificate"""
    field = scalar_field(ctx, char)
    strat_service = ctx.obj['services']['strat']
    if input_path:
        M = load_document(input_path, StratModuleSchema(field=field))
        field = M.field
    else:
        mode = 'divided' if divided else 'plain'
        M = strat_service.induced_stratification(FreeModule(dim, 1, field), bound + 2, mode)
    H = strat_service.horizontal_sections(M, bound)
    emit({
        'dimension': H.dimension,
        'degree_bound': H.degree_bound,
        'stabilized': H.stabilized,
        'dimensions': list(H.dimensions),
        'basis': [[section_text(entry, field) for entry in vector] for vector in H.basis]
    }, out)

import click

from .verify_controller import emit, load_document, scalar_field
from ..errors import FixtureError
from ..schemas.stratification import StratModuleSchema
from ..schemas.thickening import ThickeningSchema, bmatrix_text


@click.command()
@click.option('--input', 'input_path', required=True, type=click.Path(exists=True, dir_okay=False),
              help='Stratification file')
@click.option('--thickening', 'thickening_path', required=True, type=click.Path(exists=True, dir_okay=False),
              help='Thickening file with at least two sections')
@click.option('--char', type=int, default=None, help='Characteristic when the files have none')
@click.option('--out', type=click.Path(dir_okay=False, writable=True), default=None)
@click.pass_context
def crystal(ctx, input_path, thickening_path, char, out):
    """Comparison isomorphisms between consecutive sections, and the cocycle condition on the first three"""
    M = load_document(input_path, StratModuleSchema(field=scalar_field(ctx, char)))
    schema = ThickeningSchema(field=M.field)
    document = load_document(thickening_path, schema)
    B, sections = document['thickening'], document['sections']
    if B.field != M.field:
        raise FixtureError(f'thickening over {B.field.name} for a module over {M.field.name}',
                           payload={'path': thickening_path})
    if len(sections) < 2:
        raise FixtureError('a thickening file needs at least two sections', payload={'path': thickening_path})

    service = ctx.obj['services']['crystal']
    comparisons = [{
        'source': i,
        'target': i + 1,
        'matrix': bmatrix_text(service.comparison_iso(M, sections[i], sections[i + 1]))
    } for i in range(len(sections) - 1)]
    result = {'thickening': schema.dump(document), 'comparisons': comparisons}
    passed = True
    if len(sections) >= 3:
        result['cocycle'] = service.verify_cocycle(M, *sections[:3])
        passed = result['cocycle']['pass']
    emit(result, out)
    ctx.exit(0 if passed else 1)

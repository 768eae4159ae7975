from marshmallow import ValidationError, fields, post_load, pre_dump, validate

from . import BaseSchema, matrix_text
from .operator import BarEntrySchema
from ..errors import EngineError
from ..models.jet import MODES
from ..models.module import FreeModule
from ..models.strat import StratModule


class StratModuleSchema(BaseSchema):
    """Schema for stratification files: the s'_n coefficient tables, level by level"""
    d = fields.Integer(required=True, validate=validate.Range(min=1))
    rank = fields.Integer(required=True, validate=validate.Range(min=1))
    char = fields.Integer(load_default=None)
    mode = fields.String(load_default='plain', validate=validate.OneOf(MODES))
    name = fields.String(load_default='')
    levels = fields.List(fields.List(fields.Nested(BarEntrySchema)), required=True)

    @pre_dump
    def to_document(self, M, **kwargs):
        return {
            'd': M.d,
            'rank': M.rank,
            'char': M.field.characteristic,
            'mode': M.mode,
            'name': M.name,
            'levels': [[{'alpha': list(a), 'matrix': matrix_text(X)} for a, X in level]
                       for level in M.levels]
        }

    @post_load
    def make_strat(self, data, **kwargs):
        field = self.field_for(data)
        d, r = data['d'], data['rank']
        try:
            tables = []
            for level in data['levels']:
                table = {}
                for entry in level:
                    rows = entry['matrix']
                    if len(rows) != r or any(len(row) != r for row in rows):
                        raise ValidationError(f'stratification matrices must be {r}x{r}')
                    table[tuple(entry['alpha'])] = self.poly_matrix(rows, d, field)
                tables.append(table)
            return StratModule.build(FreeModule(d, r, field), tables, data['mode'], data['name'])
        except EngineError as e:
            raise ValidationError(e.message)


strat_schema = StratModuleSchema()

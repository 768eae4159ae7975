from marshmallow import Schema, ValidationError, fields, post_load, pre_dump, validate

from . import BaseSchema, matrix_text
from ..errors import EngineError
from ..models.module import DiffOperator, FreeModule


class BarEntrySchema(Schema):
    alpha = fields.List(fields.Integer(validate=validate.Range(min=0)), required=True)
    matrix = fields.List(fields.List(fields.String()), required=True)


class DiffOperatorSchema(BaseSchema):
    """Schema for operator files: the bar table of a differential operator"""
    source_rank = fields.Integer(required=True, validate=validate.Range(min=0))
    target_rank = fields.Integer(required=True, validate=validate.Range(min=0))
    d = fields.Integer(required=True, validate=validate.Range(min=1))
    order = fields.Integer(load_default=None, validate=validate.Range(min=0))
    char = fields.Integer(load_default=None)
    bar = fields.List(fields.Nested(BarEntrySchema), load_default=list)

    @pre_dump
    def to_document(self, D, **kwargs):
        return {
            'source_rank': D.source.rank,
            'target_rank': D.target.rank,
            'd': D.d,
            'order': D.order,
            'char': D.source.field.characteristic,
            'bar': [{'alpha': list(a), 'matrix': matrix_text(M)} for a, M in D.bar]
        }

    @post_load
    def make_operator(self, data, **kwargs):
        field = self.field_for(data)
        d = data['d']
        try:
            source = FreeModule(d, data['source_rank'], field)
            target = FreeModule(d, data['target_rank'], field)
            table = {}
            for entry in data['bar']:
                rows = entry['matrix']
                if len(rows) != target.rank or any(len(r) != source.rank for r in rows):
                    raise ValidationError(f'bar matrix at {entry["alpha"]} must be '
                                          f'{target.rank}x{source.rank}')
                table[tuple(entry['alpha'])] = self.poly_matrix(rows, d, field)
            return DiffOperator.from_table(source, target, table, data['order'])
        except EngineError as e:
            raise ValidationError(e.message)


operator_schema = DiffOperatorSchema()

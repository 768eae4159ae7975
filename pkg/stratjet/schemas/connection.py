from marshmallow import ValidationError, fields, post_load, pre_dump, validate

from . import BaseSchema, matrix_text
from ..errors import EngineError
from ..models.strat import Connection


class ConnectionSchema(BaseSchema):
    """Schema for connection files: one r×r polynomial matrix per variable"""
    d = fields.Integer(required=True, validate=validate.Range(min=1))
    rank = fields.Integer(required=True, validate=validate.Range(min=1))
    char = fields.Integer(load_default=None)
    name = fields.String(load_default='')
    A = fields.List(fields.List(fields.List(fields.String())), required=True)

    @pre_dump
    def to_document(self, conn, **kwargs):
        return {
            'd': conn.d,
            'rank': conn.rank,
            'char': conn.field.characteristic,
            'name': conn.name,
            'A': [matrix_text(A) for A in conn.matrices]
        }

    @post_load
    def make_connection(self, data, **kwargs):
        field = self.field_for(data)
        d, r = data['d'], data['rank']
        for rows in data['A']:
            if len(rows) != r or any(len(row) != r for row in rows):
                raise ValidationError(f'connection matrices must be {r}x{r}')
        try:
            mats = tuple(self.poly_matrix(rows, d, field) for rows in data['A'])
            return Connection(d, r, mats, field, data['name'])
        except EngineError as e:
            raise ValidationError(e.message)


connection_schema = ConnectionSchema()

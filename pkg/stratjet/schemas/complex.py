from marshmallow import ValidationError, fields, post_load, pre_dump, validate

from . import BaseSchema, matrix_text
from ..errors import EngineError
from ..models.complex import ChainComplex
from ..models.matrix import Matrix


class ChainComplexSchema(BaseSchema):
    """Dense JSON form of a complex over k, for external audit"""
    name = fields.String(load_default='')
    char = fields.Integer(load_default=None)
    ranks = fields.List(fields.Integer(validate=validate.Range(min=0)), required=True)
    matrices = fields.List(fields.List(fields.List(fields.String())), load_default=list)
    homotopy = fields.List(fields.List(fields.List(fields.String())), load_default=None, allow_none=True)

    @pre_dump
    def to_document(self, C, **kwargs):
        return {
            'name': C.name,
            'char': C.field.characteristic,
            'ranks': list(C.ranks),
            'matrices': [matrix_text(M, C.field) for M in C.matrices],
            'homotopy': None if C.homotopy is None else [matrix_text(s, C.field) for s in C.homotopy]
        }

    def _matrix(self, rows, nrows: int, ncols: int, field) -> Matrix:
        if len(rows) != nrows or any(len(r) != ncols for r in rows):
            raise ValidationError(f'matrix must be {nrows}x{ncols}')
        return Matrix.from_rows([[self.scalar(c, field) for c in r] for r in rows], field.domain, ncols)

    @post_load
    def make_complex(self, data, **kwargs):
        field = self.field_for(data)
        ranks = tuple(data['ranks'])
        try:
            mats = tuple(self._matrix(rows, ranks[i + 1], ranks[i], field)
                         for i, rows in enumerate(data['matrices']))
            homotopy = None
            if data['homotopy'] is not None:
                homotopy = tuple(self._matrix(rows, ranks[i - 1] if i else 0, ranks[i], field)
                                 for i, rows in enumerate(data['homotopy']))
            return ChainComplex(ranks, mats, field, homotopy, data['name'])
        except (EngineError, IndexError) as e:
            raise ValidationError(getattr(e, 'message', str(e)))


complex_schema = ChainComplexSchema()

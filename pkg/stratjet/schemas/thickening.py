from marshmallow import Schema, ValidationError, fields, post_load, pre_dump, validate

from . import BaseSchema, poly_text
from ..errors import EngineError
from ..models.crystal import Section, Thickening
from ..models.jet import MODES
from ..models.poly import monomial, multi_factorial, poly_ring


class SectionSchema(Schema):
    images = fields.List(fields.String(), required=True, validate=validate.Length(min=1))


def element_poly(h):
    """ThickeningElement as a polynomial in t1..ts; t^[a] is t^a/a!"""
    B = h.algebra
    R = poly_ring(B.s, B.field.characteristic, 't')
    out = R.zero
    for a, c in h.terms():
        if B.mode == 'divided':
            c = c * B.field.inverse_int(multi_factorial(a))
        out = out + monomial(R, a, c)
    return out


class ThickeningSchema(BaseSchema):
    """Schema for thickening files with their sections; images are polynomials in t1..ts"""
    s = fields.Integer(required=True, validate=validate.Range(min=1))
    nu = fields.Integer(required=True, validate=validate.Range(min=0))
    char = fields.Integer(load_default=None)
    mode = fields.String(load_default='plain', validate=validate.OneOf(MODES))
    sections = fields.List(fields.Nested(SectionSchema), load_default=list)

    @pre_dump
    def to_document(self, obj, **kwargs):
        B = obj['thickening']
        return {
            's': B.s,
            'nu': B.nu,
            'char': B.field.characteristic,
            'mode': B.mode,
            'sections': [{'images': [poly_text(element_poly(h), prefix='t') for h in sec.images]}
                         for sec in obj['sections']]
        }

    @post_load
    def make_thickening(self, data, **kwargs):
        field = self.field_for(data)
        try:
            B = Thickening(data['s'], data['nu'], field, data['mode'])
            sections = tuple(
                Section(B, tuple(B.from_poly(self.poly(text, B.s, field, 't')) for text in sec['images']))
                for sec in data['sections'])
            return {'thickening': B, 'sections': sections}
        except EngineError as e:
            raise ValidationError(e.message)


thickening_schema = ThickeningSchema()


def bmatrix_text(chi):
    """Dense nested lists of polynomials in t1..ts"""
    return [[poly_text(element_poly(h), prefix='t') for h in row] for row in chi.rows]

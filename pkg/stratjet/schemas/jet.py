from marshmallow import Schema, ValidationError, fields, post_load, pre_dump, validate

from . import BaseSchema, poly_text
from ..errors import EngineError
from ..models.jet import MODES, JetAlgebra


class JetTermSchema(Schema):
    alpha = fields.List(fields.Integer(validate=validate.Range(min=0)), required=True)
    coeff = fields.String(required=True)


class JetElementSchema(BaseSchema):
    """Schema for an element of P^m in the plain or divided basis"""
    mode = fields.String(load_default='plain', validate=validate.OneOf(MODES))
    m = fields.Integer(required=True, validate=validate.Range(min=0))
    d = fields.Integer(required=True, validate=validate.Range(min=1))
    char = fields.Integer(load_default=None)
    terms = fields.List(fields.Nested(JetTermSchema), load_default=list)

    @pre_dump
    def to_document(self, v, **kwargs):
        P = v.algebra
        return {
            'mode': P.mode,
            'm': P.m,
            'd': P.d,
            'char': P.field.characteristic,
            'terms': [{'alpha': list(a), 'coeff': poly_text(c)} for a, c in v.terms]
        }

    @post_load
    def make_element(self, data, **kwargs):
        field = self.field_for(data)
        try:
            P = JetAlgebra(data['d'], data['m'], field, data['mode'])
            terms = {}
            for term in data['terms']:
                alpha = tuple(term['alpha'])
                terms[alpha] = terms.get(alpha, P.ring.zero) + self.poly(term['coeff'], P.d, field)
            return P.element(terms)
        except EngineError as e:
            raise ValidationError(e.message)


jet_element_schema = JetElementSchema()

from fractions import Fraction

from marshmallow import EXCLUDE, Schema, ValidationError

from ..errors import EngineError, FixtureError
from ..models.field import ScalarField
from ..models.matrix import Matrix
from ..models.poly import format_poly, poly_ring
from .grammar import parse_poly


class BaseSchema(Schema):
    """Base schema carrying the scalar field the literals are read into"""

    class Meta:
        unknown = EXCLUDE

    def __init__(self, *args, field: ScalarField = None, **kwargs):
        super().__init__(*args, **kwargs)
        self.scalar_field = field or ScalarField(0)

    def handle_error(self, error, data, **kwargs):
        """Custom error handler for schema validation errors"""
        message = []
        for field_name, field_errors in error.messages.items():
            if isinstance(field_errors, list):
                for err in field_errors:
                    message.append(f"{field_name}: {err}")
            else:
                message.append(f"{field_name}: {field_errors}")
        raise FixtureError('Validation failed', payload={'messages': message})

    def field_for(self, data) -> ScalarField:
        """Honor a "char" key in the document over the schema default"""
        char = data.get('char')
        if char is None:
            return self.scalar_field
        try:
            return ScalarField(char)
        except EngineError as e:
            raise ValidationError(e.message)

    def poly(self, text: str, d: int, field: ScalarField = None, prefix: str = 'x'):
        try:
            return parse_poly(str(text), d, field or self.scalar_field, prefix)
        except EngineError as e:
            raise ValidationError(f'{text!r}: {e.message}')

    def poly_matrix(self, rows, d: int, field: ScalarField = None) -> Matrix:
        field = field or self.scalar_field
        R = poly_ring(d, field.characteristic)
        ncols = len(rows[0]) if rows else 0
        return Matrix.from_rows([[self.poly(c, d, field) for c in row] for row in rows], R.to_domain(), ncols)

    def scalar(self, text, field: ScalarField = None):
        field = field or self.scalar_field
        try:
            return field.convert(Fraction(str(text)))
        except (ValueError, ZeroDivisionError, EngineError) as e:
            raise ValidationError(f'{text!r} is not a scalar: {e}')


def poly_text(f, field: ScalarField = None, prefix: str = 'x') -> str:
    return format_poly(f, field, prefix)


def matrix_text(M: Matrix, field: ScalarField = None):
    """Dense nested lists of literals; polynomial or scalar entries"""
    if M.domain.is_PolynomialRing:
        return M.to_text(lambda f: format_poly(f, field))
    field = field or ScalarField(int(M.domain.characteristic()))
    return M.to_text(field.to_text)

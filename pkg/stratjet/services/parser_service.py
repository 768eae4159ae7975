from typing import Optional

from .base_service import BaseService
from ..errors import PolyParseError
from ..models.field import ScalarField
from ..schemas.grammar import parse_poly


class ParserService(BaseService):
    """Service class for polynomial literals"""

    def __init__(self):
        super().__init__('parser')

    def parse_poly(self, text: str, d: Optional[int] = None, field: ScalarField = ScalarField(0),
                   prefix: str = 'x'):
        """Parse a polynomial literal into the ring k[prefix1..prefixd]"""
        try:
            return parse_poly(text, d, field, prefix)
        except PolyParseError as e:
            self.logger.error(f"Error parsing polynomial: {str(e)}")
            raise

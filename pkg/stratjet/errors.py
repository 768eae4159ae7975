import json
import logging

import click

logger = logging.getLogger('stratjet')

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


def error_response(exit_code, message=None, payload=None):
    """Write a JSON error document to stderr and return the exit code"""
    body = dict(payload or ())
    body['error'] = 'usage error' if exit_code == EXIT_USAGE else 'check failure'
    body['exit_code'] = exit_code
    if message:
        body['message'] = message
    click.echo(json.dumps(body, sort_keys=True), err=True)
    return exit_code


class EngineError(Exception):
    """Base class for engine errors"""
    def __init__(self, message, exit_code=EXIT_USAGE, payload=None):
        super().__init__(message)
        self.message = message
        self.exit_code = exit_code
        self.payload = payload

    def to_dict(self):
        rv = dict(self.payload or ())
        rv['message'] = self.message
        rv['exit_code'] = self.exit_code
        rv['error'] = type(self).__name__
        return rv


class DimensionMismatchError(EngineError):
    """Raised when objects over different base dimensions are combined"""


class ShapeError(EngineError):
    """Raised when matrix or module shapes do not fit"""


class OrderError(EngineError):
    """Raised when an order or level is out of range"""


class NonInvertibleError(EngineError):
    """Raised when a required scalar is not invertible in the field"""


class FieldError(EngineError):
    """Raised for an unsupported characteristic or mixed fields"""


class PolyParseError(EngineError):
    """Raised when a polynomial literal does not match the grammar"""
    def __init__(self, message, position=None, text=None):
        super().__init__(message, payload={'position': position, 'text': text})
        self.position = position


class ComplexError(EngineError):
    """Raised when consecutive differentials do not compose to zero"""


class FlatnessError(EngineError):
    """Raised when a connection is required to be flat and is not"""


class StratificationError(EngineError):
    """Raised on malformed stratification data"""


class SectionMismatchError(EngineError):
    """Raised when two sections disagree modulo the nilpotent ideal"""


class TruncationError(EngineError):
    """Raised when a truncation bound is too small for the request"""


class DimensionGuardError(EngineError):
    """Raised when a dense matrix exceeds the configured column guard"""


class FixtureError(EngineError):
    """Raised when an input file cannot be read or validated"""


def register_error_handlers(cli):
    """Wrap a click group so engine errors become JSON on stderr and exit code 2"""
    invoke = cli.invoke

    def guarded_invoke(ctx):
        try:
            return invoke(ctx)
        except EngineError as error:
            logger.error(f'Engine Error: {error.message}')
            ctx.exit(error_response(error.exit_code, error.message, error.to_dict()))

    cli.invoke = guarded_invoke
    return cli

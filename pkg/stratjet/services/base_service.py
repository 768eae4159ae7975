import logging
from functools import wraps
from time import perf_counter


def timed(f):
    """Decorator to log how long a service call took"""
    @wraps(f)
    def decorated_function(self, *args, **kwargs):
        start_time = perf_counter()
        result = f(self, *args, **kwargs)
        duration = perf_counter() - start_time
        self.logger.info(f'{self.name}.{f.__name__} completed in {duration:.3f}s')
        return result
    return decorated_function


class BaseService:
    """Base service class with a named logger"""

    def __init__(self, name: str):
        self.name = name
        self.logger = logging.getLogger(f'stratjet.{name}')

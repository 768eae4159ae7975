from .base_service import BaseService
from .exactcore_service import ExactCoreService
from .parser_service import ParserService
from .jet_service import JetService
from .diffop_service import DiffOpService
from .strat_service import StratService
from .derham_service import DeRhamService
from .crystal_service import CrystalService
from .fixture_service import FixtureService
from .suite_service import SuiteService

__all__ = [
    'BaseService',
    'ExactCoreService',
    'ParserService',
    'JetService',
    'DiffOpService',
    'StratService',
    'DeRhamService',
    'CrystalService',
    'FixtureService',
    'SuiteService'
]

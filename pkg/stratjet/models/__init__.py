from .field import ScalarField
from .matrix import Matrix
from .complex import ChainComplex
from .jet import GradedJetPiece, JetAlgebra, JetElement, JetTensor
from .module import DiffOperator, FreeModule, ProMap, TruncatedTower
from .strat import Connection, HorizontalSections, InducedTower, StratModule
from .forms import Bicomplex, DifferentialComplex, Form, FormModule
from .crystal import BMatrix, CrystalFiber, Section, Thickening, ThickeningElement
from .report import CheckRecord, Report, SuiteConfig

__all__ = [
    'ScalarField',
    'Matrix',
    'ChainComplex',
    'JetAlgebra',
    'JetElement',
    'JetTensor',
    'GradedJetPiece',
    'FreeModule',
    'DiffOperator',
    'TruncatedTower',
    'ProMap',
    'Connection',
    'StratModule',
    'InducedTower',
    'HorizontalSections',
    'FormModule',
    'Form',
    'DifferentialComplex',
    'Bicomplex',
    'Thickening',
    'ThickeningElement',
    'Section',
    'BMatrix',
    'CrystalFiber',
    'CheckRecord',
    'Report',
    'SuiteConfig'
]

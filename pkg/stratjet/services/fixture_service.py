from random import Random
from typing import Dict, List, Tuple

from .base_service import BaseService
from .crystal_service import CrystalService
from .derham_service import DeRhamService
from ..errors import FixtureError
from ..models.crystal import Section, Thickening
from ..models.field import ScalarField
from ..models.forms import DifferentialComplex
from ..models.matrix import Matrix
from ..models.module import DiffOperator, FreeModule
from ..models.poly import monomial, multi_indices, unit_vector
from ..models.strat import Connection, StratModule

# (s, nu) of the thickenings the crystal checks run on
THICKENINGS = ((1, 1), (1, 2), (2, 2))

FLAT = ('trivial-1', 'trivial-2', 'nilpotent', 'twist', 'plane-unipotent')
CONTROLS = ('plane-curved',)


class FixtureService(BaseService):
    """Service class for the built-in fixture catalog and its negative controls"""

    def __init__(self, derham: DeRhamService = None, crystal: CrystalService = None):
        super().__init__('fixture')
        self.derham = derham or DeRhamService()
        self.crystal = crystal or CrystalService()

    def connection(self, name: str, field: ScalarField = ScalarField(0)) -> Connection:
        builders = {
            'trivial-1': lambda: Connection.trivial(1, 1, field),
            'trivial-2': lambda: Connection.trivial(2, 1, field),
            'nilpotent': lambda: Connection.nilpotent(field),
            'twist': lambda: Connection.constant_twist(3, field),
            'plane-unipotent': lambda: Connection.plane_unipotent(field),
            'plane-curved': lambda: Connection.plane_curved(field),
        }
        if name not in builders:
            raise FixtureError(f'unknown fixture {name!r}', payload={'known': sorted(builders)})
        return builders[name]()

    def catalog(self, field: ScalarField = ScalarField(0), include_controls: bool = False) -> List[Connection]:
        names = FLAT + (CONTROLS if include_controls else ())
        return [self.connection(name, field) for name in names]

    def derham_fixtures(self, dims, field: ScalarField = ScalarField(0)) -> List[DifferentialComplex]:
        """De Rham complexes of A^d and the DR complexes of the flat catalog"""
        out = []
        for d in dims:
            F = self.derham.derham_complex(d, field)
            out.append(DifferentialComplex(F.modules, F.operators, f'derham A^{d}'))
        for conn in self.catalog(field):
            if conn.rank > 1 or any(not A.is_zero() for A in conn.matrices):
                out.append(self.derham.derham_of_connection(conn))
        return out

    def corrupted_complex(self, d: int = 2, field: ScalarField = ScalarField(0)) -> DifferentialComplex:
        """De Rham complex of A^d with the sign of ∂_1 flipped in d^0"""
        if d < 2:
            raise FixtureError('the corrupted control needs d >= 2')
        F = self.derham.derham_complex(d, field)
        D = F.operators[0]
        table = D.table()
        e1 = unit_vector(d, 0)
        table[e1] = -table[e1]
        broken = DiffOperator.from_table(D.source, D.target, table, D.order)
        return F.replace(0, broken, f'corrupted derham A^{d}')

    def perturbed_strat(self, M: StratModule, level: int = 2) -> StratModule:
        """Add the identity to the top-order coefficient at one level, breaking co-associativity"""
        if level > M.N or level < 1:
            raise FixtureError(f'cannot perturb level {level} of a stratification known to {M.N}')
        table = M.table(level)
        alpha = (level,) + (0,) * (M.d - 1)
        table[alpha] = M.matrix(level, alpha) + M.matrix(0, (0,) * M.d)
        return M.with_level(level, table)

    def random_operator(self, source: FreeModule, target: FreeModule, order: int, rng: Random) -> DiffOperator:
        """Operator of the given order with affine coefficients drawn from -2..2"""
        R = source.ring
        linear = multi_indices(source.d, 1)
        table = {}
        for alpha in multi_indices(source.d, order):
            rows = [[sum((monomial(R, e) * rng.randint(-2, 2) for e in linear), R.zero)
                     for _ in range(source.rank)] for _ in range(target.rank)]
            table[alpha] = Matrix.from_rows(rows, source.poly_domain, source.rank)
        return DiffOperator.from_table(source, target, table, order)

    def operator_pair(self, d: int, seed: int,
                      field: ScalarField = ScalarField(0)) -> Tuple[DiffOperator, DiffOperator]:
        """Composable D1: L0 -> L1, D2: L1 -> L2 of order <= 1 on ranks <= 2"""
        rng = Random(seed)
        L0, L1, L2 = (FreeModule(d, rng.randint(1, 2), field) for _ in range(3))
        D1 = self.random_operator(L0, L1, rng.randint(0, 1), rng)
        D2 = self.random_operator(L1, L2, rng.randint(0, 1), rng)
        return D1, D2

    def thickening(self, s: int, nu: int, field: ScalarField = ScalarField(0), mode: str = 'plain') -> Thickening:
        return Thickening(s, nu, field, mode)

    def section_triple(self, B: Thickening, d: int) -> Tuple[Section, Section, Section]:
        """Three sections through the point (1, ..., d) with different nilpotent parts"""
        shifts = ((0, 1), (1, -1), (3, 2))
        triple = []
        for b, c in shifts:
            images = []
            for j in range(d):
                h = B.scalar(j + 1) + B.t(1).scale(b * (j + 1))
                if B.s > 1:
                    h = h + B.t(2).scale(c) + (B.t(1) * B.t(2)).scale(j + b)
                images.append(h)
            triple.append(self.crystal.section(B, images))
        return tuple(triple)

    def crystal_cases(self, field: ScalarField = ScalarField(0), mode: str = 'plain') -> Dict:
        return {f's={s},nu={nu}': self.thickening(s, nu, field, mode) for s, nu in THICKENINGS}

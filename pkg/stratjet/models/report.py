from dataclasses import dataclass, field as dc_field
from typing import Any, Dict, List, Optional, Tuple

from ..errors import FieldError, ShapeError
from .field import ScalarField
from .jet import MODES

STATUSES = ('pass', 'fail', 'flag')
CHECKS = ('poincare', 'homotopy', 'order1', 'strat', 'phi', 'psi', 'crystal', 'functoriality')


@dataclass
class CheckRecord:
    """Outcome of one check run with one parameter set"""
    check: str
    params: Dict[str, Any]
    status: str
    details: Dict[str, Any] = dc_field(default_factory=dict)
    wall_time: float = 0.0
    expected_fail: bool = False

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f'unknown status {self.status!r}')

    @property
    def counts_as_failure(self) -> bool:
        return self.status == 'fail' and not self.expected_fail

    def sort_key(self) -> Tuple:
        return self.check, sorted((k, str(v)) for k, v in self.params.items())


@dataclass
class Report:
    schema_version: str
    config: Dict[str, Any]
    records: List[CheckRecord] = dc_field(default_factory=list)
    run_id: Optional[str] = None

    @property
    def failed(self) -> List[CheckRecord]:
        return [r for r in self.records if r.counts_as_failure]

    @property
    def exit_code(self) -> int:
        return 1 if self.failed else 0

    def summary(self) -> Dict[str, int]:
        out = {s: 0 for s in STATUSES}
        for r in self.records:
            out[r.status] += 1
        out['expected_fail'] = sum(1 for r in self.records if r.status == 'fail' and r.expected_fail)
        return out


@dataclass
class SuiteConfig:
    characteristic: int = 0
    mode: str = 'plain'
    dims: Tuple[int, ...] = (1, 2)
    levels: Tuple[int, ...] = (0, 1, 2, 3)
    degree_bounds: Tuple[int, ...] = (0, 1, 2)
    checks: Tuple[str, ...] = CHECKS
    fixtures: Tuple[str, ...] = ()
    out: Optional[str] = None
    expect_fail: Tuple[str, ...] = ()
    workers: int = 1
    use_catalog: bool = True
    seed: int = 1729

    def __post_init__(self):
        ScalarField(self.characteristic)
        if self.mode not in MODES:
            raise FieldError(f'unknown mode {self.mode!r}')
        if not self.dims or not self.levels or not self.degree_bounds:
            raise ShapeError('dimension, level and degree ranges must be nonempty')
        unknown = [c for c in self.checks if c not in CHECKS]
        if unknown:
            raise ShapeError(f'unknown checks: {", ".join(unknown)}')

    @property
    def field(self) -> ScalarField:
        return ScalarField(self.characteristic)

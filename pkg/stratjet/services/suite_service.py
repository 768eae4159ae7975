import json
from concurrent.futures import ThreadPoolExecutor
from math import comb
from time import perf_counter
from typing import Callable, Dict, List, Optional, Tuple

from .base_service import BaseService, timed
from .crystal_service import CrystalService
from .derham_service import DeRhamService
from .diffop_service import DiffOpService
from .exactcore_service import ExactCoreService
from .fixture_service import FixtureService
from .strat_service import StratService
from ..errors import EngineError, FixtureError
from ..models.module import FreeModule
from ..models.report import CheckRecord, Report, SuiteConfig
from ..models.strat import Connection, InducedTower
from ..schemas.connection import ConnectionSchema
from ..schemas.report import SuiteConfigSchema

Task = Tuple[str, Dict, Callable[[], Tuple[str, Dict]]]


def verdict(ok: bool) -> str:
    return 'pass' if ok else 'fail'


class SuiteService(BaseService):
    """Service class running verification suites and assembling reports"""

    def __init__(self, exactcore: ExactCoreService = None, diffop: DiffOpService = None,
                 strat: StratService = None, derham: DeRhamService = None,
                 crystal: CrystalService = None, fixtures: FixtureService = None,
                 schema_version: str = '1.0'):
        super().__init__('suite')
        self.exactcore = exactcore or ExactCoreService()
        self.diffop = diffop or DiffOpService()
        self.strat = strat or StratService(self.exactcore)
        self.derham = derham or DeRhamService(self.exactcore, self.diffop, self.strat)
        self.crystal = crystal or CrystalService()
        self.fixtures = fixtures or FixtureService(self.derham, self.crystal)
        self.schema_version = schema_version

    # fixtures

    def load_connections(self, config: SuiteConfig) -> Tuple[List[Connection], List[CheckRecord]]:
        """Catalog plus fixture files; unreadable files become fail records"""
        field = config.field
        connections = self.fixtures.catalog(field) if config.use_catalog else []
        errors = []
        schema = ConnectionSchema(field=field)
        for path in config.fixtures:
            try:
                with open(path, encoding='utf-8') as handle:
                    conn = schema.load(json.load(handle))
                if conn.field != field:
                    raise FixtureError(f'fixture is over {conn.field.name}, suite runs over {field.name}')
                connections.append(conn)
            except (OSError, ValueError, EngineError) as e:
                message = getattr(e, 'message', str(e))
                self.logger.error(f"Error loading fixture {path}: {message}")
                errors.append(CheckRecord('fixture', {'path': path}, 'fail', {'error': message}))
        return connections, errors

    def _strat_level(self, config: SuiteConfig, wanted: int) -> int:
        """Plain Taylor stratifications stop below the characteristic"""
        if config.mode == 'plain' and config.characteristic:
            return min(wanted, config.characteristic - 1)
        return wanted

    # tasks

    def _poincare_tasks(self, config: SuiteConfig) -> List[Task]:
        field, mode = config.field, config.mode
        tasks = []
        for d in config.dims:
            for n in config.levels:
                def run(d=d, n=n):
                    ranks = self.exactcore.complex_homology_ranks(
                        self.derham.linearized_derham_level(n, d, field, mode))
                    return verdict(not any(ranks)), {'homology_ranks': ranks}
                tasks.append(('poincare', {'d': d, 'n': n}, run))
        return tasks

    def _homotopy_tasks(self, config: SuiteConfig) -> List[Task]:
        field, mode = config.field, config.mode
        tasks = []
        for d in config.dims:
            for n in config.levels:
                if n < 1:
                    continue

                def run(d=d, n=n):
                    C = self.derham.graded_derham_level(n, d, field, mode)
                    ranks = self.exactcore.complex_homology_ranks(C)
                    details = {'homology_ranks': ranks}
                    if C.homotopy is None:
                        details['homotopy'] = 'refused'
                        return ('flag' if not any(ranks) else 'fail'), details
                    identity = self.exactcore.check_homotopy_identity(C)
                    details['identity'] = identity
                    if identity['pass']:
                        return 'pass', details
                    if mode == 'divided':
                        return ('flag' if not any(ranks) else 'fail'), details
                    return 'fail', details
                tasks.append(('homotopy', {'d': d, 'n': n}, run))
        return tasks

    def _order1_tasks(self, config: SuiteConfig) -> List[Task]:
        tasks = []
        for F in self.fixtures.derham_fixtures(config.dims, config.field):
            def run(F=F):
                result = self.diffop.verify_order1_relations(F)
                return verdict(result['pass']), result
            tasks.append(('order1', {'complex': F.name}, run))
        return tasks

    def _strat_tasks(self, config: SuiteConfig, connections: List[Connection]) -> List[Task]:
        N = self._strat_level(config, max(config.levels))
        tasks = []
        for conn in connections:
            def run(conn=conn):
                M = self.strat.taylor_stratification(conn, N, config.mode)
                result = self.strat.verify_stratification(M)
                round_trip = self.strat.extract_connection(M).matrices == conn.matrices
                result['round_trip'] = round_trip
                return verdict(result['pass'] and round_trip), result
            tasks.append(('strat', {'fixture': conn.name, 'N': N}, run))
        for d in config.dims:
            for bound in config.degree_bounds:
                def run(d=d, bound=bound):
                    tower = InducedTower(FreeModule(d, 1, config.field), bound + 2, config.mode)
                    H = self.strat.horizontal_sections(tower, bound)
                    expected = comb(bound + d, d)
                    details = {'dimension': H.dimension, 'expected': expected, 'stabilized': H.stabilized}
                    return verdict(H.dimension == expected and H.stabilized), details
                tasks.append(('strat', {'fixture': f'induced-d{d}', 'bound': bound}, run))
        return tasks

    def _phi_tasks(self, config: SuiteConfig) -> List[Task]:
        levels = min(max(config.levels), 2)
        tasks = []
        for F in self.fixtures.derham_fixtures(config.dims, config.field):
            def run(F=F):
                result = self.derham.verify_phi_chainmap(F, levels)
                result['sigma_eta'] = self.derham.verify_sigma_eta(F)
                return verdict(result['pass'] and result['sigma_eta']['pass']), result
            tasks.append(('phi', {'complex': F.name, 'levels': levels}, run))
        if 1 in config.dims:
            def total():
                F = self.derham.derham_complex(1, config.field)
                B = self.derham.derham_q0_bicomplex(F, 2, min(config.degree_bounds))
                result = self.derham.verify_total_complex(B)
                return verdict(result['pass']), result
            tasks.append(('phi', {'complex': 'derham A^1', 'bicomplex_level': 2}, total))
        return tasks

    def _psi_tasks(self, config: SuiteConfig, connections: List[Connection]) -> List[Task]:
        levels = min(max(config.levels), 3)
        N = self._strat_level(config, levels + 1)
        tasks = []
        for conn in connections:
            def run(conn=conn):
                M = self.strat.taylor_stratification(conn, N, config.mode)
                result = self.derham.verify_psi_exactness(M, levels)
                return verdict(result['pass']), result
            tasks.append(('psi', {'fixture': conn.name, 'levels': levels}, run))
        return tasks

    def _crystal_tasks(self, config: SuiteConfig, connections: List[Connection]) -> List[Task]:
        refusal = {'refused': 'plain Taylor coefficients need nu below the characteristic'}
        tasks = []
        for label, B in self.fixtures.crystal_cases(config.field, config.mode).items():
            refused = config.mode == 'plain' and config.characteristic and B.nu >= config.characteristic
            for conn in connections:
                if refused:
                    tasks.append(('crystal', {'fixture': conn.name, 'thickening': label},
                                  lambda: ('flag', dict(refusal))))
                    continue

                def run(conn=conn, B=B):
                    M = self.strat.taylor_stratification(conn, B.nu, config.mode)
                    h0, h1, h2 = self.fixtures.section_triple(B, conn.d)
                    result = self.crystal.verify_cocycle(M, h0, h1, h2)
                    return verdict(result['pass']), result
                tasks.append(('crystal', {'fixture': conn.name, 'thickening': label}, run))
        return tasks

    def _functoriality_tasks(self, config: SuiteConfig) -> List[Task]:
        levels = min(max(config.levels), 3)
        tasks = []
        for d in config.dims:
            for trial in range(2):
                seed = config.seed * 100 + d * 10 + trial

                def run(d=d, seed=seed):
                    D1, D2 = self.fixtures.operator_pair(d, seed, config.field)
                    result = self.diffop.verify_functoriality(D2, D1, levels)
                    result['ranks'] = [D1.source.rank, D1.target.rank, D2.target.rank]
                    return verdict(result['pass']), result
                tasks.append(('functoriality', {'d': d, 'seed': seed, 'levels': levels}, run))
        return tasks

    def build_tasks(self, config: SuiteConfig, connections: List[Connection]) -> List[Task]:
        builders = {
            'poincare': lambda: self._poincare_tasks(config),
            'homotopy': lambda: self._homotopy_tasks(config),
            'order1': lambda: self._order1_tasks(config),
            'strat': lambda: self._strat_tasks(config, connections),
            'phi': lambda: self._phi_tasks(config),
            'psi': lambda: self._psi_tasks(config, connections),
            'crystal': lambda: self._crystal_tasks(config, connections),
            'functoriality': lambda: self._functoriality_tasks(config),
        }
        tasks = []
        for check in config.checks:
            tasks.extend(builders[check]())
        return tasks

    # execution

    def run_task(self, task: Task, config: SuiteConfig) -> CheckRecord:
        check, params, fn = task
        params = dict(params, char=config.characteristic, mode=config.mode)
        start_time = perf_counter()
        try:
            status, details = fn()
        except EngineError as e:
            self.logger.error(f"Error running {check} {params}: {e.message}")
            status, details = 'fail', e.to_dict()
        record = CheckRecord(check, params, status, details, round(perf_counter() - start_time, 6))
        record.expected_fail = check in config.expect_fail
        return record

    @timed
    def run_suite(self, config: SuiteConfig, connections: Optional[List[Connection]] = None) -> Report:
        """Run the selected checks; records keep task order whatever the completion order"""
        errors = []
        if connections is None:
            connections, errors = self.load_connections(config)
        tasks = self.build_tasks(config, connections)
        self.logger.info(f'running {len(tasks)} checks with {config.workers} workers')
        if config.workers > 1:
            with ThreadPoolExecutor(max_workers=config.workers) as executor:
                records = list(executor.map(lambda t: self.run_task(t, config), tasks))
        else:
            records = [self.run_task(t, config) for t in tasks]
        for record in errors:
            record.expected_fail = record.check in config.expect_fail
        report = Report(self.schema_version, SuiteConfigSchema().dump(config), errors + records)
        self.logger.info(f'suite finished: {report.summary()}')
        return report

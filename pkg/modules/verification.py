"""
성질 검증 배터리 모듈

lemma1     - 매치게이트 합성 닫힘성
conjecture - vee-hat 항등식 (패밀리별 시드 인스턴스)
mirror     - N=4, 5 블록 미러링
downfold   - 6큐비트 무필드 나이브 회로 다운폴딩
appendixA  - 패밀리별 2-CNOT 분해 충실도
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from .circuit import circuit_unitary, naive_circuit
from .errors import CompilerError, NonConvergenceError, UnknownSuiteError
from .hamiltonian import ModelSpec
from .linalg import phase_invariant_distance
from .matchgate import (FamilyTag, compose, decompose, is_matchgate, native_product,
                        random_ggate, random_matchgate_blocks)
from .mirror import block_sites, downfold, mirror_block, sequence_unitary, solve_vee_hat
from .synth import SynthesisOptions

logger = logging.getLogger(__name__)

LEMMA1_TOL = 1e-9
MIRROR_TOL = 1e-8
DOWNFOLD_TOL = 1e-7
DECOMPOSE_TOL = 1e-10

FAMILIES = list(FamilyTag)
NO_FIELD_AXES = {FamilyTag.F1: 'x', FamilyTag.F2: 'y', FamilyTag.F3: 'z',
                 FamilyTag.F7: 'xy', FamilyTag.F8: 'xz', FamilyTag.F9: 'yz'}
NO_FIELD_FAMILIES = list(NO_FIELD_AXES)


@dataclass
class SuiteReport:
    """검증 스위트 결과"""

    suite: str
    trials: int = 0
    passed: int = 0
    max_residual: float = 0.0
    failures: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def failed(self) -> int:
        return self.trials - self.passed

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def record(self, residual: float, passed: bool, **info):
        self.trials += 1
        self.max_residual = max(self.max_residual, float(residual))
        if passed:
            self.passed += 1
        else:
            self.failures.append({'residual': float(residual), **info})

    def summary(self) -> str:
        status = '✅ PASS' if self.ok else '❌ FAIL'
        return (f"{status} {self.suite}: {self.passed}/{self.trials} 통과, "
                f"최대 잔차 {self.max_residual:.3e}")


def _rng(*key: int) -> np.random.Generator:
    return np.random.default_rng(list(key))


def run_lemma1(trials: int, seed: int, options: SynthesisOptions) -> SuiteReport:
    report = SuiteReport('lemma1')
    for i in range(trials):
        rng = _rng(seed, i)
        g1, g2 = random_matchgate_blocks(rng), random_matchgate_blocks(rng)
        g3 = compose(g1, g2)
        residual = float(np.max(np.abs(g3.embed() - g1.embed() @ g2.embed())))
        structure = is_matchgate(g3.embed(), LEMMA1_TOL)
        report.record(residual, residual <= LEMMA1_TOL and structure, seed=seed, trial=i)
    return report


def run_conjecture(trials: int, seed: int, options: SynthesisOptions) -> SuiteReport:
    report = SuiteReport('conjecture')
    for f_index, family in enumerate(FAMILIES):
        for i in range(trials):
            rng = _rng(seed, f_index, i)
            g1, g2, g3 = (random_ggate(family, rng) for _ in range(3))
            try:
                solution = solve_vee_hat(g1, g2, g3, options, seed=seed + i)
                residual, passed = solution.residual, True
            except NonConvergenceError as e:
                residual, passed = e.cost, False
                logger.warning(f"⚠️ vee-hat 반례 후보: {family.code}, "
                               f"seed=({seed}, {f_index}, {i}), 잔차 {residual:.3e}")
            report.record(residual, passed, family=family.code, seed=[seed, f_index, i],
                          angles=[list(g.angles) for g in (g1, g2, g3)])
    return report


def run_mirror(trials: int, seed: int, options: SynthesisOptions) -> SuiteReport:
    report = SuiteReport('mirror')
    for n in (4, 5):
        for i in range(trials):
            rng = _rng(seed, n, i)
            family = FAMILIES[i % len(FAMILIES)]
            cols = block_sites(n, n, 0)
            block = [[random_ggate(family, rng) for _ in col] for col in cols]
            try:
                solution = mirror_block(block, n, 0, options, seed=seed + i)
                target = sequence_unitary([g for col in block for g in col],
                                          [s for col in cols for s in col], n)
                residual = phase_invariant_distance(solution.unitary(n), target)
                passed = residual <= MIRROR_TOL
            except NonConvergenceError as e:
                residual, passed = e.cost, False
            report.record(residual, passed, n=n, family=family.code, seed=[seed, n, i])
    return report


def run_downfold(trials: int, seed: int, options: SynthesisOptions,
                 n_qubits: int = 6) -> SuiteReport:
    report = SuiteReport('downfold')
    for i in range(trials):
        rng = _rng(seed, i)
        family = NO_FIELD_FAMILIES[i % len(NO_FIELD_FAMILIES)]
        steps = 3 + i % 8
        couplings = {a: float(rng.uniform(-0.5, 0.5)) for a in 'xyz'}
        spec = ModelSpec(n_spins=n_qubits,
                         **{f"j{a}": couplings[a] for a in NO_FIELD_AXES[family]})
        naive = naive_circuit(spec, 0.1, steps)
        try:
            folded = downfold(naive, options)
            residual = phase_invariant_distance(circuit_unitary(folded), circuit_unitary(naive))
            passed = residual <= DOWNFOLD_TOL and folded.column_count == n_qubits \
                and folded.metadata.get('passes', 0) == 2 * steps - n_qubits
        except CompilerError as e:
            residual, passed = getattr(e, 'cost', None) or 1.0, False
        report.record(residual, passed, family=family.code, steps=steps, seed=[seed, i])
    return report


def run_appendix_a(trials: int, seed: int, options: SynthesisOptions) -> SuiteReport:
    report = SuiteReport('appendixA')
    for f_index, family in enumerate(FAMILIES):
        worst, ok = 0.0, True
        for i in range(trials):
            g = random_ggate(family, _rng(seed, f_index, i))
            natives = decompose(g)
            residual = phase_invariant_distance(native_product(natives), g.matrix)
            worst = max(worst, residual)
            ok = ok and residual <= DECOMPOSE_TOL and sum(n.kind == 'cx' for n in natives) == 2
        report.record(worst, ok, family=family.code, seed=[seed, f_index])
    return report


SUITES: Dict[str, Callable[[int, int, SynthesisOptions], SuiteReport]] = {
    'lemma1': run_lemma1,
    'conjecture': run_conjecture,
    'mirror': run_mirror,
    'downfold': run_downfold,
    'appendixA': run_appendix_a,
}


def run_suite(name: str, trials: int, seed: int = 0,
              options: Optional[SynthesisOptions] = None) -> SuiteReport:
    if name not in SUITES:
        raise UnknownSuiteError(f"알 수 없는 스위트: {name} (가능: {', '.join(SUITES)})")
    logger.info(f"🧪 검증 스위트 시작: {name}, trials={trials}, seed={seed}")
    report = SUITES[name](trials, seed, options or SynthesisOptions(seed=seed))
    logger.info(report.summary())
    return report

"""
양자 퀜치 시뮬레이션 모듈

TFIM: |+⟩^N 초기 상태, 관측량 m_x
XY:   Néel |0101...⟩ 초기 상태 (큐비트 0 = |0⟩), 관측량 m_s
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np
import pandas as pd

from .circuit import circuit_unitary, constant_depth_template, naive_circuit, run_statevector
from .errors import IneligibleModelError
from .hamiltonian import (HBAR_EV_FS, DriveSpec, FieldSpec, ModelSpec, classify,
                          ground_state, hamiltonian_matrix)
from .linalg import PAULI, apply_gate, basis_state, operator_error, product_state
from .synth import (SynthesisOptions, step_unitary,
                    synthesize_trajectory, trajectory_targets)

logger = logging.getLogger(__name__)

TFIM_JX_EV = 11.83898e-3
TFIM_OMEGA = 0.0048
TFIM_DT = 3.0
XY_J_EV = -1.0
XY_DT = 0.025
DEFAULT_STEPS = 40


class Protocol(str, Enum):
    TFIM = 'tfim'
    XY = 'xy'
    CUSTOM = 'custom'


class Engine(str, Enum):
    EXACT = 'exactReference'
    CONSTANT_DEPTH = 'constantDepth'
    NAIVE = 'naiveTrotter'

    @classmethod
    def parse(cls, name: str) -> 'Engine':
        for engine in cls:
            if name == engine.value or name.upper() == engine.name:
                return engine
        raise ValueError(f"알 수 없는 엔진: {name} (가능: {[e.value for e in cls]})")


def tfim_spec(n_spins: int) -> ModelSpec:
    """J_x = 11.83898 meV, h_z(t) = 2J_x·cos(0.0048·t)"""
    return ModelSpec(n_spins=n_spins, jx=TFIM_JX_EV,
                     field=FieldSpec('z', DriveSpec.cosine(2 * TFIM_JX_EV, TFIM_OMEGA)))


def xy_spec(n_spins: int) -> ModelSpec:
    return ModelSpec(n_spins=n_spins, jx=XY_J_EV, jy=XY_J_EV)


@dataclass
class QuenchConfig:
    protocol: Protocol
    n_spins: int
    dt: float
    n_steps: int = DEFAULT_STEPS
    engine: Engine = Engine.EXACT
    seed: int = 0
    model: Optional[ModelSpec] = None
    initial_model: Optional[ModelSpec] = None
    observable: Optional[str] = None

    def __post_init__(self):
        self.protocol = Protocol(self.protocol)
        if isinstance(self.engine, str) and not isinstance(self.engine, Engine):
            self.engine = Engine.parse(self.engine)
        if self.n_steps < 0:
            raise ValueError(f"스텝 수는 0 이상: {self.n_steps}")
        if self.dt <= 0:
            raise ValueError(f"Δt는 양수여야 함: {self.dt}")
        if self.protocol is Protocol.CUSTOM and (self.model is None or self.initial_model is None):
            raise ValueError("custom 프로토콜은 model과 initial_model이 필요")
        for spec in (self.model, self.initial_model):
            if spec is not None and spec.n_spins != self.n_spins:
                raise ValueError(f"모델 스핀 수 {spec.n_spins} ≠ N={self.n_spins}")
        if self.observable not in (None, 'm_x', 'm_s'):
            raise ValueError(f"알 수 없는 관측량: {self.observable}")

    @property
    def final_model(self) -> ModelSpec:
        if self.model is not None:
            return self.model
        return tfim_spec(self.n_spins) if self.protocol is Protocol.TFIM else xy_spec(self.n_spins)

    @property
    def observable_name(self) -> str:
        if self.observable:
            return self.observable
        return 'm_s' if self.protocol is Protocol.XY else 'm_x'


def neel_state(n_spins: int) -> np.ndarray:
    """|0101...⟩ (큐비트 0 = |0⟩)"""
    index = sum(1 << (n_spins - 1 - i) for i in range(1, n_spins, 2))
    return basis_state(n_spins, index)


def initial_state(cfg: QuenchConfig) -> np.ndarray:
    if cfg.protocol is Protocol.TFIM:
        plus = np.array([1.0, 1.0]) / np.sqrt(2)
        return product_state([plus] * cfg.n_spins)
    if cfg.protocol is Protocol.XY:
        return neel_state(cfg.n_spins)
    return ground_state(hamiltonian_matrix(cfg.initial_model, 0.0))


def _n_qubits(state: np.ndarray) -> int:
    return int(np.log2(state.shape[0]))


def average_magnetization_x(state) -> float:
    """(1/N) Σ_i ⟨σ_i^x⟩"""
    psi = np.asarray(state, dtype=complex)
    n = _n_qubits(psi)
    total = sum(np.vdot(psi, apply_gate(psi, PAULI['X'], [i])).real for i in range(n))
    return float(total / n)


def staggered_magnetization_z(state) -> float:
    """(1/N) Σ_i (-1)^i ⟨σ_i^z⟩, 부호는 큐비트 0에서 +"""
    psi = np.asarray(state, dtype=complex)
    n = _n_qubits(psi)
    probs = (np.abs(psi) ** 2).reshape((2,) * n)
    total = 0.0
    for i in range(n):
        marginal = probs.sum(axis=tuple(j for j in range(n) if j != i))
        total += (-1) ** i * (marginal[0] - marginal[1])
    return float(total / n)


OBSERVABLES = {'m_x': average_magnetization_x, 'm_s': staggered_magnetization_z}


@dataclass
class QuenchRow:
    step: int
    time_fs: float
    value: float
    cost_flag: int = 0
    cost: float = 0.0


@dataclass
class TimeSeries:
    engine: Engine
    observable: str
    rows: List[QuenchRow] = field(default_factory=list)

    @property
    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.rows])

    @property
    def flagged(self) -> int:
        return sum(r.cost_flag for r in self.rows)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            'step': [r.step for r in self.rows],
            'time_fs': [r.time_fs for r in self.rows],
            'observable': [r.value for r in self.rows],
            'engine': [self.engine.value] * len(self.rows),
            'cost_flag': [r.cost_flag for r in self.rows],
        })


def comparison_frame(series: TimeSeries, reference: TimeSeries) -> pd.DataFrame:
    """엔진 결과와 정확 기준의 스텝별 차이"""
    frame = pd.DataFrame({
        'step': [r.step for r in series.rows],
        'time_fs': [r.time_fs for r in series.rows],
        series.engine.value: series.values,
        reference.engine.value: reference.values,
    })
    frame['abs_delta'] = (frame[series.engine.value] - frame[reference.engine.value]).abs()
    return frame


def run_quench(cfg: QuenchConfig, options: Optional[SynthesisOptions] = None) -> TimeSeries:
    """스텝 0..n 관측량 시계열"""
    opts = (options or SynthesisOptions()).with_overrides(seed=cfg.seed)
    spec = cfg.final_model
    observe = OBSERVABLES[cfg.observable_name]
    psi0 = initial_state(cfg)
    series = TimeSeries(cfg.engine, cfg.observable_name, [QuenchRow(0, 0.0, observe(psi0))])

    logger.info(f"📊 퀜치 시작: {cfg.protocol.value}, N={cfg.n_spins}, "
                f"{cfg.n_steps} 스텝, 엔진={cfg.engine.value}")

    if cfg.engine is Engine.EXACT:
        psi = psi0
        for step in range(1, cfg.n_steps + 1):
            psi = step_unitary(spec, cfg.dt, step, opts.hbar, opts.sampling, opts.max_qubits) @ psi
            series.rows.append(QuenchRow(step, step * cfg.dt, observe(psi)))

    elif cfg.engine is Engine.NAIVE:
        for step in range(1, cfg.n_steps + 1):
            circuit = naive_circuit(spec, cfg.dt, step, opts.hbar, opts.sampling)
            psi = run_statevector(circuit, psi0)
            series.rows.append(QuenchRow(step, step * cfg.dt, observe(psi)))

    else:
        verdict = classify(spec)
        if not verdict.eligible:
            raise IneligibleModelError(f"상수 깊이 대상이 아님: {verdict.reason}")
        template = constant_depth_template(spec.n_spins, verdict.family)
        for result in synthesize_trajectory(spec, cfg.dt, cfg.n_steps, opts):
            circuit = template.instantiate(result.angles).decomposed()
            psi = run_statevector(circuit, psi0)
            series.rows.append(QuenchRow(result.step, result.step * cfg.dt, observe(psi),
                                         int(not result.converged), result.cost))

    if series.flagged:
        logger.warning(f"⚠️ 수렴 실패로 표시된 스텝 {series.flagged}개")
    logger.info(f"✅ 퀜치 완료: {len(series.rows)} 행")
    return series


def trotter_error_series(spec: ModelSpec, total_time: float, dts,
                         hbar: float = HBAR_EV_FS) -> List[float]:
    """고정 총 시간에서 Δt별 나이브 회로 연산자 오차 (1차 트로터 검증용)"""
    opts = SynthesisOptions(hbar=hbar)
    errors = []
    for dt in dts:
        n = int(round(total_time / dt))
        exact = trajectory_targets(spec, dt, n, opts)[-1]
        naive = circuit_unitary(naive_circuit(spec, dt, n, hbar))
        errors.append(operator_error(naive, exact))
    return errors

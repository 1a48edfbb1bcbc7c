"""
회로 중간 표현 모듈

- GatePlacement / Circuit: 배치 순서가 곧 시간 순서 (첫 배치가 연산자 곱의 가장 오른쪽)
- 나이브 트로터 회로 (스텝마다 필드 열, 홀수 결합 열, 짝수 결합 열)
- 상수 깊이 템플릿 (N개 열, 열 c는 큐비트 c mod 2에서 시작)
"""

from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (DimMismatchError, IndexOutOfRangeError, IneligibleModelError,
                     SizeCapExceededError)
from .hamiltonian import HBAR_EV_FS, ModelSpec, classify, sample_time
from .linalg import DEFAULT_MAX_QUBITS, apply_gate
from .matchgate import FamilyTag, GGate, NativeGate, decompose, pure_coupling_angles

Gate = Union[GGate, NativeGate]


@dataclass(frozen=True)
class GatePlacement:
    """게이트 배치: 2큐비트 게이트는 (site, site+1)에 작용"""

    gate: Gate
    site: int
    column: Optional[int] = None

    @property
    def qubits(self) -> Tuple[int, ...]:
        if isinstance(self.gate, GGate):
            return (self.site, self.site + 1)
        return tuple(self.site + q for q in self.gate.qubits)

    @property
    def is_g_gate(self) -> bool:
        return isinstance(self.gate, GGate)

    @property
    def matrix(self) -> np.ndarray:
        return self.gate.matrix


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    placements: Tuple[GatePlacement, ...] = ()
    metadata: Dict[str, Any] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        placements = tuple(self.placements)
        for p in placements:
            qubits = p.qubits
            if min(qubits) < 0 or max(qubits) >= self.n_qubits:
                raise IndexOutOfRangeError(
                    f"배치 범위 초과: site={p.site}, qubits={qubits}, N={self.n_qubits}")
            if len(qubits) == 2 and abs(qubits[1] - qubits[0]) != 1:
                raise IndexOutOfRangeError(f"최근접 이웃이 아닌 2큐비트 게이트: {qubits}")
        object.__setattr__(self, 'placements', placements)

    def __len__(self) -> int:
        return len(self.placements)

    def g_columns(self) -> List[List[GatePlacement]]:
        """G 게이트를 열 인덱스별로 묶어 시간 순서대로 반환"""
        columns: 'OrderedDict[int, List[GatePlacement]]' = OrderedDict()
        for p in self.placements:
            if p.is_g_gate:
                columns.setdefault(p.column, []).append(p)
        return list(columns.values())

    @property
    def column_count(self) -> int:
        return len(self.g_columns())

    @property
    def is_decomposed(self) -> bool:
        return not any(p.is_g_gate for p in self.placements)

    def decomposed(self) -> 'Circuit':
        """모든 G 게이트를 절대 큐비트 인덱스의 네이티브 게이트로 전개"""
        out: List[GatePlacement] = []
        for p in self.placements:
            if p.is_g_gate:
                out.extend(GatePlacement(native, p.site, p.column)
                           for native in decompose(p.gate))
            else:
                out.append(p)
        return Circuit(self.n_qubits, tuple(out), dict(self.metadata))


@dataclass(frozen=True)
class Template:
    """상수 깊이 템플릿: 열마다 G 게이트 슬롯 사이트 목록"""

    n_qubits: int
    family: FamilyTag
    columns: Tuple[Tuple[int, ...], ...]
    boundary_axis: Optional[str] = None

    @property
    def sites(self) -> List[int]:
        """열 우선 순서의 슬롯 사이트"""
        return [s for col in self.columns for s in col]

    @property
    def gate_count(self) -> int:
        return len(self.sites)

    @property
    def param_count(self) -> int:
        return self.family.arity * self.gate_count + (1 if self.boundary_axis else 0)

    def instantiate(self, angles: Sequence[float]) -> Circuit:
        angles = np.asarray(angles, dtype=float)
        if angles.shape != (self.param_count,):
            raise DimMismatchError(
                f"템플릿 파라미터 {self.param_count}개 필요 (입력 {angles.shape})")
        arity = self.family.arity
        placements: List[GatePlacement] = []
        k = 0
        for c, col in enumerate(self.columns):
            for site in col:
                gate = GGate(self.family, angles[k * arity:(k + 1) * arity])
                placements.append(GatePlacement(gate, site, c))
                k += 1
        if self.boundary_axis:
            rotation = NativeGate('r' + self.boundary_axis, (0,), angles[-1])
            placements.append(GatePlacement(rotation, self.n_qubits - 1))
        return Circuit(self.n_qubits, tuple(placements),
                       {'family': self.family.code, 'template': True})


def column_sites(n_qubits: int, offset: int) -> Tuple[int, ...]:
    return tuple(range(offset % 2, n_qubits - 1, 2))


def constant_depth_template(n_qubits: int, family: FamilyTag) -> Template:
    """N개 열, N(N-1)/2 슬롯 템플릿 (N=2는 단일 슬롯)"""
    if n_qubits < 2:
        raise ValueError(f"큐비트 수는 2 이상이어야 함: {n_qubits}")
    if n_qubits == 2:
        columns: Tuple[Tuple[int, ...], ...] = ((0,),)
    else:
        columns = tuple(column_sites(n_qubits, c) for c in range(n_qubits))
    boundary = None
    # 홀수 N에서 쌍 단위 필드 층만으로는 마지막 큐비트의 필드 위상이 부족함
    if family.field_axis is not None and n_qubits % 2 == 1:
        boundary = family.field_axis
    return Template(n_qubits, family, columns, boundary)


def naive_circuit(spec: ModelSpec, dt: float, n_steps: int,
                  hbar: float = HBAR_EV_FS, sampling: str = 'left') -> Circuit:
    """n 스텝 1차 트로터 회로 (필드 → 홀수 결합 → 짝수 결합)"""
    verdict = classify(spec)
    if not verdict.eligible:
        raise IneligibleModelError(f"상수 깊이 대상이 아님: {verdict.reason}")

    n = spec.n_spins
    family = verdict.family
    gate = GGate(family, pure_coupling_angles(family, spec.jx, spec.jy, spec.jz, dt, hbar))
    placements: List[GatePlacement] = []

    for step in range(1, n_steps + 1):
        if spec.field is not None:
            phi = -2.0 * spec.field_amplitude(sample_time(step, dt, sampling)) * dt / hbar
            kind = 'r' + spec.field.axis
            placements.extend(GatePlacement(NativeGate(kind, (0,), phi), q) for q in range(n))
        for parity in (0, 1):
            col = 2 * (step - 1) + parity
            placements.extend(GatePlacement(gate, s, col) for s in column_sites(n, parity))

    return Circuit(n, tuple(placements),
                   {'family': family.code, 'steps': n_steps, 'dt': dt, 'naive': True})


def _check_size(n_qubits: int, max_qubits: int):
    if n_qubits > max_qubits:
        raise SizeCapExceededError(f"큐비트 수 {n_qubits}이 상한 {max_qubits} 초과")


def circuit_unitary(circuit: Circuit, max_qubits: int = DEFAULT_MAX_QUBITS) -> np.ndarray:
    """배치 순서대로 게이트를 곱한 회로 행렬"""
    _check_size(circuit.n_qubits, max_qubits)
    U = np.eye(2 ** circuit.n_qubits, dtype=complex)
    for p in circuit.placements:
        U = apply_gate(U, p.matrix, p.qubits)
    return U


def run_statevector(circuit: Circuit, state) -> np.ndarray:
    psi = np.asarray(state, dtype=complex)
    if psi.shape != (2 ** circuit.n_qubits,):
        raise DimMismatchError(f"상태 벡터 길이 불일치: {psi.shape}")
    for p in circuit.placements:
        psi = apply_gate(psi, p.matrix, p.qubits)
    return psi


def cnot_count(c: Union[Circuit, Template]) -> int:
    """2 x (G 게이트 수) + 명시적 CNOT 수"""
    if isinstance(c, Template):
        return 2 * c.gate_count
    return sum(2 if p.is_g_gate else int(p.gate.kind == 'cx') for p in c.placements)

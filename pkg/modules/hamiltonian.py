"""
하이젠베르크 모델 해밀토니안 모듈

H(t) = -Σ_α J_α Σ_i σ_i^α σ_{i+1}^α - h_β(t) Σ_i σ_i^β  (열린 경계)
에너지 단위 eV, 시간 단위 fs.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import linalg as sla

from .errors import SizeCapExceededError
from .linalg import DEFAULT_MAX_QUBITS, check_hermitian, pauli_string
from .matchgate import FamilyTag

HBAR_EV_FS = 0.6582119569
AXES = ('x', 'y', 'z')
DEGENERACY_TOL = 1e-9

# 필드 축 → {결합 축 집합: 패밀리}
_FIELD_TABLE: Dict[Optional[str], Dict[frozenset, FamilyTag]] = {
    None: {
        frozenset(): FamilyTag.F1,
        frozenset('x'): FamilyTag.F1,
        frozenset('y'): FamilyTag.F2,
        frozenset('z'): FamilyTag.F3,
        frozenset('xy'): FamilyTag.F7,
        frozenset('xz'): FamilyTag.F8,
        frozenset('yz'): FamilyTag.F9,
    },
    'x': {
        frozenset('x'): FamilyTag.F4,
        frozenset('y'): FamilyTag.F12,
        frozenset('z'): FamilyTag.F12,
        frozenset('yz'): FamilyTag.F12,
    },
    'y': {
        frozenset('y'): FamilyTag.F5,
        frozenset('x'): FamilyTag.F11,
        frozenset('z'): FamilyTag.F11,
        frozenset('xz'): FamilyTag.F11,
    },
    'z': {
        frozenset('z'): FamilyTag.F6,
        frozenset('x'): FamilyTag.F10,
        frozenset('y'): FamilyTag.F10,
        frozenset('xy'): FamilyTag.F10,
    },
}


@dataclass(frozen=True)
class DriveSpec:
    """필드 진폭 h(t) 정의 (constant / cosine / tabulated)"""

    kind: str = 'constant'
    h0: float = 0.0
    omega: float = 0.0
    times: Tuple[float, ...] = ()
    values: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in ('constant', 'cosine', 'tabulated'):
            raise ValueError(f"알 수 없는 드라이브 종류: {self.kind}")
        object.__setattr__(self, 'times', tuple(float(t) for t in self.times))
        object.__setattr__(self, 'values', tuple(float(v) for v in self.values))
        if self.kind == 'tabulated':
            if not self.times or len(self.times) != len(self.values):
                raise ValueError("tabulated 드라이브의 times/values 길이가 다름")
            if any(b <= a for a, b in zip(self.times, self.times[1:])):
                raise ValueError("tabulated 드라이브의 times는 순증가해야 함")
        for v in (self.h0, self.omega) + self.values:
            if not math.isfinite(v):
                raise ValueError("드라이브 값이 유한하지 않음")

    @classmethod
    def constant(cls, h0: float) -> 'DriveSpec':
        return cls('constant', h0=h0)

    @classmethod
    def cosine(cls, h0: float, omega: float) -> 'DriveSpec':
        return cls('cosine', h0=h0, omega=omega)

    @classmethod
    def tabulated(cls, times, values) -> 'DriveSpec':
        return cls('tabulated', times=tuple(times), values=tuple(values))

    def amplitude(self, t: float) -> float:
        if self.kind == 'constant':
            return self.h0
        if self.kind == 'cosine':
            return self.h0 * math.cos(self.omega * t)
        # 선형 보간, 범위 밖은 끝값 유지
        return float(np.interp(t, self.times, self.values))


@dataclass(frozen=True)
class FieldSpec:
    axis: str
    drive: DriveSpec

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"필드 축은 x, y, z 중 하나: {self.axis}")


@dataclass(frozen=True)
class ModelSpec:
    """결합 상수(eV), 선택적 균일 필드, 스핀 수"""

    n_spins: int = 2
    jx: float = 0.0
    jy: float = 0.0
    jz: float = 0.0
    field: Optional[FieldSpec] = None

    def __post_init__(self):
        if int(self.n_spins) < 2:
            raise ValueError(f"스핀 수는 2 이상이어야 함: {self.n_spins}")
        object.__setattr__(self, 'n_spins', int(self.n_spins))
        for name in ('jx', 'jy', 'jz'):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} 값이 유한하지 않음")
            object.__setattr__(self, name, value)

    @property
    def couplings(self) -> Dict[str, float]:
        return {'x': self.jx, 'y': self.jy, 'z': self.jz}

    @property
    def nonzero_axes(self) -> Tuple[str, ...]:
        return tuple(a for a, j in self.couplings.items() if j != 0.0)

    @property
    def field_axis(self) -> Optional[str]:
        return self.field.axis if self.field else None

    def field_amplitude(self, t: float) -> float:
        return self.field.drive.amplitude(t) if self.field else 0.0

    def is_time_independent(self) -> bool:
        return self.field is None or self.field.drive.kind == 'constant'


@dataclass(frozen=True)
class Eligibility:
    """상수 깊이 적합성 판정 결과"""

    eligible: bool
    family: Optional[FamilyTag]
    reason: str
    row: str = '∅'
    column: str = ''
    label: str = ''

    @property
    def cell(self) -> str:
        return f"row {self.row}, col {self.column or '-'}"


def _column_name(axes: Tuple[str, ...]) -> str:
    return '+'.join(f"J{a}" for a in axes)


def _hamiltonian_label(axes: Tuple[str, ...], field_axis: Optional[str]) -> str:
    terms = [a.upper() * 2 for a in axes]
    if field_axis:
        terms.append(f"h{field_axis}")
    return '+'.join(terms) or 'I'


def classify(spec: ModelSpec) -> Eligibility:
    """결합 축 집합과 필드 축으로 상수 깊이 적합성 판정"""
    axes = spec.nonzero_axes
    beta = spec.field_axis
    row = beta or '∅'
    column = _column_name(axes)
    label = _hamiltonian_label(axes, beta)

    if len(axes) == 3:
        return Eligibility(False, None, "JxJyJz ≠ 0 (세 결합이 모두 0이 아님)", row, column, label)
    if beta is not None and not axes:
        return Eligibility(False, None, f"h{beta} 필드만 있고 결합이 없음", row, column, label)

    family = _FIELD_TABLE[beta].get(frozenset(axes))
    if family is None:
        return Eligibility(
            False, None,
            f"두 결합 {column}에 필드 h{beta}가 포함된 축과 겹침", row, column, label)
    return Eligibility(True, family, f"family {family.code} ({label})", row, column, label)


def eligible_cells() -> List[Tuple[Optional[str], str, FamilyTag]]:
    """적합한 표 칸 18개: (필드 축, 결합 축 문자열, 패밀리)"""
    return [(beta, ''.join(sorted(axes)), family)
            for beta, row in _FIELD_TABLE.items()
            for axes, family in row.items() if axes]


def cell_model(n_spins: int, field_axis: Optional[str], axes: str,
               coupling: float = 0.3, field: float = 0.2) -> ModelSpec:
    """표 칸 하나를 대표하는 상수 결합/필드 모델"""
    return ModelSpec(n_spins, **{f"j{a}": coupling for a in axes},
                     field=FieldSpec(field_axis, DriveSpec.constant(field)) if field_axis else None)


@lru_cache(maxsize=64)
def _coupling_sum(n: int, axis: str) -> np.ndarray:
    P = axis.upper()
    total = sum(pauli_string(n, {i: P, i + 1: P}) for i in range(n - 1))
    total.setflags(write=False)
    return total


@lru_cache(maxsize=64)
def _field_sum(n: int, axis: str) -> np.ndarray:
    total = sum(pauli_string(n, {i: axis.upper()}) for i in range(n))
    total.setflags(write=False)
    return total


def hamiltonian_matrix(spec: ModelSpec, t: float,
                       max_spins: int = DEFAULT_MAX_QUBITS) -> np.ndarray:
    """시간 t에서의 2^N x 2^N 해밀토니안 행렬"""
    n = spec.n_spins
    if n > max_spins:
        raise SizeCapExceededError(f"스핀 수 {n}이 상한 {max_spins} 초과")

    H = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for axis, j in spec.couplings.items():
        if j != 0.0:
            H -= j * _coupling_sum(n, axis)
    if spec.field is not None:
        H -= spec.field_amplitude(t) * _field_sum(n, spec.field.axis)
    return H


def sample_time(step: int, dt: float, sampling: str = 'left') -> float:
    """τ번째 스텝(1부터)의 구간 상수 근사 샘플 시간"""
    if sampling == 'left':
        return (step - 1) * dt
    if sampling == 'midpoint':
        return (step - 0.5) * dt
    raise ValueError(f"알 수 없는 샘플링 규칙: {sampling}")


def ground_state(H, max_qubits: int = DEFAULT_MAX_QUBITS,
                 degeneracy_tol: float = DEGENERACY_TOL) -> np.ndarray:
    """
    최저 고유값의 정규화 고유벡터

    축퇴 시 기저 상태 e_k를 인덱스 순서로 바닥 공간에 투영하여, 절댓값 최대 진폭이
    k번째 성분인 첫 투영을 고른다 (최대 진폭의 인덱스가 가장 낮은 고유벡터).
    첫 번째 0이 아닌 진폭을 양의 실수로 맞춘다.
    """
    h = check_hermitian(H)
    if h.shape[0] > 2 ** max_qubits:
        raise SizeCapExceededError(f"차원 {h.shape[0]}이 상한 2^{max_qubits} 초과")

    w, v = sla.eigh(h)
    ground = v[:, w - w[0] <= degeneracy_tol]
    if ground.shape[1] == 1:
        g = ground[:, 0]
    else:
        g = None
        for k in range(h.shape[0]):
            candidate = ground @ ground[k].conj()
            norm = np.linalg.norm(candidate)
            if norm <= 1e-8:
                continue
            candidate = candidate / norm
            if g is None:
                g = candidate
            mags = np.abs(candidate)
            if mags[k] >= mags.max() - 1e-12:
                g = candidate
                break
    g = g / np.linalg.norm(g)

    lead = int(np.argmax(np.abs(g) > 1e-12))
    g = g * (abs(g[lead]) / g[lead])
    return g

"""
매치게이트 대수 모듈

- 매치게이트 블록 구조 G(A, B) 및 합성 규칙 (A3 = A1·A2, B3 = B1·B2)
- 12개 G 게이트 패밀리의 닫힌 형태 행렬
- 패밀리별 2-CNOT 네이티브 분해

회전 규약: R_α(θ) = exp(-iθσ_α/2), CNOT 제어 큐비트는 낮은 인덱스.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import unitary_group

from .errors import ArityMismatchError, DimMismatchError, FamilyMismatchError
from .linalg import PAULI, apply_gate, is_unitary

HALF_PI = np.pi / 2

_XX = np.kron(PAULI['X'], PAULI['X'])
_YY = np.kron(PAULI['Y'], PAULI['Y'])
_ZZ = np.kron(PAULI['Z'], PAULI['Z'])

CNOT = np.array([[1, 0, 0, 0],
                 [0, 1, 0, 0],
                 [0, 0, 0, 1],
                 [0, 0, 1, 0]], dtype=complex)

_OUTER = [0, 3]
_INNER = [1, 2]


class FamilyTag(Enum):
    """G 게이트 패밀리 (코드, 각도 개수, 해밀토니안 라벨, 필드 축)"""

    F1 = ('F1', 1, 'XX', None)
    F2 = ('F2', 1, 'YY', None)
    F3 = ('F3', 1, 'ZZ', None)
    F4 = ('F4', 2, 'XX+hx', 'x')
    F5 = ('F5', 2, 'YY+hy', 'y')
    F6 = ('F6', 2, 'ZZ+hz', 'z')
    F7 = ('F7', 2, 'XX+YY', None)
    F8 = ('F8', 2, 'XX+ZZ', None)
    F9 = ('F9', 2, 'YY+ZZ', None)
    F10 = ('F10', 4, '{XX|YY|XX+YY}+hz', 'z')
    F11 = ('F11', 4, '{XX|ZZ|XX+ZZ}+hy', 'y')
    F12 = ('F12', 4, '{YY|ZZ|YY+ZZ}+hx', 'x')

    def __init__(self, code: str, arity: int, label: str, field_axis: Optional[str]):
        self.code = code
        self.arity = arity
        self.label = label
        self.field_axis = field_axis

    @classmethod
    def from_code(cls, code: str) -> 'FamilyTag':
        try:
            return cls[code.upper()]
        except KeyError:
            raise FamilyMismatchError(f"알 수 없는 패밀리: {code}") from None

    def __str__(self) -> str:
        return self.code


# 회전 게이트

def rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=complex)


ROTATIONS = {'x': rx, 'y': ry, 'z': rz}


def pauli_rotation(P: np.ndarray, theta: float) -> np.ndarray:
    """exp(-iθP/2) (P² = I)"""
    return np.cos(theta / 2) * np.eye(P.shape[0]) - 1j * np.sin(theta / 2) * P


def _layer(axis: str, theta: float) -> np.ndarray:
    r = ROTATIONS[axis](theta)
    return np.kron(r, r)


def _core(first: np.ndarray, second: np.ndarray, t1: float, t2: float) -> np.ndarray:
    return pauli_rotation(first, t1) @ pauli_rotation(second, t2)


def family_matrix(family: FamilyTag, angles: Sequence[float]) -> np.ndarray:
    """패밀리 각도 벡터로부터 4x4 행렬 (검증 없는 빠른 경로)"""
    a = angles
    if family is FamilyTag.F1:
        return pauli_rotation(_XX, a[0])
    if family is FamilyTag.F2:
        return pauli_rotation(_YY, a[0])
    if family is FamilyTag.F3:
        return pauli_rotation(_ZZ, a[0])
    if family is FamilyTag.F4:
        return pauli_rotation(_XX, a[1]) @ _layer('x', a[0])
    if family is FamilyTag.F5:
        return pauli_rotation(_YY, a[1]) @ _layer('y', a[0])
    if family is FamilyTag.F6:
        return pauli_rotation(_ZZ, a[1]) @ _layer('z', a[0])
    if family is FamilyTag.F7:
        return _core(_XX, _YY, a[0], a[1])
    if family is FamilyTag.F8:
        return _core(_XX, _ZZ, a[0], a[1])
    if family is FamilyTag.F9:
        return _core(_YY, _ZZ, a[0], a[1])
    if family is FamilyTag.F10:
        return _layer('z', a[3]) @ _core(_XX, _YY, a[1], a[2]) @ _layer('z', a[0])
    if family is FamilyTag.F11:
        return _layer('y', a[3]) @ _core(_XX, _ZZ, a[1], a[2]) @ _layer('y', a[0])
    if family is FamilyTag.F12:
        return _layer('x', a[3]) @ _core(_YY, _ZZ, a[1], a[2]) @ _layer('x', a[0])
    raise FamilyMismatchError(f"지원하지 않는 패밀리: {family}")


@dataclass(frozen=True)
class GGate:
    """시간 발전 회로의 2큐비트 G 게이트"""

    family: FamilyTag
    angles: Tuple[float, ...]

    def __post_init__(self):
        angles = tuple(float(a) for a in self.angles)
        if len(angles) != self.family.arity:
            raise ArityMismatchError(
                f"{self.family.code}는 각도 {self.family.arity}개 필요 (입력 {len(angles)}개)")
        object.__setattr__(self, 'angles', angles)

    @property
    def n_qubits(self) -> int:
        return 2

    @property
    def matrix(self) -> np.ndarray:
        return family_matrix(self.family, self.angles)


@dataclass(frozen=True)
class NativeGate:
    """네이티브 게이트 (rx, ry, rz, cx)"""

    kind: str
    qubits: Tuple[int, ...]
    angle: float = 0.0

    def __post_init__(self):
        kind = self.kind.lower()
        qubits = tuple(int(q) for q in self.qubits)
        if kind not in ('rx', 'ry', 'rz', 'cx'):
            raise ValueError(f"알 수 없는 네이티브 게이트: {self.kind}")
        expected = 2 if kind == 'cx' else 1
        if len(qubits) != expected:
            raise ArityMismatchError(f"{kind} 게이트는 큐비트 {expected}개 필요")
        object.__setattr__(self, 'kind', kind)
        object.__setattr__(self, 'qubits', qubits)
        object.__setattr__(self, 'angle', float(self.angle))

    @property
    def n_qubits(self) -> int:
        return len(self.qubits)

    @property
    def matrix(self) -> np.ndarray:
        if self.kind == 'cx':
            return CNOT.copy()
        return ROTATIONS[self.kind[1]](self.angle)

    def shifted(self, offset: int) -> 'NativeGate':
        return NativeGate(self.kind, tuple(q + offset for q in self.qubits), self.angle)


def matrix_of(g: GGate) -> np.ndarray:
    return g.matrix


def _cx() -> NativeGate:
    return NativeGate('cx', (0, 1))


def _both(kind: str, theta: float) -> List[NativeGate]:
    return [NativeGate(kind, (0,), theta), NativeGate(kind, (1,), theta)]


def _sandwich(kind: str, body: List[NativeGate]) -> List[NativeGate]:
    return _both(kind, HALF_PI) + body + _both(kind, -HALF_PI)


def _cx_body(t1: Optional[float], t2: Optional[float]) -> List[NativeGate]:
    middle = []
    if t1 is not None:
        middle.append(NativeGate('rx', (0,), t1))
    if t2 is not None:
        middle.append(NativeGate('rz', (1,), t2))
    return [_cx()] + middle + [_cx()]


def decompose(g: GGate) -> List[NativeGate]:
    """G 게이트를 2-CNOT 네이티브 게이트 열로 분해 (큐비트 0/1 상대 인덱스, 시간 순서)"""
    f, a = g.family, g.angles
    if f is FamilyTag.F1:
        return _cx_body(a[0], None)
    if f is FamilyTag.F2:
        return _sandwich('rz', _cx_body(a[0], None))
    if f is FamilyTag.F3:
        return _cx_body(None, a[0])
    if f is FamilyTag.F4:
        return _both('rx', a[0]) + _cx_body(a[1], None)
    if f is FamilyTag.F5:
        return _both('ry', a[0]) + _sandwich('rz', _cx_body(a[1], None))
    if f is FamilyTag.F6:
        return _both('rz', a[0]) + _cx_body(None, a[1])
    if f is FamilyTag.F7:
        return _sandwich('rx', _cx_body(a[0], a[1]))
    if f is FamilyTag.F8:
        return _cx_body(a[0], a[1])
    if f is FamilyTag.F9:
        return _sandwich('rz', _cx_body(a[0], a[1]))
    if f is FamilyTag.F10:
        return _both('rz', a[0]) + _sandwich('rx', _cx_body(a[1], a[2])) + _both('rz', a[3])
    if f is FamilyTag.F11:
        return _both('ry', a[0]) + _cx_body(a[1], a[2]) + _both('ry', a[3])
    if f is FamilyTag.F12:
        return _both('rx', a[0]) + _sandwich('rz', _cx_body(a[1], a[2])) + _both('rx', a[3])
    raise FamilyMismatchError(f"지원하지 않는 패밀리: {f}")


def native_product(gates: Sequence[NativeGate], n_qubits: int = 2) -> np.ndarray:
    """네이티브 게이트 열의 연산자 곱 (첫 게이트가 가장 오른쪽)"""
    U = np.eye(2 ** n_qubits, dtype=complex)
    for gate in gates:
        U = apply_gate(U, gate.matrix, gate.qubits)
    return U


def strip_field_layers(g: GGate) -> np.ndarray:
    """
    필드 층(θ0/θ3)과 π/2 켤레를 제거한 매치게이트 코어

    F4/F5 → XX 회전, F10/F11/F12 → XX·YY 회전 곱 (ZZ 성분은 π/2 켤레로 YY가 됨)
    """
    f, a = g.family, g.angles
    if f in (FamilyTag.F4, FamilyTag.F5):
        return pauli_rotation(_XX, a[1])
    if f in (FamilyTag.F10, FamilyTag.F11, FamilyTag.F12):
        return _core(_XX, _YY, a[1], a[2])
    raise FamilyMismatchError(f"{f.code}는 이미 매치게이트 형태임")


def is_matchgate(M, tol: float = 1e-10) -> bool:
    """매치게이트 구조 검사 (블록 밖 8개 성분 ≈ 0, det(A) ≈ det(B))"""
    m = np.asarray(M, dtype=complex)
    if m.shape != (4, 4):
        raise DimMismatchError(f"4x4 행렬이 아님: {m.shape}")
    mask = np.zeros((4, 4), dtype=bool)
    mask[np.ix_(_OUTER, _OUTER)] = True
    mask[np.ix_(_INNER, _INNER)] = True
    if np.max(np.abs(m[~mask])) > tol:
        return False
    det_a = np.linalg.det(m[np.ix_(_OUTER, _OUTER)])
    det_b = np.linalg.det(m[np.ix_(_INNER, _INNER)])
    return bool(abs(det_a - det_b) <= tol)


@dataclass(frozen=True)
class MatchgateBlocks:
    """매치게이트 G(A, B): A는 바깥 블록 {00,11}, B는 안쪽 블록 {01,10}"""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=complex)
        b = np.asarray(self.b, dtype=complex)
        if a.shape != (2, 2) or b.shape != (2, 2):
            raise DimMismatchError("A, B 블록은 2x2여야 함")
        object.__setattr__(self, 'a', a)
        object.__setattr__(self, 'b', b)

    def is_valid(self, tol: float = 1e-10) -> bool:
        return (is_unitary(self.a, tol) and is_unitary(self.b, tol)
                and abs(np.linalg.det(self.a) - np.linalg.det(self.b)) <= tol)

    def embed(self) -> np.ndarray:
        m = np.zeros((4, 4), dtype=complex)
        m[np.ix_(_OUTER, _OUTER)] = self.a
        m[np.ix_(_INNER, _INNER)] = self.b
        return m

    @classmethod
    def from_matrix(cls, M, tol: float = 1e-10) -> 'MatchgateBlocks':
        m = np.asarray(M, dtype=complex)
        if not is_matchgate(m, tol):
            raise FamilyMismatchError("매치게이트 구조가 아님")
        return cls(m[np.ix_(_OUTER, _OUTER)], m[np.ix_(_INNER, _INNER)])

    @classmethod
    def identity(cls) -> 'MatchgateBlocks':
        return cls(np.eye(2), np.eye(2))


def compose(g1: MatchgateBlocks, g2: MatchgateBlocks) -> MatchgateBlocks:
    """G1·G2 (G2가 먼저 적용됨)"""
    return MatchgateBlocks(g1.a @ g2.a, g1.b @ g2.b)


def random_matchgate_blocks(rng: np.random.Generator) -> MatchgateBlocks:
    a = unitary_group.rvs(2, random_state=rng)
    b = unitary_group.rvs(2, random_state=rng)
    # det(cB) = c²·det(B)
    b = b * np.sqrt(np.linalg.det(a) / np.linalg.det(b))
    return MatchgateBlocks(a, b)


def random_angles(family: FamilyTag, rng: np.random.Generator) -> Tuple[float, ...]:
    """(-π, π] 균등 분포 각도"""
    return tuple(np.pi - rng.uniform(0.0, 2 * np.pi, family.arity))


def random_ggate(family: FamilyTag, rng: np.random.Generator) -> GGate:
    return GGate(family, random_angles(family, rng))


def pure_coupling_angles(family: FamilyTag, jx: float, jy: float, jz: float,
                         dt: float, hbar: float) -> Tuple[float, ...]:
    """
    필드가 없는 결합 전용 G 게이트 각도 (θ_α = -2·J_α·Δt/ħ, 필드 슬롯은 0)
    """
    tx, ty, tz = (-2.0 * j * dt / hbar for j in (jx, jy, jz))
    table: Dict[FamilyTag, Tuple[float, ...]] = {
        FamilyTag.F1: (tx,),
        FamilyTag.F2: (ty,),
        FamilyTag.F3: (tz,),
        FamilyTag.F4: (0.0, tx),
        FamilyTag.F5: (0.0, ty),
        FamilyTag.F6: (0.0, tz),
        FamilyTag.F7: (tx, ty),
        FamilyTag.F8: (tx, tz),
        FamilyTag.F9: (ty, tz),
        FamilyTag.F10: (0.0, tx, ty, 0.0),
        FamilyTag.F11: (0.0, tx, tz, 0.0),
        FamilyTag.F12: (0.0, ty, tz, 0.0),
    }
    return table[family]

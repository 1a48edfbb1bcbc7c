"""
밀집 복소 선형대수 모듈

큐비트 0이 상태 벡터 인덱스의 최상위 비트(MSB)이며,
kron(A_q0, B_q1) 순서로 합성한다.
"""

from functools import reduce
from typing import Dict, Iterable, Sequence

import numpy as np
from scipy import linalg as sla

from .errors import DimMismatchError, IndexOutOfRangeError, NotHermitianError

HERMITIAN_TOL = 1e-10
DEFAULT_MAX_QUBITS = 7

PAULI: Dict[str, np.ndarray] = {
    'I': np.eye(2, dtype=complex),
    'X': np.array([[0, 1], [1, 0]], dtype=complex),
    'Y': np.array([[0, -1j], [1j, 0]], dtype=complex),
    'Z': np.array([[1, 0], [0, -1]], dtype=complex),
}


def n_qubits_of(dim: int) -> int:
    """차원에서 큐비트 수 계산 (2의 거듭제곱만 허용)"""
    if dim < 1 or dim & (dim - 1):
        raise DimMismatchError(f"차원이 2의 거듭제곱이 아님: {dim}")
    return dim.bit_length() - 1


def _as_square(matrix) -> np.ndarray:
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimMismatchError(f"정방 행렬이 아님: shape={m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("행렬에 NaN/Inf 값이 포함됨")
    return m


def check_hermitian(H, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """에르미트 여부 검사 후 복소 배열로 반환"""
    h = _as_square(H)
    asym = np.max(np.abs(h - h.conj().T)) if h.size else 0.0
    if asym > tol:
        raise NotHermitianError(f"에르미트 행렬이 아님: max|H-H†|={asym:.3e}")
    return h


def expm_hermitian(H, s: float) -> np.ndarray:
    """exp(-i·s·H) 계산 (고유값 분해)"""
    h = check_hermitian(H)
    n_qubits_of(h.shape[0])
    w, v = sla.eigh(h)
    return (v * np.exp(-1j * s * w)) @ v.conj().T


def kron(A, B) -> np.ndarray:
    return np.kron(np.asarray(A, dtype=complex), np.asarray(B, dtype=complex))


def kron_all(matrices: Iterable) -> np.ndarray:
    return reduce(kron, matrices, np.eye(1, dtype=complex))


def pauli_string(n_qubits: int, ops: Dict[int, str]) -> np.ndarray:
    """{큐비트: 'X'|'Y'|'Z'} 형태의 파울리 곱 행렬"""
    for q in ops:
        if not 0 <= q < n_qubits:
            raise IndexOutOfRangeError(f"큐비트 인덱스 범위 초과: {q}")
    return kron_all(PAULI[ops.get(q, 'I').upper()] for q in range(n_qubits))


def is_unitary(U, tol: float = 1e-10) -> bool:
    u = np.asarray(U, dtype=complex)
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def phase_invariant_distance(U, V) -> float:
    """1 - |Tr(U†V)|/dim, 전역 위상에 불변"""
    u = np.asarray(U, dtype=complex)
    v = np.asarray(V, dtype=complex)
    if u.shape != v.shape:
        raise DimMismatchError(f"차원 불일치: {u.shape} vs {v.shape}")
    overlap = abs(np.vdot(u, v)) / u.shape[0]
    return float(min(1.0, max(0.0, 1.0 - overlap)))


def operator_error(U, V) -> float:
    """위상 정렬 후 정규화 프로베니우스 오차 (섭동에 선형)"""
    return float(np.sqrt(2.0 * phase_invariant_distance(U, V)))


def apply_gate_unchecked(array: np.ndarray, gate: np.ndarray, qubits: Sequence[int],
                         n_qubits: int) -> np.ndarray:
    k = len(qubits)
    batch = array.shape[1:]
    psi = array.reshape((2,) * n_qubits + batch)
    g = gate.reshape((2,) * (2 * k))
    out = np.tensordot(g, psi, axes=(list(range(k, 2 * k)), list(qubits)))
    out = np.moveaxis(out, list(range(k)), list(qubits))
    return out.reshape(array.shape)


def apply_gate(state, gate, qubits: Sequence[int]) -> np.ndarray:
    """
    게이트를 지정 큐비트에 적용

    state는 길이 2^N 상태 벡터 또는 (2^N, m) 연산자 블록(열 단위 변환).
    """
    array = np.asarray(state, dtype=complex)
    g = _as_square(gate)
    n_qubits = n_qubits_of(array.shape[0])
    qubits = [int(q) for q in qubits]

    if len(set(qubits)) != len(qubits):
        raise IndexOutOfRangeError(f"중복된 큐비트 인덱스: {qubits}")
    for q in qubits:
        if not 0 <= q < n_qubits:
            raise IndexOutOfRangeError(f"큐비트 인덱스 범위 초과: {q} (N={n_qubits})")
    if g.shape[0] != 2 ** len(qubits):
        raise DimMismatchError(
            f"게이트 차원 {g.shape[0]}이 큐비트 {len(qubits)}개와 맞지 않음")

    return apply_gate_unchecked(array, g, qubits, n_qubits)


def embed_gate(gate, qubits: Sequence[int], n_qubits: int) -> np.ndarray:
    """게이트를 N 큐비트 전체 행렬로 임베딩"""
    return apply_gate(np.eye(2 ** n_qubits, dtype=complex), gate, qubits)


def basis_state(n_qubits: int, index: int) -> np.ndarray:
    if not 0 <= index < 2 ** n_qubits:
        raise IndexOutOfRangeError(f"기저 인덱스 범위 초과: {index}")
    psi = np.zeros(2 ** n_qubits, dtype=complex)
    psi[index] = 1.0
    return psi


def product_state(vectors: Iterable) -> np.ndarray:
    """단일 큐비트 상태들의 텐서곱 (큐비트 0이 먼저)"""
    psi = reduce(np.kron, (np.asarray(v, dtype=complex) for v in vectors))
    return psi / np.linalg.norm(psi)

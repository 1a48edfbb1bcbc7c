# 🧪 해밀토니안 / 적합성 판정 테스트

import os
import sys

import numpy as np
import pytest

# 프로젝트 루트를 Python 경로에 추가
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from modules.errors import NotHermitianError, SizeCapExceededError  # noqa: E402
from modules.hamiltonian import (DriveSpec, FieldSpec, ModelSpec, cell_model,  # noqa: E402
                                 classify, eligible_cells, ground_state,
                                 hamiltonian_matrix, sample_time)
from modules.linalg import PAULI, kron, pauli_string  # noqa: E402
from modules.matchgate import FamilyTag  # noqa: E402
from modules.quench import tfim_spec  # noqa: E402

X, Z, I2 = PAULI['X'], PAULI['Z'], PAULI['I']


def field(axis, h0=0.5):
    return FieldSpec(axis, DriveSpec.constant(h0))


class TestClassify:
    """상수 깊이 적합성 표 테스트"""

    def test_tfim_cell(self):
        verdict = classify(ModelSpec(n_spins=3, jx=1.0, field=field('z')))
        assert verdict.eligible
        assert verdict.family is FamilyTag.F10
        assert verdict.label == 'XX+hz'
        assert verdict.cell == 'row z, col Jx'

    def test_full_heisenberg_ineligible(self):
        verdict = classify(ModelSpec(n_spins=3, jx=1.0, jy=0.5, jz=0.2))
        assert not verdict.eligible
        assert verdict.family is None
        assert 'JxJyJz ≠ 0' in verdict.reason

    def test_two_couplings_with_absent_axis_field(self):
        verdict = classify(ModelSpec(n_spins=3, jy=1.0, jz=1.0, field=field('x')))
        assert verdict.eligible
        assert verdict.family is FamilyTag.F12
        assert verdict.label == 'YY+ZZ+hx'

    @pytest.mark.parametrize('couplings, axis, family', [
        ({'jx': 1.0}, None, FamilyTag.F1),
        ({'jy': 1.0}, None, FamilyTag.F2),
        ({'jz': 1.0}, None, FamilyTag.F3),
        ({'jx': 1.0}, 'x', FamilyTag.F4),
        ({'jy': 1.0}, 'y', FamilyTag.F5),
        ({'jz': 1.0}, 'z', FamilyTag.F6),
        ({'jx': 1.0, 'jy': 1.0}, None, FamilyTag.F7),
        ({'jx': 1.0, 'jz': 1.0}, None, FamilyTag.F8),
        ({'jy': 1.0, 'jz': 1.0}, None, FamilyTag.F9),
        ({'jx': 1.0, 'jy': 1.0}, 'z', FamilyTag.F10),
        ({'jx': 1.0, 'jz': 1.0}, 'y', FamilyTag.F11),
        ({'jz': 1.0}, 'x', FamilyTag.F12),
    ])
    def test_eligible_cells(self, couplings, axis, family):
        spec = ModelSpec(n_spins=4, field=field(axis) if axis else None, **couplings)
        verdict = classify(spec)
        assert verdict.eligible
        assert verdict.family is family

    @pytest.mark.parametrize('couplings, axis', [
        ({'jx': 1.0, 'jy': 1.0}, 'x'),
        ({'jx': 1.0, 'jz': 1.0}, 'z'),
        ({'jx': 1.0, 'jy': 1.0, 'jz': 1.0}, 'z'),
        ({}, 'z'),
    ])
    def test_ineligible_cells(self, couplings, axis):
        assert not classify(ModelSpec(n_spins=3, field=field(axis), **couplings)).eligible

    def test_no_coupling_no_field(self):
        """결합과 필드가 모두 없으면 항등 발전 (F1)"""
        verdict = classify(ModelSpec(n_spins=2))
        assert verdict.eligible
        assert verdict.family is FamilyTag.F1
        assert verdict.label == 'I'


    def test_eligible_cells_cover_table(self):
        cells = eligible_cells()
        assert len(cells) == 18
        for field_axis, axes, family in cells:
            verdict = classify(cell_model(3, field_axis, axes))
            assert verdict.eligible and verdict.family is family


class TestHamiltonianMatrix:
    """해밀토니안 행렬 테스트"""

    def test_single_xx_term(self):
        H = hamiltonian_matrix(ModelSpec(n_spins=2, jx=1.0), 0.0)
        assert np.allclose(H, -kron(X, X))
        assert np.allclose(H, -np.fliplr(np.eye(4)))

    def test_zz_with_constant_field(self):
        """-σzσz - 0.5(σz⊗I + I⊗σz) = diag(-2, 1, 1, 0)"""
        H = hamiltonian_matrix(ModelSpec(n_spins=2, jz=1.0, field=field('z', 0.5)), 4.0)
        oracle = -kron(Z, Z) - 0.5 * (kron(Z, I2) + kron(I2, Z))
        assert np.allclose(H, oracle)
        assert np.allclose(np.diag(H).real, [-2, 1, 1, 0])

    def test_tfim_amplitude_at_zero(self):
        spec = tfim_spec(3)
        assert spec.field_amplitude(0.0) == pytest.approx(2 * spec.jx)
        H = hamiltonian_matrix(spec, 0.0)
        field_part = H + spec.jx * (pauli_string(3, {0: 'X', 1: 'X'}) + pauli_string(3, {1: 'X', 2: 'X'}))
        expected = -2 * spec.jx * sum(pauli_string(3, {i: 'Z'}) for i in range(3))
        assert np.allclose(field_part, expected)

    def test_hermitian_for_all_axes(self):
        spec = ModelSpec(n_spins=4, jx=0.3, jy=-0.7, field=FieldSpec('y', DriveSpec.cosine(0.4, 0.1)))
        for t in (0.0, 1.7, 12.5):
            H = hamiltonian_matrix(spec, t)
            assert np.max(np.abs(H - H.conj().T)) <= 1e-12

    def test_size_cap(self):
        with pytest.raises(SizeCapExceededError):
            hamiltonian_matrix(ModelSpec(n_spins=8, jx=1.0), 0.0)
        with pytest.raises(SizeCapExceededError):
            hamiltonian_matrix(ModelSpec(n_spins=4, jx=1.0), 0.0, max_spins=3)


class TestDrive:
    """필드 드라이브 테스트"""

    def test_cosine(self):
        drive = DriveSpec.cosine(2.0, 0.0048)
        assert drive.amplitude(0.0) == pytest.approx(2.0)
        assert drive.amplitude(100.0) == pytest.approx(2.0 * np.cos(0.48))

    def test_tabulated_interpolates_and_clamps(self):
        drive = DriveSpec.tabulated([0.0, 10.0, 20.0], [1.0, 3.0, -1.0])
        assert drive.amplitude(5.0) == pytest.approx(2.0)
        assert drive.amplitude(15.0) == pytest.approx(1.0)
        assert drive.amplitude(-3.0) == pytest.approx(1.0)
        assert drive.amplitude(50.0) == pytest.approx(-1.0)

    def test_invalid_drives(self):
        with pytest.raises(ValueError):
            DriveSpec.tabulated([0.0, 1.0], [1.0])
        with pytest.raises(ValueError):
            DriveSpec.tabulated([0.0, 0.0], [1.0, 2.0])
        with pytest.raises(ValueError):
            DriveSpec('square')
        with pytest.raises(ValueError):
            FieldSpec('w', DriveSpec.constant(1.0))

    def test_model_validation(self):
        with pytest.raises(ValueError):
            ModelSpec(n_spins=1, jx=1.0)
        with pytest.raises(ValueError):
            ModelSpec(n_spins=2, jx=float('nan'))

    def test_sample_time(self):
        assert sample_time(1, 3.0) == 0.0
        assert sample_time(4, 3.0) == pytest.approx(9.0)
        assert sample_time(4, 3.0, 'midpoint') == pytest.approx(10.5)
        with pytest.raises(ValueError):
            sample_time(1, 3.0, 'right')


class TestGroundState:
    """바닥 상태 테스트"""

    def test_sigma_z(self):
        assert np.allclose(ground_state(Z), [0, 1])

    def test_minus_sigma_x(self):
        assert np.allclose(ground_state(-X), np.array([1, 1]) / np.sqrt(2))

    def test_phase_fixed(self):
        g = ground_state(-kron(X, X) - 0.3 * kron(Z, I2))
        lead = np.flatnonzero(np.abs(g) > 1e-12)[0]
        assert g[lead].imag == pytest.approx(0.0, abs=1e-12)
        assert g[lead].real > 0

    def test_degenerate_is_deterministic(self):
        """축퇴된 바닥 공간에서 |00>의 투영은 최대 진폭이 0번 성분"""
        H = -kron(Z, Z)
        g = ground_state(H)
        assert np.allclose(g, [1, 0, 0, 0])
        assert np.allclose(ground_state(H), g)

    def test_degenerate_tie_break_by_peak_index(self):
        """|0> 투영은 최대 진폭이 1번 성분이므로 건너뛰고 |1> 투영을 선택"""
        basis, _ = np.linalg.qr(np.array([[1, 1], [2, 0], [0, 0], [0, 3]], dtype=complex))
        H = -basis @ basis.conj().T
        g = ground_state(H)
        expected = np.array([18, 40, 0, -6]) / np.linalg.norm([18, 40, 0, -6])
        assert np.allclose(g, expected, atol=1e-10)
        assert int(np.argmax(np.abs(g))) == 1
        assert np.linalg.norm(H @ g + g) <= 1e-9

    def test_not_hermitian(self):
        with pytest.raises(NotHermitianError):
            ground_state(np.array([[0, 1], [0, 0]], dtype=complex))

# 🧪 퀜치 시뮬레이션 테스트

import os
import sys

import numpy as np
import pytest

# 프로젝트 루트를 Python 경로에 추가
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from modules.errors import IneligibleModelError  # noqa: E402
from modules.hamiltonian import DriveSpec, FieldSpec, ModelSpec  # noqa: E402
from modules.linalg import basis_state, pauli_string  # noqa: E402
from modules.quench import (DEFAULT_STEPS, TFIM_DT, TFIM_JX_EV, XY_DT, Engine,  # noqa: E402
                            Protocol, QuenchConfig, average_magnetization_x,
                            comparison_frame, initial_state, neel_state, run_quench,
                            staggered_magnetization_z, tfim_spec, xy_spec)


def random_state(n, seed):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    return psi / np.linalg.norm(psi)


def max_delta(a, b):
    return float(np.max(np.abs(a.values - b.values)))


class TestPresets:
    """내장 프로토콜 상수 테스트"""

    def test_tfim_constants(self):
        spec = tfim_spec(5)
        assert spec.jx == pytest.approx(11.83898e-3)
        assert spec.field.axis == 'z'
        assert spec.field.drive.h0 == pytest.approx(2 * TFIM_JX_EV)
        assert spec.field.drive.omega == 0.0048
        assert TFIM_DT == 3.0

    def test_xy_constants(self):
        spec = xy_spec(3)
        assert (spec.jx, spec.jy, spec.jz) == (-1.0, -1.0, 0.0)
        assert spec.field is None
        assert XY_DT == 0.025
        assert DEFAULT_STEPS == 40


class TestInitialStates:
    """초기 상태 테스트"""

    def test_tfim_plus_state(self):
        psi = initial_state(QuenchConfig(Protocol.TFIM, 2, TFIM_DT))
        assert np.allclose(psi, np.full(4, 0.5))

    def test_xy_neel_state(self):
        assert np.allclose(initial_state(QuenchConfig(Protocol.XY, 3, XY_DT)), basis_state(3, 0b010))
        assert staggered_magnetization_z(neel_state(4)) == pytest.approx(1.0, abs=1e-15)

    def test_custom_ground_state(self):
        initial = ModelSpec(n_spins=2, field=FieldSpec('x', DriveSpec.constant(1.0)))
        cfg = QuenchConfig(Protocol.CUSTOM, 2, 0.1, model=ModelSpec(n_spins=2, jz=0.5),
                           initial_model=initial)
        assert np.allclose(initial_state(cfg), np.full(4, 0.5))
        assert cfg.observable_name == 'm_x'


class TestObservables:
    """관측량 테스트"""

    def test_magnetization_x_limits(self):
        plus = np.full(8, 1 / np.sqrt(8))
        assert average_magnetization_x(plus) == pytest.approx(1.0)
        assert average_magnetization_x(basis_state(3, 0)) == pytest.approx(0.0, abs=1e-15)

    def test_staggered_limits(self):
        assert staggered_magnetization_z(basis_state(4, 0)) == pytest.approx(0.0, abs=1e-15)
        assert staggered_magnetization_z(neel_state(5)) == pytest.approx(1.0)

    def test_dense_operator_oracle(self):
        n = 4
        psi = random_state(n, 3)
        mx = sum(pauli_string(n, {i: 'X'}) for i in range(n)) / n
        ms = sum((-1) ** i * pauli_string(n, {i: 'Z'}) for i in range(n)) / n
        assert average_magnetization_x(psi) == pytest.approx(np.vdot(psi, mx @ psi).real, abs=1e-12)
        assert staggered_magnetization_z(psi) == pytest.approx(np.vdot(psi, ms @ psi).real, abs=1e-12)


class TestQuenchConfig:
    """퀜치 설정 검증 테스트"""

    def test_validation(self):
        with pytest.raises(ValueError):
            QuenchConfig(Protocol.XY, 3, XY_DT, n_steps=-1)
        with pytest.raises(ValueError):
            QuenchConfig(Protocol.XY, 3, 0.0)
        with pytest.raises(ValueError):
            QuenchConfig(Protocol.CUSTOM, 3, 0.1)
        with pytest.raises(ValueError):
            QuenchConfig(Protocol.XY, 3, XY_DT, model=xy_spec(4))
        with pytest.raises(ValueError):
            QuenchConfig(Protocol.XY, 3, XY_DT, observable='m_y')

    def test_engine_parse(self):
        assert Engine.parse('constantDepth') is Engine.CONSTANT_DEPTH
        assert Engine.parse('naive') is Engine.NAIVE
        assert QuenchConfig('xy', 3, XY_DT, engine='naiveTrotter').engine is Engine.NAIVE
        with pytest.raises(ValueError):
            Engine.parse('magic')


class TestRunQuench:
    """퀜치 실행 테스트"""

    @pytest.mark.parametrize('protocol, dt', [(Protocol.TFIM, TFIM_DT), (Protocol.XY, XY_DT)])
    def test_zero_steps(self, protocol, dt):
        series = run_quench(QuenchConfig(protocol, 3, dt, n_steps=0))
        assert len(series.rows) == 1
        assert series.values[0] == pytest.approx(1.0, abs=1e-12)

    def test_exact_xy_bounds_and_frame(self):
        series = run_quench(QuenchConfig(Protocol.XY, 4, XY_DT, n_steps=10))
        assert len(series.rows) == 11
        assert np.all(np.abs(series.values) <= 1 + 1e-9)
        frame = series.to_frame()
        assert list(frame.columns) == ['step', 'time_fs', 'observable', 'engine', 'cost_flag']
        assert frame['time_fs'].iloc[-1] == pytest.approx(10 * XY_DT)
        assert set(frame['engine']) == {'exactReference'}

    def test_exact_step_refinement_for_static_model(self):
        coarse = run_quench(QuenchConfig(Protocol.XY, 3, XY_DT, n_steps=4))
        fine = run_quench(QuenchConfig(Protocol.XY, 3, XY_DT / 2, n_steps=8))
        assert np.allclose(coarse.values, fine.values[::2], atol=1e-10)

    def test_naive_trotter_tracks_exact(self):
        exact = run_quench(QuenchConfig(Protocol.TFIM, 3, TFIM_DT, n_steps=6))
        naive = run_quench(QuenchConfig(Protocol.TFIM, 3, TFIM_DT, n_steps=6, engine=Engine.NAIVE))
        assert 0.0 < max_delta(exact, naive) < 0.5

    def test_constant_depth_xy(self):
        exact = run_quench(QuenchConfig(Protocol.XY, 3, XY_DT, n_steps=4))
        cd = run_quench(QuenchConfig(Protocol.XY, 3, XY_DT, n_steps=4, engine=Engine.CONSTANT_DEPTH))
        assert cd.flagged == 0
        assert max_delta(exact, cd) <= 1e-4
        frame = comparison_frame(cd, exact)
        assert list(frame.columns) == ['step', 'time_fs', 'constantDepth', 'exactReference',
                                       'abs_delta']
        assert frame['abs_delta'].max() <= 1e-4

    def test_constant_depth_tfim(self):
        """홀수 N TFIM 퀜치: 플래그된 스텝 없이 기준과 일치"""
        exact = run_quench(QuenchConfig(Protocol.TFIM, 3, TFIM_DT, n_steps=10))
        cd = run_quench(QuenchConfig(Protocol.TFIM, 3, TFIM_DT, n_steps=10,
                                     engine=Engine.CONSTANT_DEPTH))
        assert cd.flagged == 0
        assert max_delta(exact, cd) <= 1e-4

    def test_constant_depth_requires_eligibility(self):
        model = ModelSpec(n_spins=3, jx=0.1, jy=0.1, jz=0.1)
        cfg = QuenchConfig(Protocol.CUSTOM, 3, 0.1, n_steps=1, engine=Engine.CONSTANT_DEPTH,
                           model=model, initial_model=model)
        with pytest.raises(IneligibleModelError):
            run_quench(cfg)

    @pytest.mark.slow
    @pytest.mark.parametrize('protocol, dt', [(Protocol.TFIM, TFIM_DT), (Protocol.XY, XY_DT)])
    @pytest.mark.parametrize('n', [3, 4, 5])
    def test_engine_agreement_full_trajectory(self, protocol, dt, n):
        exact = run_quench(QuenchConfig(protocol, n, dt))
        cd = run_quench(QuenchConfig(protocol, n, dt, engine=Engine.CONSTANT_DEPTH))
        assert cd.flagged == 0
        assert max_delta(exact, cd) <= 1e-4

"""
상수 깊이 회로 합성 엔진

목표 시간 발전 행렬에 템플릿 각도를 맞추는 다중 시작 준뉴턴 최적화.
비용: 1 - |Tr(V†U)|/2^N, 중앙 차분 기울기, scipy BFGS.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from .circuit import (Template, circuit_unitary, constant_depth_template,
                      naive_circuit)
from .errors import (DimMismatchError, FamilyMismatchError, IneligibleModelError,
                     NonConvergenceError, SizeCapExceededError)
from .hamiltonian import HBAR_EV_FS, ModelSpec, classify, hamiltonian_matrix, sample_time
from .linalg import DEFAULT_MAX_QUBITS, apply_gate_unchecked, expm_hermitian
from .matchgate import ROTATIONS, FamilyTag, family_matrix

logger = logging.getLogger(__name__)

POLISH_WINDOW = 1e-5
POLISH_ROUNDS = 4


@dataclass
class SynthesisOptions:
    """합성 옵션"""

    tol: float = 1e-9
    max_restarts: int = 32
    max_iter: int = 2000
    fd_step: float = 1e-7
    gtol: float = 1e-10
    seed: int = 0
    hbar: float = HBAR_EV_FS
    sampling: str = 'left'
    max_qubits: int = DEFAULT_MAX_QUBITS
    jobs: int = 1
    mode: str = 'sequential'

    def __post_init__(self):
        if self.tol <= 0 or self.max_restarts < 1 or self.fd_step <= 0:
            raise ValueError("합성 옵션 값이 올바르지 않음")
        if self.mode not in ('sequential', 'parallel'):
            raise ValueError(f"알 수 없는 궤적 모드: {self.mode}")

    def with_overrides(self, **kwargs) -> 'SynthesisOptions':
        values = dict(self.__dict__)
        values.update(kwargs)
        return SynthesisOptions(**values)


@dataclass(frozen=True)
class TargetSpec:
    spec: ModelSpec
    dt: float
    n_steps: int
    kind: str = 'exact'

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError(f"스텝 인덱스는 1 이상: {self.n_steps}")
        if self.dt <= 0:
            raise ValueError(f"Δt는 양수여야 함: {self.dt}")
        if self.kind not in ('exact', 'trotterized'):
            raise ValueError(f"알 수 없는 목표 종류: {self.kind}")


@dataclass
class SynthesisResult:
    """스텝별 합성 결과"""

    angles: np.ndarray
    cost: float
    restarts_used: int
    seed: int
    wall_time: float = 0.0
    step: int = 0
    converged: bool = True
    family: Optional[str] = None
    extra: Dict[str, Any] = field(default_factory=dict)

    def to_record(self, include_timing: bool = False) -> Dict[str, Any]:
        record = {
            'step': self.step,
            'family': self.family,
            'cost': float(self.cost),
            'restarts': self.restarts_used,
            'seed': self.seed,
            'converged': self.converged,
            'angles': [float(a) for a in self.angles],
        }
        if include_timing:
            record['wall_time_s'] = self.wall_time
        return record


class ParametrizedCircuit:
    """G 게이트 슬롯 열 (+ 선택적 경계 필드 회전)의 빠른 행렬 평가기"""

    def __init__(self, n_qubits: int, family: FamilyTag, sites: Sequence[int],
                 boundary_axis: Optional[str] = None):
        self.n_qubits = n_qubits
        self.family = family
        self.sites = list(sites)
        self.boundary_axis = boundary_axis
        self.n_params = family.arity * len(self.sites) + (1 if boundary_axis else 0)
        self._eye = np.eye(2 ** n_qubits, dtype=complex)

    @classmethod
    def from_template(cls, template: Template) -> 'ParametrizedCircuit':
        return cls(template.n_qubits, template.family, template.sites, template.boundary_axis)

    def unitary(self, x: np.ndarray) -> np.ndarray:
        a = self.family.arity
        U = self._eye
        for k, site in enumerate(self.sites):
            g = family_matrix(self.family, x[k * a:(k + 1) * a])
            U = apply_gate_unchecked(U, g, (site, site + 1), self.n_qubits)
        if self.boundary_axis:
            r = ROTATIONS[self.boundary_axis](x[-1])
            U = apply_gate_unchecked(U, r, (self.n_qubits - 1,), self.n_qubits)
        return U

    def cost(self, x: np.ndarray, target: np.ndarray) -> float:
        overlap = abs(np.vdot(self.unitary(x), target)) / target.shape[0]
        return 1.0 - overlap

    def gradient(self, x: np.ndarray, target: np.ndarray, h: float) -> np.ndarray:
        g = np.empty_like(x)
        step = np.zeros_like(x)
        for i in range(x.size):
            step[i] = h
            g[i] = (self.cost(x + step, target) - self.cost(x - step, target)) / (2 * h)
            step[i] = 0.0
        return g


def restart_point(n_params: int, seed: int, restart: int) -> np.ndarray:
    """재시작 k의 (-π, π] 균등 초기 각도"""
    rng = np.random.default_rng([seed, restart])
    return np.pi - rng.uniform(0.0, 2 * np.pi, n_params)


def _bfgs(model: ParametrizedCircuit, target: np.ndarray, x_init: np.ndarray,
          opts: SynthesisOptions) -> Tuple[np.ndarray, float]:
    res = minimize(model.cost, x_init, args=(target,),
                   jac=lambda x, t: model.gradient(x, t, opts.fd_step),
                   method='BFGS',
                   options={'maxiter': opts.max_iter, 'gtol': opts.gtol})
    return res.x, model.cost(res.x, target)


def fit_parametrized(model: ParametrizedCircuit, target: np.ndarray,
                     x0: Optional[Sequence[float]] = None,
                     options: Optional[SynthesisOptions] = None,
                     seed: Optional[int] = None,
                     max_restarts: Optional[int] = None,
                     tol: Optional[float] = None) -> SynthesisResult:
    """
    다중 시작 BFGS 피팅

    재시작 0은 x0(기본 0벡터)에서 시작하고, 재시작 k는 (seed, k)로 시드한 난수 각도.
    비용이 POLISH_WINDOW 이하이나 tol 초과이면 같은 점에서 BFGS를 최대 POLISH_ROUNDS회 재실행.
    tol 이하 비용에 도달하면 종료, 실패 시 최선 결과를 담아 NonConvergenceError.
    """
    opts = options or SynthesisOptions()
    seed = opts.seed if seed is None else seed
    restarts = opts.max_restarts if max_restarts is None else max_restarts
    tol = opts.tol if tol is None else tol
    target = np.asarray(target, dtype=complex)
    if target.shape != (2 ** model.n_qubits,) * 2:
        raise DimMismatchError(f"목표 행렬 차원 불일치: {target.shape}")

    start = time.perf_counter()
    best_x, best_cost, used = None, np.inf, 0

    for restart in range(restarts):
        if restart == 0:
            x_init = np.zeros(model.n_params) if x0 is None else np.asarray(x0, dtype=float)
            if x_init.shape != (model.n_params,):
                raise DimMismatchError(f"초기 각도 길이 불일치: {x_init.shape}")
        else:
            x_init = restart_point(model.n_params, seed, restart)
        used = restart

        cost_init = model.cost(x_init, target)
        if cost_init <= tol:
            x_opt, cost = x_init.copy(), cost_init
        else:
            x_opt, cost = _bfgs(model, target, x_init, opts)
            # 허용오차 근처에서 멈춘 해는 같은 점에서 헤세 근사를 새로 시작
            for _ in range(POLISH_ROUNDS):
                if cost <= tol or cost > POLISH_WINDOW:
                    break
                x_next, cost_next = _bfgs(model, target, x_opt, opts)
                if cost_next >= cost:
                    break
                x_opt, cost = x_next, cost_next

        if cost < best_cost:
            best_x, best_cost = x_opt, cost
        if best_cost <= tol:
            break

    result = SynthesisResult(
        angles=np.asarray(best_x, dtype=float),
        cost=max(0.0, float(best_cost)),
        restarts_used=used,
        seed=seed,
        wall_time=time.perf_counter() - start,
        family=model.family.code,
        converged=bool(best_cost <= tol),
    )
    if not result.converged:
        raise NonConvergenceError(
            f"최적화 수렴 실패: cost={best_cost:.3e} > tol={tol:.1e} "
            f"(재시작 {restarts}회, seed={seed})",
            best=result, cost=result.cost)
    return result


def fit_gate_sequence(target, family: FamilyTag, sites: Sequence[int], n_qubits: int,
                      x0: Optional[Sequence[float]] = None,
                      options: Optional[SynthesisOptions] = None,
                      seed: Optional[int] = None, **kwargs) -> SynthesisResult:
    """G 게이트 열(시간 순서 사이트 목록)을 목표 행렬에 피팅"""
    model = ParametrizedCircuit(n_qubits, family, sites)
    return fit_parametrized(model, target, x0, options, seed, **kwargs)


def step_unitary(spec: ModelSpec, dt: float, step: int, hbar: float = HBAR_EV_FS,
                 sampling: str = 'left', max_qubits: int = DEFAULT_MAX_QUBITS) -> np.ndarray:
    """스텝 τ의 구간 상수 정확 전파자 exp(-iH(t_τ)Δt/ħ)"""
    H = hamiltonian_matrix(spec, sample_time(step, dt, sampling), max_qubits)
    return expm_hermitian(H, dt / hbar)


def target_unitary(target: TargetSpec, options: Optional[SynthesisOptions] = None) -> np.ndarray:
    """U(nΔt): exact는 스텝 전파자의 순서곱(나중 스텝이 왼쪽), trotterized는 나이브 회로"""
    opts = options or SynthesisOptions()
    spec = target.spec
    if spec.n_spins > opts.max_qubits:
        raise SizeCapExceededError(f"스핀 수 {spec.n_spins}이 상한 {opts.max_qubits} 초과")

    if target.kind == 'trotterized':
        circuit = naive_circuit(spec, target.dt, target.n_steps, opts.hbar, opts.sampling)
        return circuit_unitary(circuit, opts.max_qubits)

    return trajectory_targets(spec, target.dt, target.n_steps, opts)[-1]


def trajectory_targets(spec: ModelSpec, dt: float, n_steps: int,
                       options: Optional[SynthesisOptions] = None,
                       kind: str = 'exact') -> List[np.ndarray]:
    """스텝 1..n의 목표 행렬 목록 (누적 곱)"""
    opts = options or SynthesisOptions()
    if kind == 'trotterized':
        return [target_unitary(TargetSpec(spec, dt, n, kind), opts) for n in range(1, n_steps + 1)]

    targets: List[np.ndarray] = []
    U = np.eye(2 ** spec.n_spins, dtype=complex)
    cached = step_unitary(spec, dt, 1, opts.hbar, opts.sampling, opts.max_qubits) \
        if spec.is_time_independent() else None
    for step in range(1, n_steps + 1):
        S = cached if cached is not None else \
            step_unitary(spec, dt, step, opts.hbar, opts.sampling, opts.max_qubits)
        U = S @ U
        targets.append(U)
    return targets


def _eligible_family(spec: ModelSpec) -> FamilyTag:
    verdict = classify(spec)
    if not verdict.eligible:
        raise IneligibleModelError(f"상수 깊이 대상이 아님: {verdict.reason}")
    return verdict.family


def synthesize(target: TargetSpec, template: Template,
               options: Optional[SynthesisOptions] = None,
               x0: Optional[Sequence[float]] = None,
               seed: Optional[int] = None) -> SynthesisResult:
    """목표 U(nΔt)에 상수 깊이 템플릿 각도를 피팅"""
    opts = options or SynthesisOptions()
    family = _eligible_family(target.spec)
    if template.family is not family:
        raise FamilyMismatchError(
            f"템플릿 패밀리 {template.family.code} ≠ 모델 패밀리 {family.code}")
    U = target_unitary(target, opts)
    result = _fit_step(U, template, opts, x0, opts.seed if seed is None else seed)
    result.step = target.n_steps
    return result


def _fit_step(U: np.ndarray, template: Template, opts: SynthesisOptions,
              x0: Optional[Sequence[float]], seed: int) -> SynthesisResult:
    model = ParametrizedCircuit.from_template(template)
    return fit_parametrized(model, U, x0, opts, seed)


def _flagged_fit(step: int, U: np.ndarray, template: Template, opts: SynthesisOptions,
                 x0: Optional[Sequence[float]]) -> SynthesisResult:
    seed = opts.seed + step
    try:
        result = _fit_step(U, template, opts, x0, seed)
    except NonConvergenceError as e:
        logger.warning(f"⚠️ 스텝 {step} 수렴 실패 (플래그 처리): {e}")
        result = e.best
    result.step = step
    return result


def synthesize_trajectory(spec: ModelSpec, dt: float, n_steps: int,
                          options: Optional[SynthesisOptions] = None,
                          kind: str = 'exact') -> List[SynthesisResult]:
    """
    스텝 1..n 합성 결과 목록

    sequential: 이전 스텝 각도로 워밍 스타트.
    parallel: 1스텝 각도의 n배에서 출발, 스텝별 시드(seed + n)로 스레드 풀 실행.
    수렴 실패 스텝은 converged=False로 표시하고 궤적은 계속한다.
    """
    opts = options or SynthesisOptions()
    if n_steps <= 0:
        return []
    family = _eligible_family(spec)
    template = constant_depth_template(spec.n_spins, family)
    targets = trajectory_targets(spec, dt, n_steps, opts, kind)

    logger.info(f"🚀 궤적 합성 시작: {family.code}, N={spec.n_spins}, "
                f"{n_steps} 스텝, 모드={opts.mode}")

    first = _flagged_fit(1, targets[0], template, opts, None)
    results = [first]

    if opts.mode == 'parallel' and n_steps > 1:
        def job(step: int) -> SynthesisResult:
            return _flagged_fit(step, targets[step - 1], template, opts, step * first.angles)

        with ThreadPoolExecutor(max_workers=max(1, opts.jobs)) as pool:
            results.extend(pool.map(job, range(2, n_steps + 1)))
    else:
        for step in range(2, n_steps + 1):
            results.append(_flagged_fit(step, targets[step - 1], template, opts,
                                        results[-1].angles))

    for r in results:
        logger.debug(f"스텝 {r.step}: cost={r.cost:.3e}, restarts={r.restarts_used}")
    flagged = sum(not r.converged for r in results)
    logger.info(f"✅ 궤적 합성 완료: {n_steps - flagged}/{n_steps} 스텝 수렴")
    return results

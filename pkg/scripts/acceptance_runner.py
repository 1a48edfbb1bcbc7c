#!/usr/bin/env python3
"""
🧪 Auto-CDC 수용 기준 실행기

수용 기준을 지정한 규모로 실행하고 JSON 요약을 남긴다:
- CNOT 개수 고정성 (N=3,4,5, 1스텝 / 50스텝 컴파일 QASM의 cx 줄 수)
- 적합성 표 커버리지 (적합 18칸, 부적합 10칸)
- 적합 18칸 전체 1스텝 합성 비용
- 성질 검증 배터리 (lemma1, conjecture, mirror, downfold, appendixA)
- 퀜치 엔진 일치 (TFIM / XY, constantDepth vs exactReference)
- 1차 트로터 오차 비율

사용법:
  python scripts/acceptance_runner.py --scale quick
  python scripts/acceptance_runner.py --scale full --output acceptance.json
"""

import argparse
import json
import logging
import sys
import time
from datetime import datetime
from pathlib import Path

import numpy as np

# 프로젝트 루트 경로 추가
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from modules import (ConfigManager, DriveSpec, FieldSpec, ModelSpec, QuenchConfig,  # noqa: E402
                     cell_model, classify, constant_depth_template, eligible_cells, emit_qasm,
                     run_quench, run_suite)
from modules.errors import NonConvergenceError  # noqa: E402
from modules.quench import (TFIM_DT, XY_DT, Engine, Protocol, tfim_spec,  # noqa: E402
                            trotter_error_series, xy_spec)
from modules.synth import TargetSpec, synthesize  # noqa: E402

# 규모별 시행 수
SCALES = {
    'quick': {'lemma1': 100, 'conjecture': 2, 'mirror': 2, 'downfold': 3, 'appendixA': 10,
              'quench_sizes': [3], 'quench_steps': 10, 'cnot_sizes': [3], 'cell_sizes': [3]},
    'full': {'lemma1': 1000, 'conjecture': 100, 'mirror': 20, 'downfold': 8, 'appendixA': 100,
             'quench_sizes': [3, 4, 5], 'quench_steps': 40, 'cnot_sizes': [3, 4, 5],
             'cell_sizes': [3, 4, 5]},
}
QUENCH_TOL = 1e-4
CNOT_STEPS = (1, 50)
CELL_DT = 1.0
TROTTER_RATIO_RANGE = (1.7, 2.3)


class AcceptanceRunner:
    """수용 기준 실행 및 결과 집계"""

    def __init__(self, scale: str = 'quick', seed: int = 0, config_path=None):
        self.scale = SCALES[scale]
        self.scale_name = scale
        self.seed = seed
        self.options = ConfigManager(config_path).synthesis_options().with_overrides(seed=seed)
        self.results = {}

    def _record(self, name: str, passed: bool, **details):
        self.results[name] = {'passed': bool(passed), **details}
        icon = '✅' if passed else '❌'
        logging.info(f"{icon} {name}: {details}")

    def _compile(self, spec, dt: float, step: int):
        template = constant_depth_template(spec.n_spins, classify(spec).family)
        try:
            result = synthesize(TargetSpec(spec, dt, step), template, self.options)
        except NonConvergenceError as e:
            result = e.best
        return template, result

    def check_cnot_counts(self):
        """N(N-1) CNOT: 1스텝과 50스텝 컴파일 QASM의 cx 줄 수가 같음"""
        counts = {}
        for n in self.scale['cnot_sizes']:
            for spec, dt in ((xy_spec(n), XY_DT), (tfim_spec(n), TFIM_DT)):
                for step in CNOT_STEPS:
                    template, result = self._compile(spec, dt, step)
                    qasm = emit_qasm(template.instantiate(result.angles).decomposed())
                    cx = sum(line.startswith('cx ') for line in qasm.splitlines())
                    counts[f"N{n}_{template.family.code}_step{step}"] = cx
        passed = all(count == int(key[1]) * (int(key[1]) - 1) for key, count in counts.items())
        self._record('cnot_count', passed, counts=counts)

    def check_eligibility_table(self):
        """4행 × 7열 적합성 표"""
        couplings = ['x', 'y', 'z', 'xy', 'xz', 'yz', 'xyz']
        eligible = ineligible = 0
        for field_axis in (None, 'x', 'y', 'z'):
            for axes in couplings:
                spec = ModelSpec(3, **{f"j{a}": 0.3 for a in axes},
                                 field=FieldSpec(field_axis, DriveSpec.constant(0.2)) if field_axis else None)
                if classify(spec).eligible:
                    eligible += 1
                else:
                    ineligible += 1
        self._record('eligibility_table', (eligible, ineligible) == (18, 10),
                     eligible=eligible, ineligible=ineligible)

    def check_single_step_synthesis(self):
        """적합 18칸 전체: 1스텝 합성 비용 ≤ tol"""
        costs = {}
        for n in self.scale['cell_sizes']:
            for field_axis, axes, family in eligible_cells():
                spec = cell_model(n, field_axis, axes)
                try:
                    cost = synthesize(TargetSpec(spec, CELL_DT, 1),
                                      constant_depth_template(n, family), self.options).cost
                except NonConvergenceError as e:
                    cost = e.cost
                costs[f"N{n}_{field_axis or 'none'}_{axes}_{family.code}"] = cost
        self._record('single_step_synthesis', all(c <= self.options.tol for c in costs.values()),
                     max_cost=max(costs.values()), cells=len(costs),
                     failures=[k for k, c in costs.items() if c > self.options.tol])

    def check_suites(self):
        for suite in ('lemma1', 'conjecture', 'mirror', 'downfold', 'appendixA'):
            started = time.time()
            report = run_suite(suite, self.scale[suite], self.seed, self.options)
            self._record(f"suite_{suite}", report.ok, trials=report.trials, passed_trials=report.passed,
                         max_residual=report.max_residual, failures=report.failures,
                         elapsed_s=round(time.time() - started, 1))

    def check_quench_agreement(self):
        deltas = {}
        for protocol, dt in ((Protocol.TFIM, TFIM_DT), (Protocol.XY, XY_DT)):
            for n in self.scale['quench_sizes']:
                steps = self.scale['quench_steps']
                exact = run_quench(QuenchConfig(protocol, n, dt, n_steps=steps), self.options)
                cd = run_quench(QuenchConfig(protocol, n, dt, n_steps=steps,
                                             engine=Engine.CONSTANT_DEPTH), self.options)
                deltas[f"{protocol.value}_N{n}"] = float(np.max(np.abs(exact.values - cd.values)))
        self._record('quench_agreement', all(d <= QUENCH_TOL for d in deltas.values()), max_delta=deltas)

    def check_trotter_order(self):
        spec = ModelSpec(3, jx=0.1, jz=0.07)
        errors = trotter_error_series(spec, 0.8, [0.4, 0.2, 0.1, 0.05])
        ratios = [a / b for a, b in zip(errors, errors[1:])]
        low, high = TROTTER_RATIO_RANGE
        self._record('trotter_order', all(low <= r <= high for r in ratios), errors=errors, ratios=ratios)

    def run(self) -> dict:
        logging.info(f"🚀 수용 기준 실행 시작 (규모: {self.scale_name}, 시드: {self.seed})")
        self.check_cnot_counts()
        self.check_eligibility_table()
        self.check_single_step_synthesis()
        self.check_suites()
        self.check_quench_agreement()
        self.check_trotter_order()
        passed = sum(r['passed'] for r in self.results.values())
        logging.info(f"📊 {passed}/{len(self.results)} 기준 통과")
        return {
            'scale': self.scale_name,
            'seed': self.seed,
            'finished_at': datetime.now().isoformat(),
            'passed': passed == len(self.results),
            'criteria': self.results,
        }


def main():
    parser = argparse.ArgumentParser(description='Auto-CDC acceptance runner')
    parser.add_argument('--scale', choices=list(SCALES), default='quick')
    parser.add_argument('--seed', type=int, default=0)
    parser.add_argument('--config', default=None, help='합성 옵션 설정 파일')
    parser.add_argument('--output', default='acceptance_summary.json')
    args = parser.parse_args()

    logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
    summary = AcceptanceRunner(args.scale, args.seed, args.config).run()
    with open(args.output, 'w', encoding='utf-8') as f:
        json.dump(summary, f, indent=2, ensure_ascii=False)
    print(f"📁 요약 저장: {args.output}")
    return 0 if summary['passed'] else 1


if __name__ == "__main__":
    sys.exit(main())

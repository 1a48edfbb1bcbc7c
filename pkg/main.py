#!/usr/bin/env python3
"""
🚀 Auto-CDC - 상수 깊이 매치게이트 회로 컴파일러
1차원 스핀 모델 시간 발전을 N(N-1) CNOT 고정 깊이 회로로 컴파일

주요 기능:
- 상수 깊이 적합성 판정 (classify)
- 스텝별 회로 합성 및 OpenQASM 출력 (compile)
- TFIM / XY 퀜치 시뮬레이션 (quench)
- 매치게이트 성질 검증 배터리 (verify)

사용법:
  python main.py classify configs/tfim.yaml
  python main.py compile configs/xy.yaml --steps 5 --out out/xy
  python main.py quench configs/tfim.yaml --engine constantDepth
  python main.py verify --suite lemma1 --trials 1000
  python main.py init-config config.yaml
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from modules import (
    ConfigManager,
    ConfigParseError,
    CompilerError,
    Engine,
    IneligibleForDownfoldError,
    IneligibleModelError,
    NonConvergenceError,
    classify,
    constant_depth_template,
    create_default_config,
    run_quench,
    run_suite,
    synthesize_trajectory,
    write_frame_csv,
    write_qasm,
    write_synthesis_report,
)
from modules.quench import comparison_frame
from modules.verification import SUITES

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INELIGIBLE = 2
EXIT_NONCONVERGENCE = 3


class CliArgumentParser(argparse.ArgumentParser):
    """사용법 오류를 종료 코드 1로 처리하는 파서"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def setup_logging(level: str = 'INFO', log_file: Optional[str] = None):
    """로깅 설정"""
    handlers: List[logging.Handler] = [logging.StreamHandler()]
    if log_file:
        handlers.append(logging.FileHandler(log_file, encoding='utf-8'))
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


def cmd_classify(args) -> int:
    config = ConfigManager(args.config)
    verdict = classify(config.model_spec())
    if verdict.eligible:
        print(f"eligible, family {verdict.label} [{verdict.family.code}] "
              f"(eligibility table: {verdict.cell})")
        return EXIT_OK
    print(f"ineligible: {verdict.reason} (eligibility table: {verdict.cell})")
    return EXIT_INELIGIBLE


def _synthesis_options(config: ConfigManager, jobs: Optional[int]):
    options = config.synthesis_options()
    if jobs is not None:
        options = options.with_overrides(jobs=jobs, mode='parallel' if jobs > 1 else options.mode)
    return options


def cmd_compile(args) -> int:
    config = ConfigManager(args.config)
    spec = config.model_spec()
    options = _synthesis_options(config, args.jobs)
    steps = config.run_steps(args.steps)
    dt = config.run_dt()
    target = config.run_target()
    out_dir = config.output_dir(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    verdict = classify(spec)
    if not verdict.eligible:
        raise IneligibleModelError(f"상수 깊이 대상이 아님: {verdict.reason}")

    results = synthesize_trajectory(spec, dt, steps, options, kind=target)
    template = constant_depth_template(spec.n_spins, verdict.family)
    formats = config.output_formats()
    if 'qasm' in formats:
        for result in results:
            circuit = template.instantiate(result.angles).decomposed()
            write_qasm(circuit, out_dir / f"step_{result.step}.qasm")
    if 'jsonl' in formats:
        write_synthesis_report(results, out_dir / 'synthesis.jsonl',
                               bool(config.get('output.include_timing', False)))

    flagged = [r.step for r in results if not r.converged]
    print(f"📁 {len(results)}개 스텝 컴파일 완료 → {out_dir}")
    if flagged:
        logging.error(f"❌ 수렴 실패 스텝: {flagged}")
        return EXIT_NONCONVERGENCE
    return EXIT_OK


def cmd_quench(args) -> int:
    config = ConfigManager(args.config)
    options = _synthesis_options(config, args.jobs)
    cfg = config.quench_config(engine=args.engine, steps=args.steps)
    out_dir = config.output_dir(args.out)

    write_csv = 'csv' in config.output_formats()

    series = run_quench(cfg, options)
    if write_csv:
        write_frame_csv(series.to_frame(), out_dir / f"quench_{cfg.engine.value}.csv")

    if cfg.engine is Engine.CONSTANT_DEPTH:
        reference = run_quench(config.quench_config(engine=Engine.EXACT.value, steps=args.steps),
                               options)
        frame = comparison_frame(series, reference)
        if write_csv:
            write_frame_csv(frame, out_dir / 'quench_comparison.csv')
        print(f"📊 최대 |Δ| (기준 대비): {frame['abs_delta'].max():.3e}")

    print(f"✅ 퀜치 완료: {len(series.rows)} 행 → {out_dir}")
    if series.flagged:
        logging.error(f"❌ 수렴 실패로 표시된 스텝 {series.flagged}개")
        return EXIT_NONCONVERGENCE
    return EXIT_OK


def cmd_verify(args) -> int:
    config = ConfigManager(args.config)
    options = config.synthesis_options().with_overrides(seed=args.seed)
    report = run_suite(args.suite, args.trials, args.seed, options)
    print(report.summary())

    if report.failures:
        out_dir = config.output_dir(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        dump = out_dir / f"verify_{args.suite}_failures.json"
        with open(dump, 'w', encoding='utf-8') as f:
            json.dump(report.failures, f, indent=2, sort_keys=True, ensure_ascii=False)
        logging.error(f"❌ 실패 {report.failed}건, 재현 정보 저장: {dump}")
        return EXIT_NONCONVERGENCE
    return EXIT_OK


def cmd_init_config(args) -> int:
    path = create_default_config(args.path)
    print(f"✅ 기본 설정 파일 생성: {path}")
    return EXIT_OK


def build_parser() -> CliArgumentParser:
    parser = CliArgumentParser(prog='auto-cdc',
                               description='Auto-CDC constant-depth circuit compiler')
    parser.add_argument('--log-level', default='INFO', help='로그 레벨 (DEBUG, INFO, ...)')
    parser.add_argument('--log-file', default=None, help='로그 파일 경로')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('classify', help='상수 깊이 적합성 판정')
    p.add_argument('config')
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser('compile', help='스텝별 상수 깊이 회로 컴파일')
    p.add_argument('config')
    p.add_argument('--steps', type=int, default=None, help='스텝 수 (기본: run.steps)')
    p.add_argument('--out', default=None, help='출력 디렉토리')
    p.add_argument('--jobs', type=int, default=None, help='병렬 작업 수')
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser('quench', help='퀜치 시뮬레이션')
    p.add_argument('config')
    p.add_argument('--engine', default=None,
                   help=f"엔진 ({', '.join(e.value for e in Engine)})")
    p.add_argument('--steps', type=int, default=None, help='스텝 수 (기본: run.steps)')
    p.add_argument('--out', default=None, help='출력 디렉토리')
    p.add_argument('--jobs', type=int, default=None, help='병렬 작업 수')
    p.set_defaults(func=cmd_quench)

    p = sub.add_parser('verify', help='성질 검증 배터리')
    p.add_argument('--suite', required=True, choices=list(SUITES))
    p.add_argument('--trials', type=int, default=10)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--config', default=None, help='합성 옵션을 읽을 설정 파일')
    p.add_argument('--out', default=None, help='실패 재현 정보 출력 디렉토리')
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser('init-config', help='기본 설정 파일 생성')
    p.add_argument('path')
    p.set_defaults(func=cmd_init_config)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """메인 함수"""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level, args.log_file)

    for name in ('steps', 'trials', 'jobs', 'seed'):
        value = getattr(args, name, None)
        if value is not None and value < (1 if name in ('trials', 'jobs') else 0):
            parser.error(f"--{name} 값이 올바르지 않음: {value}")

    try:
        return args.func(args)
    except ConfigParseError as e:
        logging.error(f"❌ 설정 오류: {e}")
        return EXIT_USAGE
    except (IneligibleModelError, IneligibleForDownfoldError) as e:
        logging.error(f"❌ {e}")
        return EXIT_INELIGIBLE
    except NonConvergenceError as e:
        logging.error(f"❌ {e}")
        return EXIT_NONCONVERGENCE
    except CompilerError as e:
        logging.error(f"❌ 실행 오류: {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

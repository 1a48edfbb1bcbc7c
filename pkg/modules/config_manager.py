"""
설정 관리 모듈
"""

import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from .errors import ConfigParseError
from .hamiltonian import HBAR_EV_FS, DriveSpec, FieldSpec, ModelSpec
from .quench import DEFAULT_STEPS, Engine, Protocol, QuenchConfig
from .synth import SynthesisOptions

OUTPUT_DIR_ENV = 'AUTO_CDC_OUTPUT_DIR'
DEFAULT_OUTPUT_DIR = 'out'
ENERGY_SCALE = {'eV': 1.0, 'meV': 1e-3}
OUTPUT_FORMATS = {'csv', 'jsonl', 'qasm'}
TARGET_KINDS = ('exact', 'trotterized')
SAMPLING_RULES = ('left', 'midpoint')

# 섹션별 허용 키
SCHEMA: Dict[str, set] = {
    'model': {'jx', 'jy', 'jz', 'energy_unit', 'field'},
    'initial_model': {'jx', 'jy', 'jz', 'energy_unit', 'field'},
    'run': {'protocol', 'n_spins', 'dt', 'steps', 'engine', 'seed', 'sampling', 'target',
            'hbar', 'max_qubits', 'jobs', 'mode', 'observable'},
    'synthesis': {'tol', 'max_restarts', 'max_iter', 'fd_step', 'gtol'},
    'output': {'directory', 'formats', 'include_timing'},
}
FIELD_KEYS = {'axis', 'drive'}
DRIVE_KEYS = {'kind', 'h0', 'omega', 'times', 'values'}

DEFAULT_CONFIG: Dict[str, Any] = {
    'model': {
        'energy_unit': 'meV',
        'jx': 11.83898,
        'jy': 0.0,
        'jz': 0.0,
        'field': {
            'axis': 'z',
            'drive': {'kind': 'cosine', 'h0': 23.67796, 'omega': 0.0048},
        },
    },
    'run': {
        'protocol': 'tfim',
        'n_spins': 3,
        'dt': 3.0,
        'steps': DEFAULT_STEPS,
        'engine': 'exactReference',
        'seed': 0,
        'sampling': 'left',
        'target': 'exact',
        'hbar': HBAR_EV_FS,
        'max_qubits': 7,
        'jobs': 1,
        'mode': 'sequential',
    },
    'synthesis': {
        'tol': 1.0e-9,
        'max_restarts': 32,
        'max_iter': 2000,
        'fd_step': 1.0e-7,
        'gtol': 1.0e-10,
    },
    'output': {
        'formats': ['csv', 'jsonl', 'qasm'],
        'include_timing': False,
    },
}


def _check_keys(section: str, block: Any, allowed: set):
    if not isinstance(block, dict):
        raise ConfigParseError(f"'{section}' 섹션은 매핑이어야 함")
    unknown = set(block) - allowed
    if unknown:
        raise ConfigParseError(f"'{section}'의 알 수 없는 키: {sorted(unknown)}")


class ConfigManager:
    """설정 관리 클래스 - YAML 설정 로드, 검증, 타입 객체 생성"""

    def __init__(self, config_path: Optional[str] = None):
        self.config_path = config_path
        self.config: Dict[str, Any] = {}
        self.load_config()

    def load_config(self):
        """설정 파일 로드 (경로가 없으면 기본 설정)"""
        if self.config_path is None:
            self.config = yaml.safe_load(yaml.safe_dump(DEFAULT_CONFIG))
            return
        try:
            with open(self.config_path, 'r', encoding='UTF-8') as f:
                loaded = yaml.safe_load(f)
        except (OSError, yaml.YAMLError) as e:
            raise ConfigParseError(f"설정 로드 실패: {self.config_path}: {e}") from e

        if not isinstance(loaded, dict):
            raise ConfigParseError(f"설정 최상위는 매핑이어야 함: {self.config_path}")
        self.config = loaded
        self.validate()
        logging.info(f"설정 로드 완료: {self.config_path}")

    def validate(self):
        """알 수 없는 섹션/키 거부"""
        unknown = set(self.config) - set(SCHEMA)
        if unknown:
            raise ConfigParseError(f"알 수 없는 섹션: {sorted(unknown)}")
        for section, block in self.config.items():
            _check_keys(section, block, SCHEMA[section])
            if section in ('model', 'initial_model') and block.get('field') is not None:
                _check_keys(f"{section}.field", block['field'], FIELD_KEYS)
                _check_keys(f"{section}.field.drive", block['field'].get('drive', {}), DRIVE_KEYS)

    def get(self, key_path: str, default=None):
        """점 표기법으로 설정값 가져오기"""
        keys = key_path.split('.')
        value = self.config

        for key in keys:
            if isinstance(value, dict) and key in value:
                value = value[key]
            else:
                return default

        return value

    def _number(self, key_path: str, default, kind=float):
        value = self.get(key_path, default)
        try:
            return kind(value)
        except (TypeError, ValueError) as e:
            raise ConfigParseError(f"'{key_path}' 값이 {kind.__name__}이 아님: {value!r}") from e

    def _choice(self, key_path: str, default: str, allowed) -> str:
        value = str(self.get(key_path, default))
        if value not in allowed:
            raise ConfigParseError(f"'{key_path}' 값은 {list(allowed)} 중 하나여야 함: {value!r}")
        return value

    def run_dt(self) -> float:
        dt = self._number('run.dt', 1.0)
        if not dt > 0:
            raise ConfigParseError(f"'run.dt'는 양수여야 함: {dt}")
        return dt

    def run_steps(self, override: Optional[int] = None) -> int:
        steps = override if override is not None else self._number('run.steps', DEFAULT_STEPS, int)
        if steps < 0:
            raise ConfigParseError(f"스텝 수는 0 이상이어야 함: {steps}")
        return steps

    def run_target(self) -> str:
        return self._choice('run.target', 'exact', TARGET_KINDS)

    def _model_from_block(self, section: str) -> ModelSpec:
        block = self.get(section)
        if block is None:
            raise ConfigParseError(f"'{section}' 섹션이 없음")
        unit = block.get('energy_unit', 'eV')
        if unit not in ENERGY_SCALE:
            raise ConfigParseError(f"알 수 없는 에너지 단위: {unit}")
        scale = ENERGY_SCALE[unit]

        field = None
        if block.get('field') is not None:
            drive = block['field'].get('drive', {})
            try:
                field = FieldSpec(
                    axis=str(block['field'].get('axis')),
                    drive=DriveSpec(
                        kind=drive.get('kind', 'constant'),
                        h0=float(drive.get('h0', 0.0)) * scale,
                        omega=float(drive.get('omega', 0.0)),
                        times=tuple(drive.get('times', ())),
                        values=tuple(float(v) * scale for v in drive.get('values', ())),
                    ))
            except (TypeError, ValueError) as e:
                raise ConfigParseError(f"'{section}.field' 설정 오류: {e}") from e

        try:
            return ModelSpec(
                n_spins=self._number('run.n_spins', 2, int),
                jx=self._number(f'{section}.jx', 0.0) * scale,
                jy=self._number(f'{section}.jy', 0.0) * scale,
                jz=self._number(f'{section}.jz', 0.0) * scale,
                field=field,
            )
        except ValueError as e:
            raise ConfigParseError(f"'{section}' 설정 오류: {e}") from e

    def model_spec(self) -> ModelSpec:
        return self._model_from_block('model')

    def synthesis_options(self) -> SynthesisOptions:
        try:
            return SynthesisOptions(
                tol=self._number('synthesis.tol', 1e-9),
                max_restarts=self._number('synthesis.max_restarts', 32, int),
                max_iter=self._number('synthesis.max_iter', 2000, int),
                fd_step=self._number('synthesis.fd_step', 1e-7),
                gtol=self._number('synthesis.gtol', 1e-10),
                seed=self._number('run.seed', 0, int),
                hbar=self._number('run.hbar', HBAR_EV_FS),
                sampling=self._choice('run.sampling', 'left', SAMPLING_RULES),
                max_qubits=self._number('run.max_qubits', 7, int),
                jobs=self._number('run.jobs', 1, int),
                mode=str(self.get('run.mode', 'sequential')),
            )
        except ValueError as e:
            raise ConfigParseError(f"합성 옵션 오류: {e}") from e

    def quench_config(self, engine: Optional[str] = None, steps: Optional[int] = None) -> QuenchConfig:
        protocol = str(self.get('run.protocol', 'custom'))
        if protocol not in {p.value for p in Protocol}:
            raise ConfigParseError(f"알 수 없는 프로토콜: {protocol}")
        try:
            return QuenchConfig(
                protocol=Protocol(protocol),
                n_spins=self._number('run.n_spins', 2, int),
                dt=self.run_dt(),
                n_steps=self.run_steps(steps),
                engine=Engine.parse(engine or str(self.get('run.engine', 'exactReference'))),
                seed=self._number('run.seed', 0, int),
                model=self.model_spec() if self.get('model') is not None else None,
                initial_model=(self._model_from_block('initial_model')
                               if self.get('initial_model') is not None else None),
                observable=self.get('run.observable'),
            )
        except ValueError as e:
            raise ConfigParseError(f"퀜치 설정 오류: {e}") from e

    def output_dir(self, override: Optional[str] = None) -> Path:
        """--out > 설정 파일 > 환경 변수 > 기본값 순"""
        directory = override or self.get('output.directory') \
            or os.environ.get(OUTPUT_DIR_ENV) or DEFAULT_OUTPUT_DIR
        return Path(directory)

    def output_formats(self) -> set:
        formats = self.get('output.formats', ['csv', 'jsonl', 'qasm'])
        unknown = set(formats) - OUTPUT_FORMATS
        if unknown:
            raise ConfigParseError(f"알 수 없는 출력 형식: {sorted(unknown)}")
        return set(formats)


def create_default_config(config_path: str) -> Path:
    """기본 설정 파일 생성"""
    path = Path(config_path)
    with open(path, 'w', encoding='UTF-8') as f:
        yaml.dump(DEFAULT_CONFIG, f, allow_unicode=True, indent=2, sort_keys=False)
    logging.info(f"기본 설정 파일 생성: {path}")
    return path

"""
결과 파일 출력 모듈 (OpenQASM 2.0, CSV, JSON-lines)
"""

import json
import logging
from pathlib import Path
from typing import Iterable, Union

import pandas as pd

from .circuit import Circuit
from .errors import UndecomposedGateError
from .synth import SynthesisResult

CSV_FLOAT_FORMAT = '%.12g'

PathLike = Union[str, Path]


def _angle(theta: float) -> str:
    # 최단 왕복 표현 (최대 17 유효숫자)
    return repr(float(theta))


def emit_qasm(circuit: Circuit) -> str:
    """네이티브 게이트로 분해된 회로를 OpenQASM 2.0 텍스트로 변환"""
    lines = [
        'OPENQASM 2.0;',
        'include "qelib1.inc";',
        '// qubit k -> q[k]; q[0] is the most significant bit of the statevector index',
        f'qreg q[{circuit.n_qubits}];',
    ]
    for p in circuit.placements:
        if p.is_g_gate:
            raise UndecomposedGateError(
                f"분해되지 않은 G 게이트: {p.gate.family.code} @ site {p.site}")
        gate, qubits = p.gate, p.qubits
        if gate.kind == 'cx':
            lines.append(f'cx q[{qubits[0]}],q[{qubits[1]}];')
        else:
            lines.append(f'{gate.kind}({_angle(gate.angle)}) q[{qubits[0]}];')
    return '\n'.join(lines) + '\n'


def write_qasm(circuit: Circuit, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(emit_qasm(circuit), encoding='utf-8')
    return path


def write_frame_csv(frame: pd.DataFrame, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')
    logging.info(f"📁 CSV 저장: {path}")
    return path


def write_synthesis_report(results: Iterable[SynthesisResult], path: PathLike,
                           include_timing: bool = False) -> Path:
    """스텝별 합성 결과를 JSON-lines로 저장 (기본적으로 실행 시간 제외)"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        for result in results:
            f.write(json.dumps(result.to_record(include_timing), sort_keys=True) + '\n')
    logging.info(f"📁 합성 리포트 저장: {path}")
    return path

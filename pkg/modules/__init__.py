"""
Auto-CDC 상수 깊이 매치게이트 회로 컴파일러 모듈
"""

from .errors import (CompilerError, ConfigParseError, IneligibleForDownfoldError,
                     IneligibleModelError, NonConvergenceError, UnknownSuiteError)
from .matchgate import FamilyTag, GGate, MatchgateBlocks, NativeGate
from .hamiltonian import (DriveSpec, FieldSpec, ModelSpec, Eligibility, cell_model, classify,
                          eligible_cells)
from .circuit import Circuit, GatePlacement, Template, constant_depth_template, naive_circuit
from .synth import SynthesisOptions, SynthesisResult, synthesize, synthesize_trajectory
from .mirror import MirrorSolution, downfold, mirror_block, mirror_plan, solve_vee_hat
from .quench import Engine, Protocol, QuenchConfig, TimeSeries, run_quench
from .exporters import emit_qasm, write_frame_csv, write_qasm, write_synthesis_report
from .verification import SuiteReport, run_suite
from .config_manager import ConfigManager, create_default_config

__all__ = [
    'CompilerError',
    'ConfigParseError',
    'IneligibleForDownfoldError',
    'IneligibleModelError',
    'NonConvergenceError',
    'UnknownSuiteError',
    'FamilyTag',
    'GGate',
    'MatchgateBlocks',
    'NativeGate',
    'DriveSpec',
    'FieldSpec',
    'ModelSpec',
    'Eligibility',
    'classify',
    'eligible_cells',
    'cell_model',
    'Circuit',
    'GatePlacement',
    'Template',
    'constant_depth_template',
    'naive_circuit',
    'SynthesisOptions',
    'SynthesisResult',
    'synthesize',
    'synthesize_trajectory',
    'MirrorSolution',
    'downfold',
    'mirror_block',
    'mirror_plan',
    'solve_vee_hat',
    'Engine',
    'Protocol',
    'QuenchConfig',
    'TimeSeries',
    'run_quench',
    'emit_qasm',
    'write_frame_csv',
    'write_qasm',
    'write_synthesis_report',
    'SuiteReport',
    'run_suite',
    'ConfigManager',
    'create_default_config',
]

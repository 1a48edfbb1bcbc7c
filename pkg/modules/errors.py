"""
컴파일러 예외 정의 모듈
"""

from typing import Any, Optional


class CompilerError(Exception):
    """Auto-CDC 공통 예외"""


class NotHermitianError(CompilerError, ValueError):
    """에르미트 행렬이 아님"""


class DimMismatchError(CompilerError, ValueError):
    """행렬/게이트 차원 불일치"""


class IndexOutOfRangeError(CompilerError, IndexError):
    """큐비트 인덱스 범위 초과"""


class SizeCapExceededError(CompilerError, ValueError):
    """밀집 행렬 크기 상한 초과"""


class ArityMismatchError(CompilerError, ValueError):
    """게이트 패밀리와 각도 개수 불일치"""


class FamilyMismatchError(CompilerError, ValueError):
    """게이트 패밀리 불일치"""


class IneligibleModelError(CompilerError, ValueError):
    """상수 깊이 회로 대상이 아닌 모델"""


class IneligibleForDownfoldError(CompilerError, ValueError):
    """다운폴딩 불가 회로 (x/y 필드 등)"""


class UndecomposedGateError(CompilerError, ValueError):
    """네이티브 게이트로 분해되지 않은 G 게이트가 남아 있음"""


class ConfigParseError(CompilerError, ValueError):
    """설정 파일 파싱 실패"""


class UnknownSuiteError(CompilerError, ValueError):
    """알 수 없는 검증 스위트"""


class NonConvergenceError(CompilerError, RuntimeError):
    """최적화 수렴 실패 - 최선의 결과를 함께 전달"""

    def __init__(self, message: str, best: Optional[Any] = None,
                 cost: Optional[float] = None):
        super().__init__(message)
        self.best = best
        self.cost = cost

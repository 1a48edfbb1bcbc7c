#!/usr/bin/env python3
"""
🔍 산출물 결정성 체크 도구
같은 명령을 두 번 실행해 출력 파일 해시를 비교

사용법:
  python scripts/determinism_check.py compile configs/xy.yaml --steps 3
  python scripts/determinism_check.py quench configs/tfim.yaml --engine constantDepth --steps 5
"""

import hashlib
import sys
import tempfile
from pathlib import Path
from typing import Dict, List

# 프로젝트 루트 경로 추가
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from main import main as cli_main  # noqa: E402


def artifact_hashes(directory: Path) -> Dict[str, str]:
    """디렉토리 내 파일별 sha256"""
    return {
        str(path.relative_to(directory)): hashlib.sha256(path.read_bytes()).hexdigest()
        for path in sorted(directory.rglob('*')) if path.is_file()
    }


def check_determinism(command: List[str]) -> bool:
    """명령을 두 번 실행해 산출물 비교"""
    print(f"🔍 결정성 체크 시작: {' '.join(command)}")
    runs = []
    with tempfile.TemporaryDirectory() as tmp:
        for i in range(2):
            out = Path(tmp) / f"run_{i}"
            code = cli_main(command + ['--out', str(out)])
            print(f"  실행 {i + 1}: 종료 코드 {code}")
            runs.append((code, artifact_hashes(out) if out.exists() else {}))

    (code_a, first), (code_b, second) = runs
    if code_a != code_b:
        print(f"❌ 종료 코드 불일치: {code_a} vs {code_b}")
        return False
    if not first:
        print("⚠️  산출물 없음")
        return code_a == 0

    mismatched = sorted(name for name in set(first) | set(second) if first.get(name) != second.get(name))
    if mismatched:
        for name in mismatched:
            print(f"❌ 불일치: {name}")
        return False

    print(f"✅ 산출물 {len(first)}개 바이트 단위 일치")
    return True


if __name__ == "__main__":
    if len(sys.argv) < 2:
        print(__doc__)
        sys.exit(1)
    sys.exit(0 if check_determinism(sys.argv[1:]) else 1)

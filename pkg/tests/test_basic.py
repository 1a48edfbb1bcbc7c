# 🧪 Auto-CDC 명령줄 기본 테스트
# main()을 직접 호출해 종료 코드와 출력 파일 확인

import json
import os
import sys

import pandas as pd
import pytest

# 프로젝트 루트를 Python 경로에 추가
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from main import EXIT_INELIGIBLE, EXIT_OK, EXIT_USAGE, main  # noqa: E402

CONFIG_DIR = os.path.join(os.path.dirname(__file__), '..', 'configs')
TFIM = os.path.join(CONFIG_DIR, 'tfim.yaml')
XY = os.path.join(CONFIG_DIR, 'xy.yaml')


def write_config(tmp_path, text, name='model.yaml'):
    path = tmp_path / name
    path.write_text(text, encoding='utf-8')
    return str(path)


class TestClassifyCommand:
    """classify 명령 테스트"""

    def test_tfim_eligible(self, capsys):
        assert main(['classify', TFIM]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.startswith('eligible, family XX+hz [F10]')
        assert 'eligibility table' in out

    def test_heisenberg_ineligible(self, tmp_path, capsys):
        path = write_config(tmp_path, "model:\n  jx: 1.0\n  jy: 1.0\n  jz: 1.0\nrun:\n  n_spins: 3\n")
        assert main(['classify', path]) == EXIT_INELIGIBLE
        assert capsys.readouterr().out.startswith('ineligible:')

    def test_malformed_config(self, tmp_path):
        path = write_config(tmp_path, "model:\n  jx: 1.0\n  bogus: 1\n")
        assert main(['classify', path]) == EXIT_USAGE

    def test_missing_config(self, tmp_path):
        assert main(['classify', str(tmp_path / 'none.yaml')]) == EXIT_USAGE


class TestCompileCommand:
    """compile 명령 테스트"""

    def test_xy_two_steps(self, tmp_path):
        out = tmp_path / 'xy'
        assert main(['compile', XY, '--steps', '2', '--out', str(out)]) == EXIT_OK
        for step in (1, 2):
            text = (out / f'step_{step}.qasm').read_text(encoding='utf-8')
            assert text.startswith('OPENQASM 2.0;')
            assert text.count('cx ') == 6
        records = [json.loads(line) for line in
                   (out / 'synthesis.jsonl').read_text(encoding='utf-8').splitlines()]
        assert [r['step'] for r in records] == [1, 2]
        assert all(r['converged'] for r in records)

    def test_zero_steps(self, tmp_path):
        out = tmp_path / 'empty'
        assert main(['compile', XY, '--steps', '0', '--out', str(out)]) == EXIT_OK
        assert (out / 'synthesis.jsonl').read_text(encoding='utf-8') == ''
        assert not list(out.glob('step_*.qasm'))

    def test_ineligible_model(self, tmp_path):
        path = write_config(tmp_path, "model:\n  jx: 1.0\n  jy: 1.0\n  jz: 1.0\nrun:\n  n_spins: 3\n")
        assert main(['compile', path, '--steps', '1', '--out', str(tmp_path)]) == EXIT_INELIGIBLE

    def test_negative_steps(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(['compile', XY, '--steps', '-1', '--out', str(tmp_path)])
        assert exc.value.code == EXIT_USAGE

    @pytest.mark.parametrize('run_block', [
        "  target: approximate\n",
        "  sampling: right\n",
        "  dt: fast\n",
        "  dt: -0.5\n",
        "  steps: many\n",
    ])
    def test_invalid_run_values(self, tmp_path, run_block):
        path = write_config(tmp_path, "model:\n  jx: -1.0\n  jy: -1.0\nrun:\n  n_spins: 3\n" + run_block)
        assert main(['compile', path, '--out', str(tmp_path / 'out')]) == EXIT_USAGE

    def test_trotterized_target(self, tmp_path):
        path = write_config(tmp_path, "model:\n  jx: -1.0\n  jy: -1.0\n"
                                      "run:\n  n_spins: 3\n  dt: 0.025\n  target: trotterized\n")
        out = tmp_path / 'trot'
        assert main(['compile', path, '--steps', '2', '--out', str(out)]) == EXIT_OK
        assert len(list(out.glob('step_*.qasm'))) == 2


class TestQuenchCommand:
    """quench 명령 테스트"""

    def test_exact_xy(self, tmp_path):
        assert main(['quench', XY, '--steps', '4', '--out', str(tmp_path)]) == EXIT_OK
        frame = pd.read_csv(tmp_path / 'quench_exactReference.csv')
        assert len(frame) == 5
        assert frame['observable'].iloc[0] == pytest.approx(1.0)

    def test_constant_depth_writes_comparison(self, tmp_path):
        assert main(['quench', XY, '--engine', 'constantDepth', '--steps', '3',
                     '--out', str(tmp_path)]) == EXIT_OK
        frame = pd.read_csv(tmp_path / 'quench_comparison.csv')
        assert frame['abs_delta'].max() <= 1e-4

    def test_unknown_engine(self, tmp_path):
        assert main(['quench', XY, '--engine', 'magic', '--out', str(tmp_path)]) == EXIT_USAGE


class TestVerifyAndInit:
    """verify / init-config 명령 테스트"""

    def test_verify_lemma1(self, tmp_path, capsys):
        assert main(['verify', '--suite', 'lemma1', '--trials', '20', '--out', str(tmp_path)]) == EXIT_OK
        assert 'lemma1' in capsys.readouterr().out
        assert not list(tmp_path.glob('verify_*_failures.json'))

    def test_verify_unknown_suite(self):
        with pytest.raises(SystemExit) as exc:
            main(['verify', '--suite', 'nope'])
        assert exc.value.code == EXIT_USAGE

    def test_verify_zero_trials(self):
        with pytest.raises(SystemExit) as exc:
            main(['verify', '--suite', 'lemma1', '--trials', '0'])
        assert exc.value.code == EXIT_USAGE

    def test_init_config_round_trip(self, tmp_path, capsys):
        path = tmp_path / 'config.yaml'
        assert main(['init-config', str(path)]) == EXIT_OK
        assert path.exists()
        assert main(['classify', str(path)]) == EXIT_OK
        assert '[F10]' in capsys.readouterr().out

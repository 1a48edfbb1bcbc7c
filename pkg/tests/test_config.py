"""
Test configuration loading for the constant-depth compiler
"""
import os
import sys
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

import yaml

# Add project root to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from modules.config_manager import (DEFAULT_CONFIG, OUTPUT_DIR_ENV,  # noqa: E402
                                    ConfigManager, create_default_config)
from modules.errors import ConfigParseError  # noqa: E402
from modules.hamiltonian import classify  # noqa: E402
from modules.matchgate import FamilyTag  # noqa: E402
from modules.quench import Engine, Protocol  # noqa: E402

CONFIG_DIR = os.path.join(os.path.dirname(__file__), '..', 'configs')


class TestPresets(unittest.TestCase):
    """Test the bundled preset files"""

    def test_presets_are_valid_yaml(self):
        """Test that every preset parses to a mapping"""
        for name in ('tfim.yaml', 'xy.yaml'):
            with open(os.path.join(CONFIG_DIR, name), 'r', encoding='utf-8') as f:
                self.assertIsInstance(yaml.safe_load(f), dict)

    def test_tfim_preset(self):
        """Test that the TFIM preset converts meV to eV"""
        config = ConfigManager(os.path.join(CONFIG_DIR, 'tfim.yaml'))
        spec = config.model_spec()
        self.assertAlmostEqual(spec.jx, 11.83898e-3)
        self.assertEqual(spec.field.axis, 'z')
        self.assertAlmostEqual(spec.field.drive.h0, 23.67796e-3)
        quench = config.quench_config()
        self.assertIs(quench.protocol, Protocol.TFIM)
        self.assertEqual(quench.dt, 3.0)

    def test_xy_preset(self):
        """Test that the XY preset maps to the XX+YY family"""
        config = ConfigManager(os.path.join(CONFIG_DIR, 'xy.yaml'))
        spec = config.model_spec()
        self.assertEqual((spec.jx, spec.jy, spec.jz), (-1.0, -1.0, 0.0))
        self.assertIsNone(spec.field)
        self.assertIs(classify(spec).family, FamilyTag.F7)

    def test_engine_override(self):
        """Test that the engine argument wins over run.engine"""
        config = ConfigManager(os.path.join(CONFIG_DIR, 'xy.yaml'))
        self.assertIs(config.quench_config(engine='naiveTrotter').engine, Engine.NAIVE)
        self.assertEqual(config.quench_config(steps=5).n_steps, 5)


class TestValidation(unittest.TestCase):
    """Test rejection of malformed configuration"""

    def _write(self, text):
        handle = tempfile.NamedTemporaryFile('w', suffix='.yaml', delete=False, encoding='utf-8')
        handle.write(text)
        handle.close()
        self.addCleanup(os.unlink, handle.name)
        return handle.name

    def test_missing_file(self):
        with self.assertRaises(ConfigParseError):
            ConfigManager('/nonexistent/config.yaml')

    def test_unknown_section(self):
        with self.assertRaises(ConfigParseError):
            ConfigManager(self._write("plotting:\n  dpi: 300\n"))

    def test_unknown_key(self):
        with self.assertRaises(ConfigParseError):
            ConfigManager(self._write("model:\n  jx: 1.0\n  kappa: 2.0\n"))

    def test_non_mapping_top_level(self):
        with self.assertRaises(ConfigParseError):
            ConfigManager(self._write("- 1\n- 2\n"))

    def test_invalid_yaml(self):
        with self.assertRaises(ConfigParseError):
            ConfigManager(self._write("model: [unterminated\n"))

    def test_non_numeric_coupling(self):
        config = ConfigManager(self._write("model:\n  jx: strong\nrun:\n  n_spins: 3\n"))
        with self.assertRaises(ConfigParseError):
            config.model_spec()

    def test_unknown_energy_unit(self):
        config = ConfigManager(self._write("model:\n  jx: 1.0\n  energy_unit: Ry\n"))
        with self.assertRaises(ConfigParseError):
            config.model_spec()

    def test_unknown_protocol(self):
        config = ConfigManager(self._write("run:\n  protocol: heisenberg\n"))
        with self.assertRaises(ConfigParseError):
            config.quench_config()

    def test_unknown_target(self):
        config = ConfigManager(self._write("run:\n  target: approximate\n"))
        with self.assertRaises(ConfigParseError):
            config.run_target()

    def test_unknown_sampling(self):
        config = ConfigManager(self._write("run:\n  sampling: right\n"))
        with self.assertRaises(ConfigParseError):
            config.synthesis_options()

    def test_non_numeric_dt_and_steps(self):
        config = ConfigManager(self._write("run:\n  dt: fast\n  steps: many\n"))
        with self.assertRaises(ConfigParseError):
            config.run_dt()
        with self.assertRaises(ConfigParseError):
            config.run_steps()

    def test_non_positive_dt(self):
        config = ConfigManager(self._write("run:\n  dt: 0\n"))
        with self.assertRaises(ConfigParseError):
            config.run_dt()

    def test_unknown_output_format(self):
        config = ConfigManager(self._write("output:\n  formats: [csv, png]\n"))
        with self.assertRaises(ConfigParseError):
            config.output_formats()


class TestDefaults(unittest.TestCase):
    """Test default configuration and output directory precedence"""

    def test_default_config_is_tfim(self):
        config = ConfigManager()
        self.assertEqual(config.get('run.protocol'), 'tfim')
        self.assertEqual(config.get('synthesis.tol'), 1.0e-9)
        self.assertEqual(config.get('missing.key', 'fallback'), 'fallback')
        self.assertEqual(config.synthesis_options().max_restarts, 32)
        self.assertEqual(config.run_target(), 'exact')
        self.assertEqual(config.run_dt(), 3.0)
        self.assertEqual(config.run_steps(), 40)
        self.assertEqual(config.run_steps(5), 5)

    def test_default_config_is_a_copy(self):
        config = ConfigManager()
        config.config['run']['n_spins'] = 9
        self.assertEqual(DEFAULT_CONFIG['run']['n_spins'], 3)

    def test_output_dir_precedence(self):
        config = ConfigManager()
        with patch.dict(os.environ, {OUTPUT_DIR_ENV: 'env_out'}):
            self.assertEqual(config.output_dir(), Path('env_out'))
            self.assertEqual(config.output_dir('cli_out'), Path('cli_out'))
            config.config['output']['directory'] = 'file_out'
            self.assertEqual(config.output_dir(), Path('file_out'))
        with patch.dict(os.environ, {}, clear=True):
            config.config['output'].pop('directory')
            self.assertEqual(config.output_dir(), Path('out'))

    def test_create_default_config(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = create_default_config(os.path.join(tmp, 'config.yaml'))
            config = ConfigManager(str(path))
            self.assertEqual(config.config, DEFAULT_CONFIG)
            self.assertAlmostEqual(config.model_spec().jx, 11.83898e-3)


if __name__ == '__main__':
    unittest.main()

import os
import tempfile
import unittest
from unittest.mock import patch

from src.config import ConfigError, SimConfig, config_from_mapping, load_config, save_config, with_overrides


class TestConfig(unittest.TestCase):

    def setUp(self):
        self.tmpdir = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmpdir.cleanup()

    def write(self, text):
        path = os.path.join(self.tmpdir.name, "run.yaml")
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        return path

    def test_minimal_config(self):
        cfg = load_config(self.write("circuit: optimized\n"))
        self.assertEqual(cfg.circuit, "optimized")
        self.assertEqual(cfg.g_over_kappa, 2.5)
        self.assertEqual(cfg.branch_convention, "heralded")
        self.assertEqual(cfg.ensemble, "calibration")

    def test_empty_file_gives_defaults(self):
        cfg = load_config(self.write(""))
        self.assertEqual(cfg.circuit, "baseline")

    def test_out_of_range_xi_names_key(self):
        with self.assertRaisesRegex(ConfigError, "^xi1"):
            load_config(self.write("xi1: 1.5\n"))

    def test_unknown_key(self):
        with self.assertRaisesRegex(ConfigError, "^coupling"):
            load_config(self.write("coupling: 2.0\n"))

    def test_nested_values_rejected(self):
        with self.assertRaisesRegex(ConfigError, "^cavity"):
            load_config(self.write("cavity:\n  g: 2.5\n"))

    def test_invalid_yaml(self):
        with self.assertRaises(ConfigError):
            load_config(self.write("circuit: [unclosed\n"))

    def test_missing_file(self):
        with self.assertRaises(OSError):
            load_config(os.path.join(self.tmpdir.name, "missing.yaml"))

    def test_cloner_fidelity_range(self):
        with self.assertRaisesRegex(ConfigError, "cloner_fidelity"):
            config_from_mapping({"cloner_fidelity": 0.3})

    def test_log_axis_needs_positive_bound(self):
        with self.assertRaisesRegex(ConfigError, "axis1_lo"):
            config_from_mapping({"axis1": "err", "axis2": "p_sw", "axis1_lo": 0.0})

    def test_same_axis_twice(self):
        with self.assertRaisesRegex(ConfigError, "axis2"):
            config_from_mapping({"axis1": "p_sw", "axis2": "p_sw"})

    def test_non_integer_points(self):
        with self.assertRaisesRegex(ConfigError, "axis1_points"):
            config_from_mapping({"axis1_points": 2.5})

    def test_round_trip(self):
        cfg = config_from_mapping({"circuit": "optimized", "error_level": 0.01, "sw1_t12": 0.899,
                                   "axis1": "err", "axis2": "p_sw", "workers": 2})
        path = os.path.join(self.tmpdir.name, "saved.yaml")
        save_config(cfg, path)
        self.assertEqual(load_config(path), cfg)

    @patch.dict(os.environ, {"CNOTSIM_WORKERS": "3"})
    def test_workers_from_environment(self):
        self.assertEqual(config_from_mapping({}).workers, 3)
        self.assertEqual(config_from_mapping({"workers": 1}).workers, 1)


class TestDeviceErrors(unittest.TestCase):

    def test_exact_error_level(self):
        err = SimConfig(error_level=0.01).device_errors()
        self.assertEqual(err.xi1.xi, 0.01)
        self.assertTrue(all(c.tau_r == 0.01 and c.tau_l == 0.01 for c in err.cpbs))

    def test_individual_errors(self):
        err = SimConfig(xi2=-0.02, tau_l3=0.05).device_errors()
        self.assertEqual(err.xi2.xi, -0.02)
        self.assertEqual(err.cpbs[2].tau_l, 0.05)
        self.assertEqual(err.cpbs[0].tau_l, 0.0)

    def test_uniform_mode_is_seeded(self):
        cfg = SimConfig(error_level=0.01, error_mode="uniform", seed=7)
        a, b = cfg.device_errors(3), cfg.device_errors(3)
        self.assertEqual(a, b)
        self.assertNotEqual(a, cfg.device_errors(4))
        for c in a.cpbs:
            self.assertTrue(0.005 <= c.tau_r <= 0.015)

    def test_switches_and_cloner(self):
        err = SimConfig(sw2_r11=0.648, cloner_fidelity=0.82, cloner_mode="universal").device_errors()
        self.assertEqual(err.sw2.r11, 0.648)
        self.assertEqual(err.cloner.mode, "universal")

    def test_axis_uses_canonical_grid(self):
        cfg = SimConfig(axis1_points=5)
        self.assertEqual(cfg.axis(1), {"name": "kappa_s_over_kappa", "lo": 0.0, "hi": 2.0, "points": 5, "scale": "linear"})
        self.assertEqual(cfg.axis(2)["points"], 61)

    def test_with_overrides_revalidates(self):
        cfg = with_overrides(SimConfig(), g_over_kappa=0.45)
        self.assertEqual(cfg.g_over_kappa, 0.45)
        with self.assertRaises(ConfigError):
            with_overrides(cfg, kappa_s_over_kappa=-1.0)


if __name__ == '__main__':
    unittest.main()

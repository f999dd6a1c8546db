import os
import tempfile
import unittest
from unittest.mock import patch

from src.config import SimConfig
from src.constants import ANCHORS, F_UC
from src.reproduce import (
    AnchorCheck, TARGETS, anchor_setup, canonical_config, check_anchor, experimental_switches,
    qualitative_claims, reproduce,
)

ANCHORS_BY_NAME = {anchor["name"]: anchor for anchor in ANCHORS}


def fake_check(name, simulated):
    return AnchorCheck(name, 0.5, simulated, 0.01, simulated - 0.5, True, "basis4", "basis4", simulated)


class TestAnchorSetup(unittest.TestCase):

    def test_realistic_optimized_setup(self):
        cavity, err = anchor_setup(ANCHORS_BY_NAME["optimized_realistic"])
        self.assertEqual((cavity.g, cavity.kappa_s), (2.5, 0.05))
        self.assertEqual(err.sw1, experimental_switches()[0])
        self.assertEqual(err.cloner.fidelity, 0.82)
        self.assertEqual(err.xi1.xi, 0.01)

    def test_best_case_uses_own_error_level(self):
        _, err = anchor_setup(ANCHORS_BY_NAME["optimized_best_case"])
        self.assertEqual(err.cpbs[3].tau_r, 1e-4)
        self.assertEqual(err.cloner.fidelity, F_UC)
        self.assertEqual(err.sw2.r11, 1.0)

    def test_ideal_baseline_setup(self):
        cavity, err = anchor_setup(ANCHORS_BY_NAME["baseline_weak_ideal"])
        self.assertEqual(cavity.g, 0.45)
        self.assertEqual(err.xi2.xi, 0.0)


class TestCheckAnchor(unittest.TestCase):

    def test_strong_coupling_anchor_passes(self):
        check = check_anchor(ANCHORS_BY_NAME["baseline_strong_ideal"], "basis4")
        self.assertTrue(check.passed)
        self.assertLess(abs(check.residual), 0.01)
        self.assertEqual(check.best_ensemble, "basis4")

    @patch('src.reproduce.CALIBRATION_CANDIDATES', ['basis4', 'superposition4'])
    def test_failed_anchor_tries_other_ensembles(self):
        anchor = dict(ANCHORS_BY_NAME["baseline_weak_ideal"], tolerance=0.0, quoted_value=0.9)
        with self.assertLogs(level="WARNING") as logs:
            check = check_anchor(anchor, "basis4")
        self.assertFalse(check.passed)
        self.assertIn(check.best_ensemble, ("basis4", "superposition4"))
        self.assertLessEqual(abs(check.best_value - 0.9), abs(check.simulated - 0.9))
        self.assertIn("baseline_weak_ideal", logs.output[0])


class TestQualitativeClaims(unittest.TestCase):

    def test_all_claims_hold(self):
        checks = {c.name: c for c in (
            fake_check("baseline_strong_ideal", 0.937), fake_check("baseline_weak_ideal", 0.323),
            fake_check("optimized_best_case", 0.78), fake_check("optimized_realistic", 0.265),
        )}
        claims = qualitative_claims(checks)
        self.assertEqual([c.name for c in claims],
                         ["strong_beats_weak", "best_case_near_cloner_bound", "realistic_switch_collapse"])
        self.assertTrue(all(c.passed for c in claims))

    def test_claim_failures(self):
        checks = {c.name: c for c in (fake_check("optimized_best_case", 0.6), fake_check("optimized_realistic", 0.5))}
        claims = qualitative_claims(checks)
        self.assertFalse(any(c.passed for c in claims))

    def test_missing_anchors_skip_claims(self):
        self.assertEqual(qualitative_claims({}), [])


class TestReproduce(unittest.TestCase):

    def setUp(self):
        self.tmpdir = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmpdir.cleanup()

    def test_unknown_target(self):
        with self.assertRaises(ValueError):
            reproduce("fig9", self.tmpdir.name)
        with self.assertRaises(ValueError):
            canonical_config("table_anchors")

    def test_canonical_configs(self):
        self.assertEqual(canonical_config("fig3b").error_level, 0.01)
        fig4a = canonical_config("fig4a")
        self.assertEqual((fig4a.circuit, fig4a.cloner_fidelity, fig4a.sw2_r11), ("optimized", 0.82, 0.648))
        fig4b = canonical_config("fig4b")
        self.assertEqual((fig4b.axis1, fig4b.axis2, fig4b.output), ("err", "p_sw", "fig4b.csv"))

    @patch('src.reproduce.CALIBRATION_CANDIDATES', ['basis4'])
    @patch('src.reproduce.calibrate_ensemble', return_value='basis4')
    def test_table_anchors(self, mock_calibrate):
        report = reproduce("table_anchors", self.tmpdir.name)
        mock_calibrate.assert_called_once()
        self.assertEqual(len(report.anchors), len(ANCHORS))
        self.assertEqual(len(report.claims), 3)
        self.assertTrue(all(claim.passed for claim in report.claims))
        csv_path = os.path.join(self.tmpdir.name, "table_anchors.csv")
        self.assertEqual(report.csv_paths, [csv_path])
        with open(csv_path, encoding="utf-8") as f:
            lines = f.read().split("\n")
        self.assertTrue(lines[0].startswith("name,quoted_value,simulated"))
        self.assertEqual(len(lines) - 1, len(ANCHORS) + 1)
        with open(report.summary_path, encoding="utf-8") as f:
            summary = f.read()
        self.assertIn("## Anchors", summary)
        self.assertIn("## Qualitative claims", summary)

    @patch('src.reproduce.calibrate_ensemble', return_value='basis4')
    @patch('src.reproduce.check_anchor')
    @patch('src.reproduce.canonical_config')
    def test_surface_target(self, mock_config, mock_check, mock_calibrate):
        mock_config.return_value = SimConfig(error_level=0.01, ensemble="basis4", axis1_points=2, axis2_points=3,
                                             output="fig3a.csv")
        mock_check.side_effect = lambda anchor, ensemble: fake_check(anchor["name"], 0.5)
        report = reproduce("fig3a", self.tmpdir.name)
        self.assertEqual(report.surface["metric"], "f_up")
        self.assertEqual(report.surface["points"], 6)
        self.assertEqual([c.name for c in report.anchors], ["baseline_strong_errors", "baseline_weak_errors"])
        self.assertTrue(report.passed)
        self.assertTrue(os.path.exists(os.path.join(self.tmpdir.name, "fig3a.csv")))
        self.assertTrue(os.path.exists(os.path.join(self.tmpdir.name, "fig3a_summary.md")))

    def test_targets(self):
        self.assertEqual(TARGETS, ("fig3a", "fig3b", "fig4a", "fig4b", "table_anchors"))


if __name__ == '__main__':
    unittest.main()

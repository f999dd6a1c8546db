import unittest
from unittest.mock import patch

from src.cavity import CavityParams, cavity_coeffs
from src.fidelity import FidelityReport
from src.reproduce import AnchorCheck, ClaimCheck, ReproductionReport
from src.user_interface import format_fidelity_report, show_cavity, show_fidelity_report, show_reproduction


class TestUserInterface(unittest.TestCase):

    def test_format_baseline_report(self):
        report = FidelityReport("baseline", 0.9371, 0.5, 0.25, 0.5, 0.5, "basis4", "heralded")
        lines = format_fidelity_report(report)
        self.assertEqual(lines[0], "Circuit: baseline")
        self.assertIn("  F_up:   93.71%", lines)
        self.assertIn("  F_both: 25.00%", lines)
        self.assertTrue(lines[-1].endswith("total 1.0000"))

    def test_format_optimized_report(self):
        report = FidelityReport("optimized", 0.4, 0.4, 0.78, 0.45, 0.45, "basis4", "heralded", clone_overlap=5 / 6)
        lines = format_fidelity_report(report)
        self.assertFalse(any(line.startswith("  F_up") for line in lines))
        self.assertEqual(lines[-1], "  Mean clone overlap: 0.8333")

    def test_format_unbounded_report_warns(self):
        report = FidelityReport("baseline", 1.0, 0.8, 0.5, 0.5, 0.5, "basis4", "heralded",
                                max_norm=1.4330127, over_norm=2, clamped=3)
        lines = format_fidelity_report(report)
        self.assertEqual(lines[-1], "  Warning: 2 outputs above norm 1 (max 1.4330), 3 fidelities clipped to 1")

    @patch('src.user_interface.click.echo')
    def test_show_fidelity_report(self, mock_echo):
        show_fidelity_report(FidelityReport("optimized", 0.0, 0.0, 0.5, 0.25, 0.25, "basis4", "raw"))
        self.assertEqual(mock_echo.call_count, 4)

    @patch('src.user_interface.click.echo')
    def test_show_cavity(self, mock_echo):
        params = CavityParams(0.45, 1.0)
        show_cavity(params, cavity_coeffs(params))
        printed = [call.args[0] for call in mock_echo.call_args_list]
        self.assertEqual(printed[0], "t1 = 0.1801801802")
        self.assertTrue(printed[-1].startswith("regime = weak"))

    @patch('src.user_interface.click.echo')
    def test_show_reproduction(self, mock_echo):
        check = AnchorCheck("baseline_strong_errors", 0.8789, 0.8995, 0.015, 0.0206, False, "basis4", "basis4", 0.8995)
        claim = ClaimCheck("strong_beats_weak", "strong coupling 0.9371 is more than twice weak coupling 0.3234", True)
        report = ReproductionReport("table_anchors", "basis4", ["results/table_anchors.csv"],
                                    "results/table_anchors_summary.md", [check], [claim])
        show_reproduction(report)
        printed = [call.args[0] for call in mock_echo.call_args_list]
        self.assertEqual(printed[0], "Target: table_anchors (ensemble basis4)")
        self.assertTrue(printed[1].startswith("[FAIL] baseline_strong_errors: simulated 89.95% vs quoted 87.89%"))
        self.assertIn("residual +2.06 pp", printed[1])
        self.assertTrue(printed[2].startswith("[PASS] strong_beats_weak"))
        self.assertEqual(printed[-1], "Wrote results/table_anchors_summary.md")


if __name__ == '__main__':
    unittest.main()

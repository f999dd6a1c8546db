import unittest
from unittest.mock import patch, mock_open

from src.constants import (
    ANCHORS, CANONICAL_GRIDS, F_CLONER_EXPERIMENTAL, F_UC, REGIMES, evaluate_ratio, load_settings,
)


class TestConstants(unittest.TestCase):

    def test_evaluate_ratio_valid(self):
        self.assertAlmostEqual(evaluate_ratio("5 / 6"), 5 / 6)
        self.assertEqual(evaluate_ratio(0.82), 0.82)
        self.assertEqual(evaluate_ratio("1/2"), 0.5)

    def test_evaluate_ratio_invalid(self):
        with self.assertRaises(ValueError):
            evaluate_ratio("five sixths")
        with self.assertRaises(ValueError):
            evaluate_ratio("1 / 0")

    def test_settings_loaded(self):
        self.assertEqual(REGIMES["strong"], {"g_over_kappa": 2.5, "kappa_s_over_kappa": 0.05})
        self.assertAlmostEqual(F_UC, 5 / 6)
        self.assertEqual(F_CLONER_EXPERIMENTAL, 0.82)
        self.assertEqual(CANONICAL_GRIDS["err"]["scale"], "log")
        self.assertEqual(len(ANCHORS), 6)

    def test_anchor_entries_are_complete(self):
        required = {"name", "quoted_value", "tolerance", "circuit", "regime", "errors", "switches", "cloner", "metric"}
        for anchor in ANCHORS:
            with self.subTest(anchor=anchor["name"]):
                self.assertTrue(required <= set(anchor))

    @patch('yaml.safe_load')
    def test_load_settings(self, mock_yaml_load):
        mock_yaml_load.return_value = {'version': '9.9.9'}
        with patch('builtins.open', mock_open(read_data='')):
            settings = load_settings('other.yaml')
        self.assertEqual(settings, {'version': '9.9.9'})


if __name__ == '__main__':
    unittest.main()

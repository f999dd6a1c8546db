import cmath
import math
import unittest

import numpy as np

from src.cavity import CavityParams, ideal_coeffs
from src.circuits import CnotInputs, DeviceErrorConfig, baseline_cnot, optimized_cnot
from src.devices import ClonerConfig, HwpError, SwitchCoeffs
from src.fidelity import (
    FidelityError, InputEnsemble, average_fidelity, basis4, calibrate_ensemble, calibration_residuals,
    fidelity_single, haar_product, ideal_spin_state, make_ensemble, success_probability, superposition4,
)
from src.state import factor_state, scale, with_weight

S = 1 / math.sqrt(2)
STRONG = CavityParams(g=2.5, kappa_s=0.05, gamma_x=0.1)
WEAK = CavityParams(g=0.45, kappa_s=1.0, gamma_x=0.1)


class TestFidelitySingle(unittest.TestCase):

    def test_ideal_optimized_is_perfect(self):
        for inputs in basis4().states + superposition4().states:
            out = optimized_cnot(inputs, ideal_coeffs())
            self.assertAlmostEqual(fidelity_single(out, inputs, "both"), 1.0, places=12)

    def test_ideal_baseline_over_both_branches(self):
        inputs = CnotInputs(S, S, S, S)
        out = baseline_cnot(inputs, ideal_coeffs())
        self.assertAlmostEqual(fidelity_single(out, inputs, "both"), 0.25, places=12)

    def test_ideal_baseline_down_branch_heralded(self):
        inputs = CnotInputs(0.6, 0.8, S, -S)
        out = baseline_cnot(inputs, ideal_coeffs())
        self.assertAlmostEqual(fidelity_single(out, inputs, "branch_down", "raw"), 0.5, places=12)
        self.assertAlmostEqual(fidelity_single(out, inputs, "branch_down", "heralded"), 1.0, places=12)
        self.assertAlmostEqual(fidelity_single(out, inputs, "branch_down", "renormalized"), 1.0, places=12)

    def test_ideal_baseline_up_branch_misses_sign(self):
        inputs = CnotInputs(S, S, 1, 0)
        out = baseline_cnot(inputs, ideal_coeffs())
        self.assertAlmostEqual(fidelity_single(out, inputs, "branch_up", "heralded"), 0.0, places=12)

    def test_weight_scaling(self):
        inputs = CnotInputs(0.6, 0.8, S, S)
        out = optimized_cnot(inputs, STRONG)
        base = fidelity_single(out, inputs, "both")
        for w in (0.2, 0.5, 0.9):
            with self.subTest(w=w):
                self.assertAlmostEqual(fidelity_single(with_weight(out, w), inputs, "both"), w ** 2 * base, places=12)

    def test_global_phase_invariance(self):
        inputs = CnotInputs(0.6, 0.8j, S, S)
        out = baseline_cnot(inputs, WEAK)
        phased = scale(out, cmath.exp(0.7j))
        for mode in ("branch_up", "branch_down", "both"):
            self.assertAlmostEqual(fidelity_single(phased, inputs, mode), fidelity_single(out, inputs, mode), places=12)

    def test_bounded_by_one(self):
        rng = np.random.default_rng(2)
        for inputs in haar_product(30, seed=4).states:
            out = baseline_cnot(inputs, CavityParams(*rng.uniform(0, 3, size=2)))
            for mode in ("branch_up", "branch_down", "both"):
                self.assertLessEqual(fidelity_single(out, inputs, mode, "raw"), 1.0 + 1e-9)

    def test_heralded_clipped_for_non_unitary_plates(self):
        err = DeviceErrorConfig(xi1=HwpError(-0.5), xi2=HwpError(-0.5))
        worst = 0.0
        for inputs in basis4().states + superposition4().states:
            for run in (baseline_cnot, optimized_cnot):
                out = run(inputs, ideal_coeffs(), err)
                for mode in ("branch_up", "branch_down"):
                    worst = max(worst, fidelity_single(out, inputs, mode, "heralded", clamp=False))
                    self.assertLessEqual(fidelity_single(out, inputs, mode, "heralded"), 1.0)
        self.assertGreater(worst, 1.0)

    def test_unknown_mode(self):
        out = baseline_cnot(CnotInputs.basis("R", "R"), ideal_coeffs())
        with self.assertRaises(FidelityError):
            fidelity_single(out, CnotInputs.basis("R", "R"), "branch_sideways")
        with self.assertRaises(FidelityError):
            fidelity_single(out, CnotInputs.basis("R", "R"), "branch_up", "squared")

    def test_requires_spin(self):
        with self.assertRaises(FidelityError):
            fidelity_single(factor_state("p1", {"R": 1}), CnotInputs.basis("R", "R"))

    def test_ideal_spin_state(self):
        spin = ideal_spin_state()
        self.assertAlmostEqual(spin.amplitude(spin="up"), S, places=12)
        self.assertAlmostEqual(spin.amplitude(spin="down"), S, places=12)


class TestSuccessProbability(unittest.TestCase):

    def test_ideal_baseline_branches(self):
        out = baseline_cnot(CnotInputs.basis("L", "R"), ideal_coeffs())
        self.assertAlmostEqual(success_probability(out, "up"), 0.5, places=12)
        self.assertAlmostEqual(success_probability(out, "down"), 0.5, places=12)
        self.assertAlmostEqual(success_probability(out), 1.0, places=12)

    def test_experimental_switches_and_cloner(self):
        err = DeviceErrorConfig(sw1=SwitchCoeffs(t12=0.899, r22=0.65), sw2=SwitchCoeffs(t12=0.956, r11=0.648),
                                cloner=ClonerConfig(0.82))
        out = optimized_cnot(CnotInputs.basis("R", "L"), ideal_coeffs(), err)
        self.assertAlmostEqual(success_probability(out, "both"), 0.29684, places=5)


class TestEnsembles(unittest.TestCase):

    def test_basis4(self):
        ens = basis4()
        self.assertEqual(len(ens.states), 4)
        self.assertEqual(ens.descriptor, "basis4")

    def test_haar_product_is_reproducible(self):
        a, b = haar_product(10, seed=3), haar_product(10, seed=3)
        self.assertEqual(a.states, b.states)
        self.assertEqual(a.descriptor, "haar_product(10, seed=3)")
        self.assertNotEqual(a.states, haar_product(10, seed=4).states)

    def test_unknown_kind(self):
        with self.assertRaises(FidelityError):
            make_ensemble("bell4")
        with self.assertRaises(FidelityError):
            InputEnsemble("basis4", ())


class TestAverageFidelity(unittest.TestCase):

    def test_strong_coupling_anchor(self):
        report = average_fidelity("baseline", STRONG, DeviceErrorConfig.ideal(), basis4())
        self.assertAlmostEqual(report.f_best, 0.9374, delta=0.01)
        self.assertEqual(report.convention, "heralded")

    def test_weak_coupling_anchor(self):
        report = average_fidelity("baseline", WEAK, DeviceErrorConfig.ideal(), basis4())
        self.assertAlmostEqual(report.f_best, 0.3234, delta=0.01)

    def test_strong_beats_weak(self):
        strong = average_fidelity("baseline", STRONG, DeviceErrorConfig.ideal(), basis4()).f_best
        weak = average_fidelity("baseline", WEAK, DeviceErrorConfig.ideal(), basis4()).f_best
        self.assertGreater(strong, 2 * weak)

    def test_ideal_optimized_report(self):
        report = average_fidelity("optimized", ideal_coeffs(), DeviceErrorConfig.ideal(), superposition4())
        self.assertAlmostEqual(report.f_both, 1.0, places=12)
        self.assertAlmostEqual(report.success_total, 1.0, places=12)
        self.assertEqual(report.clone_overlap, 1.0)
        self.assertTrue(report.bounded)

    def test_universal_cloner_overlap(self):
        err = DeviceErrorConfig(cloner=ClonerConfig(5 / 6, "universal"))
        report = average_fidelity("optimized", ideal_coeffs(), err, basis4())
        self.assertAlmostEqual(report.clone_overlap, 5 / 6, places=12)

    def test_superposition_inputs_detect_the_up_branch_sign(self):
        basis = average_fidelity("baseline", ideal_coeffs(), DeviceErrorConfig.ideal(), basis4())
        superposed = average_fidelity("baseline", ideal_coeffs(), DeviceErrorConfig.ideal(), superposition4())
        self.assertAlmostEqual(basis.f_up, 1.0, places=12)
        self.assertAlmostEqual(superposed.f_up, 0.0, places=12)
        self.assertAlmostEqual(basis.f_down, 1.0, places=12)
        self.assertAlmostEqual(superposed.f_down, 1.0, places=12)

    def test_fidelity_degrades_along_error_ladder(self):
        ladder = (0.0, 1e-3, 1e-2, 3e-2, 1e-1)
        for circuit, metric in (("baseline", "f_best"), ("optimized", "f_both")):
            values = [getattr(average_fidelity(circuit, STRONG, DeviceErrorConfig().with_error_level(level), basis4()),
                              metric) for level in ladder]
            with self.subTest(circuit=circuit):
                self.assertTrue(all(b <= a for a, b in zip(values, values[1:])), values)

    def test_outputs_above_norm_one_are_flagged(self):
        err = DeviceErrorConfig(xi1=HwpError(-0.5), xi2=HwpError(-0.5))
        with self.assertLogs(level="WARNING"):
            report = average_fidelity("baseline", ideal_coeffs(), err, basis4())
        self.assertFalse(report.bounded)
        self.assertEqual(report.over_norm, 2)
        self.assertGreater(report.clamped, 0)
        self.assertAlmostEqual(report.max_norm, 1 + math.sqrt(3) / 4, places=9)
        self.assertLessEqual(report.f_up, 1.0)
        self.assertLessEqual(report.f_down, 1.0)

    def test_unknown_circuit(self):
        with self.assertRaises(FidelityError):
            average_fidelity("teleport", STRONG, DeviceErrorConfig.ideal(), basis4())


class TestCalibration(unittest.TestCase):

    def test_basis_inputs_reproduce_anchors(self):
        residuals = calibration_residuals(("basis4", "superposition4"))
        self.assertLess(residuals["basis4"], 0.01)
        self.assertLess(residuals["basis4"], residuals["superposition4"])

    def test_calibration_picks_basis4(self):
        self.assertEqual(calibrate_ensemble(50), "basis4")


if __name__ == '__main__':
    unittest.main()

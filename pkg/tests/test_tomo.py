import unittest

import numpy as np

from src.core.models.errors import ParameterRangeError
from src.core.models.records import Classification, CoincidenceSet, CountTriple, DetectorConfig
from src.core.models.sources import ExternallyMixed, InternalEntangled, PurePolarized, direction_from_angles
from src.core.models.states import DensityMatrix, PauliAxis, StokesVector
from src.core.services import qstate, tomo
from src.core.services.backends import get_backend
from src.core.services.bench import sample_bloch_uniform

AXIS1_UP = StokesVector.along(PauliAxis.AXIS1)


class TestEstimators(unittest.TestCase):
    def test_abs_stokes_examples(self):
        self.assertEqual(tomo.estimate_abs_stokes(CoincidenceSet(0.0, 0.5, 0.5, 0.5))[0], 0.0)
        self.assertEqual(tomo.estimate_abs_stokes(CoincidenceSet(0.25, 0.25, 0.25, 0.25)), (0.0, 0.0, 0.0))
        self.assertAlmostEqual(tomo.estimate_abs_stokes(CoincidenceSet(0.0, 0.32, 0.5, 0.5))[0], 0.6, places=12)

    # Valores negativos por ruido se recortan; por debajo de -0.05 se avisa
    def test_clamping_and_warning(self):
        c = CoincidenceSet(0.0, 0.53, 0.5, 0.5)
        self.assertEqual(tomo.estimate_abs_stokes(c)[0], 0.0)
        self.assertTrue(tomo.has_estimator_warning(c))
        self.assertFalse(tomo.has_estimator_warning(CoincidenceSet(0.0, 0.51, 0.5, 0.5)))

    def test_dop(self):
        self.assertEqual(tomo.estimate_dop((1.0, 0.0, 0.0)), 1.0)
        self.assertAlmostEqual(tomo.estimate_dop((0.6, 0.0, 0.0)), 0.6, places=14)
        self.assertAlmostEqual(tomo.estimate_dop((0.36, 0.48, 0.8)), 1.0, places=12)

    def test_dop_from_coincidences(self):
        c = CoincidenceSet.from_stokes(StokesVector(0.3, 0.4, 0.0))
        self.assertAlmostEqual(tomo.estimate_dop_from_coincidences(c), 0.5, places=12)

    def test_classify(self):
        self.assertIs(tomo.classify(0.0), Classification.PURE_INTERNAL)
        self.assertIs(tomo.classify(0.16), Classification.EXTERNAL_OR_MIXTURE)
        self.assertIs(tomo.classify(0.0005, shots=10000), Classification.PURE_INTERNAL)
        self.assertIs(tomo.classify(0.05, shots=10000), Classification.EXTERNAL_OR_MIXTURE)


class TestRotationRule(unittest.TestCase):
    def test_examples(self):
        self.assertAlmostEqual(tomo.rotation_angle(0.0), np.pi / 4, places=14)
        self.assertAlmostEqual(tomo.rotation_angle(np.pi / 4), -np.pi / 8, places=14)
        self.assertAlmostEqual(tomo.rotation_angle(np.pi / 2), -np.pi / 4, places=14)

    def test_range_over_dense_grid(self):
        for xi in np.linspace(0.0, np.pi / 2, 2001):
            theta = abs(tomo.rotation_angle(float(xi)))
            self.assertGreaterEqual(theta, np.pi / 8 - 1e-12)
            self.assertLessEqual(theta, np.pi / 4 + 1e-12)

    def test_out_of_range(self):
        with self.assertRaises(ParameterRangeError):
            tomo.rotation_angle(-0.1)
        with self.assertRaises(ParameterRangeError):
            tomo.rotation_angle(2.0)


class TestSignProduct(unittest.TestCase):
    # s = (., 0.6, 0.8): xi = 0.9273, theta = -0.4636, candidatos {0.8944, 0.1789}
    def test_same_sign(self):
        theta = tomo.rotation_angle(float(np.arctan2(0.8, 0.6)))
        self.assertAlmostEqual(theta, -0.4636, places=4)
        decision = tomo.sign_product((0.6, 0.8), 0.8944, theta)
        self.assertEqual(decision.sign, 1)
        self.assertTrue(decision.confident)
        self.assertAlmostEqual(decision.predicted_same_sign, 0.8944, places=4)
        self.assertAlmostEqual(decision.predicted_opposite_sign, 0.1789, places=4)

    def test_opposite_sign(self):
        theta = tomo.rotation_angle(float(np.arctan2(0.8, 0.6)))
        self.assertEqual(tomo.sign_product((0.6, 0.8), 0.1789, theta).sign, -1)

    def test_against_rotation_oracle(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            a, b = rng.uniform(0.05, 1.0, size=2) * rng.choice([-1, 1], size=2)
            theta = tomo.rotation_angle(float(np.arctan2(abs(b), abs(a))))
            post = abs(a * np.cos(theta) - b * np.sin(theta))
            self.assertEqual(tomo.sign_product((abs(a), abs(b)), post, theta).sign, int(np.sign(a * b)))

    def test_degenerate_component_is_flagged(self):
        decision = tomo.sign_product((1.0, 0.0), np.cos(np.pi / 4), np.pi / 4)
        self.assertFalse(decision.confident)

    def test_noise_wider_than_separation(self):
        decision = tomo.sign_product((0.5, 0.5), 0.5, np.pi / 8, noise=1.0)
        self.assertFalse(decision.confident)


class TestPdlStep(unittest.TestCase):
    def setUp(self):
        self.det = DetectorConfig(eta0=0.9, eta1=0.9, eta_h=0.9, eta_v=0.7, pairs_n=1000)

    def test_transmission(self):
        h = DensityMatrix(np.diag([1.0, 0.0]).astype(complex))
        self.assertAlmostEqual(tomo.pdl_transmission(h, self.det), 0.9, places=14)
        plus = qstate.state_from_angles(np.pi / 2, 0.0).projector()
        self.assertAlmostEqual(tomo.pdl_transmission(plus, self.det), 0.8, places=14)
        mixed = DensityMatrix(np.diag([0.8, 0.2]).astype(complex))
        self.assertAlmostEqual(tomo.pdl_transmission(mixed, self.det), 0.86, places=14)

    def test_exact_counts(self):
        ideal = DetectorConfig(eta0=1.0, eta1=1.0, eta_h=0.9, eta_v=0.7, pairs_n=1000)
        counts = tomo.simulate_counts(0.5, 1.0, ideal)
        self.assertAlmostEqual(counts.c0, 500.0)
        self.assertAlmostEqual(counts.c1, 500.0)
        self.assertAlmostEqual(counts.c01, 500.0)
        lossy = DetectorConfig(eta0=0.5, eta1=1.0, eta_h=0.9, eta_v=0.7, pairs_n=1000)
        counts = tomo.simulate_counts(0.5, 0.8, lossy)
        self.assertAlmostEqual(counts.c0, 300.0)
        self.assertAlmostEqual(counts.c1, 500.0)

    def test_sampled_counts_near_expectation(self):
        det = DetectorConfig(pairs_n=1_000_000)
        exact = tomo.simulate_counts(0.3, 0.85, det)
        sampled = tomo.simulate_counts(0.3, 0.85, det, seed=9, sampled=True)
        for e, s in ((exact.c0, sampled.c0), (exact.c1, sampled.c1), (exact.c01, sampled.c01)):
            self.assertLess(abs(s - e), 5 * np.sqrt(e))

    # Con eficiencias 1 la razón C0/C1 es directamente eta_PDL; la igualdad da +1
    def test_sign_s1(self):
        det = DetectorConfig(eta0=1.0, eta1=1.0, eta_h=0.75, eta_v=0.25, pairs_n=1000)
        self.assertEqual(tomo.sign_s1(750.0, 1000.0, det), 1)
        self.assertEqual(tomo.sign_s1(250.0, 1000.0, det), -1)
        self.assertEqual(tomo.sign_s1(500.0, 1000.0, det), 1)

    def test_eta_standard_error(self):
        det = DetectorConfig(eta0=1.0, eta1=1.0, eta_h=0.75, eta_v=0.25, pairs_n=1000)
        near = CountTriple(252.0, 500.0, 0.0)
        self.assertEqual(tomo.eta_pdl_standard_error(near, det, sampled=False), 0.0)
        expected = 0.504 * np.sqrt((1 - 0.252) / 252 + (1 - 0.5) / 500)
        self.assertAlmostEqual(tomo.eta_pdl_standard_error(near, det), expected, places=12)

    # Cerca del punto medio (eta_H + eta_V)/2 la decisión sobre s1 no es fiable
    def test_sign_s1_decision(self):
        det = DetectorConfig(eta0=1.0, eta1=1.0, eta_h=0.75, eta_v=0.25, pairs_n=1000)
        near = tomo.sign_s1_decision(CountTriple(252.0, 500.0, 0.0), det)
        self.assertEqual(near.sign, 1)
        self.assertFalse(near.confident)
        far = tomo.sign_s1_decision(CountTriple(400.0, 500.0, 0.0), det)
        self.assertEqual(far.sign, 1)
        self.assertTrue(far.confident)
        self.assertTrue(tomo.sign_s1_decision(CountTriple(252.0, 500.0, 0.0), det, sampled=False).confident)

    def test_sign_s1_needs_counts(self):
        with self.assertRaises(ParameterRangeError):
            tomo.sign_s1(10.0, 0.0, self.det)

    def test_detector_validation(self):
        with self.assertRaises(ParameterRangeError):
            DetectorConfig(eta_h=0.7, eta_v=0.9)
        with self.assertRaises(ParameterRangeError):
            DetectorConfig(eta0=1.2)


class TestFullTomography(unittest.TestCase):
    # Fuente pura s = (0.36, -0.48, 0.8) en modo exacto
    def test_pure_example(self):
        source = PurePolarized(StokesVector(0.36, -0.48, 0.8))
        record = tomo.full_tomography("analytic", source)
        np.testing.assert_allclose(record.s.as_array(), [0.36, -0.48, 0.8], atol=1e-10)
        self.assertAlmostEqual(record.dop, 1.0, places=10)
        self.assertIs(record.classification, Classification.PURE_INTERNAL)
        self.assertEqual(record.sign_confidence, (True, True, True))
        self.assertFalse(record.degenerate)
        self.assertEqual(len(record.diagnostics.rotations), 2)

    def test_all_backends_agree(self):
        source = PurePolarized(StokesVector(-0.36, 0.48, -0.8))
        for name in ("analytic", "circuit", "boson"):
            record = tomo.full_tomography(name, source)
            np.testing.assert_allclose(record.s.as_array(), [-0.36, 0.48, -0.8], atol=1e-9, err_msg=name)

    def test_internal_example(self):
        record = tomo.full_tomography("circuit", InternalEntangled(AXIS1_UP, p=0.8))
        self.assertAlmostEqual(record.s.s1, 0.6, places=10)
        self.assertAlmostEqual(record.dop, 0.6, places=10)
        self.assertAlmostEqual(record.global_purity, 1.0, places=10)
        self.assertIs(record.classification, Classification.PURE_INTERNAL)

    def test_negative_s1_from_pdl(self):
        source = InternalEntangled(StokesVector.along(PauliAxis.AXIS1, -1.0), p=0.8)
        record = tomo.full_tomography("boson", source)
        self.assertAlmostEqual(record.s.s1, -0.6, places=10)

    def test_external_example(self):
        record = tomo.full_tomography("analytic", ExternallyMixed(AXIS1_UP, lam=0.8))
        self.assertAlmostEqual(record.dop, 0.6, places=10)
        self.assertAlmostEqual(record.global_purity, 0.68, places=10)
        self.assertAlmostEqual(record.diagnostics.coincidences.p_identity, 0.16, places=12)
        self.assertIs(record.classification, Classification.EXTERNAL_OR_MIXTURE)

    # s1 = 0: el signo global de (s2, s3) queda sin determinar
    def test_global_sign_ambiguity(self):
        record = tomo.full_tomography("analytic", PurePolarized(StokesVector(0.0, 0.6, 0.8)))
        self.assertTrue(record.global_sign_ambiguous)
        self.assertTrue(record.degenerate)
        np.testing.assert_allclose(np.abs(record.s.as_array()), [0.0, 0.6, 0.8], atol=1e-10)
        self.assertEqual(np.sign(record.s.s2 * record.s.s3), 1.0)

    # s3 = 0: una sola rotación alrededor del eje 3 fija sign(s1 s2)
    def test_axis3_fallback(self):
        record = tomo.full_tomography("analytic", PurePolarized(StokesVector(0.6, -0.8, 0.0)))
        np.testing.assert_allclose(record.s.as_array(), [0.6, -0.8, 0.0], atol=1e-10)
        self.assertEqual(len(record.diagnostics.rotations), 1)
        self.assertIs(record.diagnostics.rotations[0].axis, PauliAxis.AXIS3)
        self.assertEqual(record.sign_confidence, (True, True, False))

    # 500 estados puros con |s_j| >= 0.05: todos los signos correctos, con tres PDL distintos
    def test_sign_recovery_soundness(self):
        rng = np.random.default_rng(20240601)
        detectors = [DetectorConfig(eta_h=h, eta_v=v) for h, v in ((0.9, 0.7), (0.99, 0.01), (0.51, 0.49))]
        backend = get_backend("analytic")
        checked = 0
        while checked < 500:
            theta, phi = sample_bloch_uniform(rng)
            direction = direction_from_angles(theta, phi)
            if min(abs(direction.as_array())) < 0.05:
                continue
            source = PurePolarized(direction)
            results = [tomo.full_tomography(backend, source, det=det).s.as_array() for det in detectors]
            for recovered in results:
                np.testing.assert_array_equal(np.sign(recovered), np.sign(direction.as_array()))
                np.testing.assert_array_equal(recovered, results[0])
            checked += 1

    def test_sampled_run_is_seeded(self):
        source = PurePolarized(direction_from_angles(1.0, 0.5))
        a = tomo.full_tomography("analytic", source, shots=10000, seed=4)
        b = tomo.full_tomography("analytic", source, shots=10000, seed=4)
        np.testing.assert_array_equal(a.s.as_array(), b.s.as_array())
        self.assertLessEqual(a.dop, 1.0)
        self.assertAlmostEqual(a.dop, a.s.norm(), places=9)

    def test_sampled_recovers_signs(self):
        source = PurePolarized(StokesVector(0.36, -0.48, 0.8))
        record = tomo.full_tomography("circuit", source, shots=100000, seed=12)
        np.testing.assert_array_equal(np.sign(record.s.as_array()), [1.0, -1.0, 1.0])
        np.testing.assert_allclose(record.s.as_array(), [0.36, -0.48, 0.8], atol=0.03)

    # |s1| pequeño y pocos pares: el signo de s1 se marca dudoso en vez de darlo por bueno
    def test_weak_s1_with_few_pairs_is_flagged(self):
        source = PurePolarized(direction_from_angles(float(np.arccos(0.03)), float(np.arctan2(0.8, 0.6))))
        det = DetectorConfig(pairs_n=100_000)
        wrong_but_confident = 0
        flagged = 0
        for seed in range(300):
            record = tomo.full_tomography("analytic", source, shots=1_000_000, det=det, seed=seed)
            if not record.sign_confidence[0]:
                flagged += 1
                self.assertTrue(record.degenerate)
            elif record.s.s1 < 0:
                wrong_but_confident += 1
        self.assertLessEqual(wrong_but_confident, 1)
        self.assertGreater(flagged, 100)

    def test_unknown_backend(self):
        with self.assertRaises(ParameterRangeError):
            tomo.full_tomography("quantum-annealer", PurePolarized(AXIS1_UP))


class TestStandardQst(unittest.TestCase):
    def test_exact_mode(self):
        source = PurePolarized(StokesVector(0.36, -0.48, 0.8))
        rho, s = tomo.standard_qst(source, shots=0)
        np.testing.assert_allclose(s.as_array(), [0.36, -0.48, 0.8], atol=1e-12)
        self.assertEqual(np.linalg.matrix_rank(rho.entries, tol=1e-9), 1)

    # Estimaciones fuera de la bola de Bloch se proyectan a norma 1
    def test_regularization(self):
        source = PurePolarized(direction_from_angles(0.9, 0.9))
        projected = 0
        for seed in range(40):
            rho, s = tomo.standard_qst(source, shots=100, seed=seed)
            self.assertLessEqual(s.norm(), 1.0 + 1e-9)
            self.assertGreaterEqual(float(np.min(np.linalg.eigvalsh(rho.entries))), -1e-12)
            if abs(s.norm() - 1.0) < 1e-9:
                projected += 1
        self.assertGreater(projected, 0)

    def test_unpolarized_limit(self):
        source = ExternallyMixed(AXIS1_UP, lam=0.5)
        _, s = tomo.standard_qst(source, shots=1_000_000, seed=2)
        self.assertLess(s.norm(), 0.01)

    # Ambos métodos coinciden en |s_j| dentro de dos errores estándar combinados
    def test_agrees_with_hom_method(self):
        source = PurePolarized(direction_from_angles(1.1, 0.6))
        shots = 10000
        _, qst_s = tomo.standard_qst(source, shots, seed=31)
        record = tomo.full_tomography("analytic", source, shots=shots, seed=32)
        for axis in PauliAxis:
            qst_value = abs(qst_s.component(axis))
            hom_value = abs(record.s.component(axis))
            true_value = abs(source.direction.component(axis))
            qst_se = np.sqrt(max(1 - true_value ** 2, 1e-4) / shots)
            hom_se = np.sqrt(2.0 / shots) / (2 * max(true_value, 0.05))
            self.assertLess(abs(qst_value - hom_value), 2 * np.hypot(qst_se, hom_se) + 0.01)


class TestErrorEpsilon(unittest.TestCase):
    def test_exact_values_give_zero(self):
        source = InternalEntangled(direction_from_angles(0.3, 4.0), p=0.9)
        measured = tomo.measure_coincidences("analytic", source)
        self.assertAlmostEqual(tomo.error_epsilon(source, measured), 0.0, places=20)

    def test_offset_adds_three_squares(self):
        source = PurePolarized(direction_from_angles(0.7, 0.2))
        exact = tomo.measure_coincidences("analytic", source)
        delta = 0.01
        shifted = CoincidenceSet(exact.p_identity, exact.p_axis1 + delta, exact.p_axis2 + delta, exact.p_axis3 + delta)
        self.assertAlmostEqual(tomo.error_epsilon(source, shifted), 3 * delta ** 2, places=12)

    def test_typical_sampled_error(self):
        rng = np.random.default_rng(8)
        errors = []
        for _ in range(50):
            source = PurePolarized(direction_from_angles(*sample_bloch_uniform(rng)))
            measured = tomo.measure_coincidences("analytic", source, 10000, rng)
            errors.append(tomo.error_epsilon(source, measured))
        median = float(np.median(errors))
        self.assertGreater(median, 1e-6)
        self.assertLess(median, 1e-3)

    def test_error_decreases_with_shots(self):
        rng = np.random.default_rng(99)
        sources = [PurePolarized(direction_from_angles(*sample_bloch_uniform(rng))) for _ in range(100)]
        low = [tomo.error_epsilon(s, tomo.measure_coincidences("analytic", s, 1000, rng)) for s in sources]
        high = [tomo.error_epsilon(s, tomo.measure_coincidences("analytic", s, 100000, rng)) for s in sources]
        self.assertLess(np.median(high), np.median(low))


if __name__ == "__main__":
    unittest.main()

import unittest

import numpy as np

from src.core.models.errors import ParameterRangeError
from src.core.models.records import Classification
from src.core.models.sources import ExternallyMixed, InternalEntangled, PurePolarized
from src.core.models.sweeps import CSV_COLUMNS, SweepConfig
from src.core.services import bench, tomo


class TestSampling(unittest.TestCase):
    # Uniforme en área: <s> = 0 y <s_j^2> = 1/3
    def test_bloch_moments(self):
        rng = np.random.default_rng(101)
        points = []
        for _ in range(20000):
            theta, phi = bench.sample_bloch_uniform(rng)
            points.append((np.cos(theta), np.cos(phi) * np.sin(theta), np.sin(phi) * np.sin(theta)))
        points = np.array(points)
        np.testing.assert_allclose(points.mean(axis=0), 0.0, atol=0.03)
        np.testing.assert_allclose((points ** 2).mean(axis=0), 1.0 / 3.0, atol=0.02)
        np.testing.assert_allclose(np.linalg.norm(points, axis=1), 1.0, atol=1e-12)

    def test_make_source(self):
        self.assertIsInstance(bench.make_source("pure", 1.0, 2.0), PurePolarized)
        internal = bench.make_source("internal", 1.0, 2.0, dop=0.6)
        self.assertIsInstance(internal, InternalEntangled)
        self.assertAlmostEqual(internal.p, 0.8, places=14)
        external = bench.make_source("external", 1.0, 2.0, dop=0.0)
        self.assertIsInstance(external, ExternallyMixed)
        self.assertAlmostEqual(external.dop(), 0.0, places=14)
        with self.assertRaises(ParameterRangeError):
            bench.make_source("coherent", 1.0, 2.0)


class TestAggregate(unittest.TestCase):
    def test_statistics(self):
        agg = bench.aggregate([1e-4, 1e-3, 1e-2, 0.0], bins=3)
        self.assertEqual(agg.count, 4)
        self.assertEqual(agg.zero_count, 1)
        self.assertAlmostEqual(agg.mean, 0.01110 / 4, places=12)
        self.assertAlmostEqual(agg.median, 5.5e-4, places=12)
        self.assertEqual(sum(agg.histogram_counts), 3)
        self.assertEqual(len(agg.histogram_edges), 4)
        self.assertAlmostEqual(agg.stderr, agg.std / 2.0, places=14)

    def test_all_zero_has_no_histogram(self):
        agg = bench.aggregate([0.0, 0.0])
        self.assertEqual(agg.histogram_counts, ())
        self.assertEqual(agg.zero_count, 2)

    def test_empty_rejected(self):
        with self.assertRaises(ParameterRangeError):
            bench.aggregate([])

    def test_loglog_slope(self):
        self.assertAlmostEqual(bench.loglog_slope([10, 100, 1000], [1.0, 0.1, 0.01]), -1.0, places=10)
        with self.assertRaises(ParameterRangeError):
            bench.loglog_slope([10], [1.0])


class TestSweepConfig(unittest.TestCase):
    def test_validation(self):
        with self.assertRaises(ParameterRangeError):
            SweepConfig(num_states=0)
        with self.assertRaises(ParameterRangeError):
            SweepConfig(dop_grid=(0.5, 1.5))
        with self.assertRaises(ParameterRangeError):
            SweepConfig(source_kind="thermal")
        with self.assertRaises(ParameterRangeError):
            SweepConfig(shots_grid=(0,))

    def test_full_scale(self):
        self.assertEqual(SweepConfig(num_states=5, full_scale=True).effective_num_states, 10000)

    def test_dict_round_trip(self):
        cfg = SweepConfig(num_states=7, dop_grid=(0.0, 0.5), seed=3)
        self.assertEqual(SweepConfig.from_dict(cfg.to_dict()), cfg)


class TestPureSweep(unittest.TestCase):
    def test_exact_sweep_has_zero_error(self):
        cfg = SweepConfig(num_states=20, shots_per_setting=0, backend="analytic", seed=5)
        result = bench.run_pure_sweep(cfg)
        self.assertEqual(len(result.rows), 20)
        self.assertTrue(all(row.epsilon == 0.0 for row in result.rows))
        self.assertEqual(result.aggregate.zero_count, 20)
        self.assertEqual(len(result.rows[0].as_csv()), len(CSV_COLUMNS))

    def test_exact_circuit_sweep(self):
        cfg = SweepConfig(num_states=10, shots_per_setting=0, backend="circuit", seed=6)
        result = bench.run_pure_sweep(cfg)
        self.assertLess(max(row.epsilon for row in result.rows), 1e-20)

    def test_deterministic_for_seed(self):
        cfg = SweepConfig(num_states=30, shots_per_setting=1000, backend="analytic", seed=42)
        self.assertEqual(bench.run_pure_sweep(cfg).rows, bench.run_pure_sweep(cfg).rows)

    def test_workers_do_not_change_rows(self):
        serial = SweepConfig(num_states=30, shots_per_setting=1000, backend="analytic", seed=42)
        threaded = SweepConfig(num_states=30, shots_per_setting=1000, backend="analytic", seed=42, workers=2)
        self.assertEqual(bench.run_pure_sweep(serial).rows, bench.run_pure_sweep(threaded).rows)

    # 10^4 disparos: mediana de epsilon en [1e-6, 1e-3] y sin correlación con la posición
    def test_sampled_error_level_and_correlation(self):
        cfg = SweepConfig(num_states=1000, shots_per_setting=10000, backend="analytic", seed=2024)
        result = bench.run_pure_sweep(cfg)
        self.assertGreaterEqual(result.aggregate.median, 1e-6)
        self.assertLessEqual(result.aggregate.median, 1e-3)
        self.assertLess(abs(result.correlation["theta"]), 0.1)
        self.assertLess(abs(result.correlation["phi"]), 0.1)

    # El ruido de disparo no debe reutilizar los números que fijaron la dirección
    def test_shot_noise_independent_of_direction(self):
        shots = 10000
        cfg = SweepConfig(num_states=3000, shots_per_setting=shots, backend="analytic", seed=20240601)
        residuals, cosines = [], []
        for row in bench.run_pure_sweep(cfg).rows:
            p = (1.0 - row.s_true[0] ** 2) / 2.0
            if p < 0.01:
                continue
            residuals.append((row.coincidences.p_axis1 - p) / np.sqrt(p * (1.0 - p) / shots))
            cosines.append(np.cos(row.theta))
        self.assertLess(abs(float(np.corrcoef(residuals, cosines)[0, 1])), 0.08)

    def test_aggregate_matches_rows(self):
        cfg = SweepConfig(num_states=25, shots_per_setting=500, backend="analytic", seed=8)
        result = bench.run_pure_sweep(cfg)
        errors = [row.epsilon for row in result.rows]
        self.assertAlmostEqual(result.aggregate.mean, float(np.mean(errors)), places=15)
        self.assertAlmostEqual(result.aggregate.median, float(np.median(errors)), places=15)


class TestDopSweep(unittest.TestCase):
    def test_rejects_pure_kind(self):
        with self.assertRaises(ParameterRangeError):
            bench.run_dop_sweep(SweepConfig(num_states=2, backend="analytic"), "pure")

    def test_exact_dop_estimates(self):
        for kind in ("internal", "external"):
            cfg = SweepConfig(num_states=10, shots_per_setting=0, backend="analytic", seed=11)
            result = bench.run_dop_sweep(cfg, kind)
            self.assertEqual(len(result.rows), 10 * len(cfg.dop_grid))
            for point in result.dop_points:
                self.assertAlmostEqual(point.dop_estimate.mean, point.dop, places=7)
                self.assertEqual(point.error.mean, 0.0)

    # Mezcla externa con DOP 0: todas las coincidencias valen 1/4
    def test_external_unpolarized_point(self):
        cfg = SweepConfig(num_states=5, shots_per_setting=0, backend="analytic", dop_grid=(0.0,), seed=12)
        result = bench.run_dop_sweep(cfg, "external")
        for row in result.rows:
            c = row.coincidences
            for value in (c.p_identity, c.p_axis1, c.p_axis2, c.p_axis3):
                self.assertAlmostEqual(value, 0.25, places=14)
            self.assertIs(tomo.classify(c.p_identity), Classification.EXTERNAL_OR_MIXTURE)

    def test_directions_shared_between_kinds(self):
        cfg = SweepConfig(num_states=5, shots_per_setting=0, backend="analytic", seed=13)
        internal = bench.run_dop_sweep(cfg, "internal")
        external = bench.run_dop_sweep(cfg, "external")
        self.assertEqual([(r.theta, r.phi) for r in internal.rows], [(r.theta, r.phi) for r in external.rows])

    # A igual DOP el error medio de ambas fuentes es comparable (factor 10)
    def test_internal_and_external_errors_comparable(self):
        cfg = SweepConfig(num_states=100, shots_per_setting=10000, backend="analytic",
                          dop_grid=(0.0, 0.5, 1.0), seed=17)
        internal = bench.run_dop_sweep(cfg, "internal")
        external = bench.run_dop_sweep(cfg, "external")
        for a, b in zip(internal.dop_points, external.dop_points):
            self.assertEqual(a.dop, b.dop)
            self.assertGreater(a.error.mean, 0.0)
            self.assertGreater(b.error.mean, 0.0)
            self.assertLess(max(a.error.mean, b.error.mean) / min(a.error.mean, b.error.mean), 10.0)

    # El estimador de DOP tiene sesgo positivo cerca de DOP 0; se comprueba en la zona alta
    def test_sampled_dop_accuracy(self):
        cfg = SweepConfig(num_states=100, shots_per_setting=10000, backend="analytic",
                          dop_grid=(0.75, 1.0), seed=14)
        for kind in ("internal", "external"):
            result = bench.run_dop_sweep(cfg, kind)
            for point in result.dop_points:
                self.assertLess(abs(point.dop_estimate.mean - point.dop), 0.02)


class TestShotsBenchmark(unittest.TestCase):
    def setUp(self):
        self.cfg = SweepConfig(num_states=200, backend="analytic", shots_grid=(100, 1000, 10000), seed=15)
        self.result = bench.run_shots_benchmark(self.cfg)

    def test_structure(self):
        self.assertEqual(len(self.result.points), 3)
        self.assertEqual([p.total_rounds for p in self.result.points], [300, 3000, 30000])
        payload = self.result.to_dict()
        self.assertIn("st_slope", payload)
        self.assertEqual(len(payload["points"]), 3)

    def test_error_decreases_with_shots(self):
        for method in ("st", "qst"):
            means = [getattr(p, method).mean for p in self.result.points]
            self.assertGreater(means[0], means[1])
            self.assertGreater(means[1], means[2])

    def test_slopes_near_inverse_shots(self):
        self.assertTrue(-1.4 <= self.result.st_slope <= -0.6)
        self.assertTrue(-1.4 <= self.result.qst_slope <= -0.6)

    def test_qst_not_worse_and_comparable(self):
        for point in self.result.points:
            self.assertLessEqual(point.qst.mean, point.st.mean + 2 * (point.st.stderr + point.qst.stderr))
        at_1e4 = self.result.points[1]
        self.assertLess(at_1e4.st.mean, 10 * at_1e4.qst.mean)

    def test_single_point_has_no_slope(self):
        cfg = SweepConfig(num_states=3, backend="analytic", shots_grid=(100,), seed=16)
        result = bench.run_shots_benchmark(cfg)
        self.assertIsNone(result.st_slope)
        self.assertIsNone(result.qst_slope)


if __name__ == "__main__":
    unittest.main()

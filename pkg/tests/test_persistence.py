import json
import tempfile
import unittest
from pathlib import Path

import numpy as np

from src.infrastructure.persistence.manifest import MANIFEST_NAME, RunManifest
from src.infrastructure.persistence.results_writer import read_json, read_rows_csv, write_json, write_rows_csv


class TestResultsWriter(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    # 17 cifras significativas: el float se recupera bit a bit
    def test_csv_float_precision(self):
        value = 0.1 + 0.2
        path = write_rows_csv(self.dir / "nested" / "rows.csv", ("i", "x"), [(0, value), (1, np.float64(1e-20))])
        columns, rows = read_rows_csv(path)
        self.assertEqual(columns, ["i", "x"])
        self.assertEqual(rows[0], ["0", "0.30000000000000004"])
        self.assertEqual(float(rows[0][1]), value)
        self.assertEqual(float(rows[1][1]), 1e-20)

    def test_csv_row_length_checked(self):
        with self.assertRaises(ValueError):
            write_rows_csv(self.dir / "bad.csv", ("a", "b"), [(1,)])

    def test_json_sorted_and_plain(self):
        payload = {"b": np.float64(0.5), "a": (1, 2), "c": np.arange(3), "d": self.dir}
        path = write_json(self.dir / "out.json", payload)
        text = path.read_text(encoding="utf-8")
        self.assertTrue(text.endswith("\n"))
        self.assertLess(text.index('"a"'), text.index('"b"'))
        self.assertEqual(read_json(path), {"a": [1, 2], "b": 0.5, "c": [0, 1, 2], "d": str(self.dir)})

    # La representación corta de JSON recupera el mismo float de 64 bits
    def test_json_floats_round_trip(self):
        values = [0.1 + 0.2, 1.0 / 3.0, np.pi * 1e-17, float(np.nextafter(1.0, 2.0))]
        path = write_json(self.dir / "floats.json", {"values": values})
        self.assertEqual(read_json(path)["values"], values)

    def test_json_rejects_nan(self):
        with self.assertRaises(ValueError):
            write_json(self.dir / "nan.json", {"x": float("nan")})


class TestManifest(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_round_trip(self):
        manifest = RunManifest(command="sweep", config={"num_states": 3, "kind": "pure"}, seed=9, version="1.0.0")
        manifest.finish(["rows.csv", "aggregate.json"])
        path = manifest.write(self.dir)
        self.assertEqual(path.name, MANIFEST_NAME)
        loaded = RunManifest.load(self.dir)
        self.assertEqual(loaded, manifest)
        self.assertEqual(loaded.outputs, ["aggregate.json", "rows.csv"])
        self.assertIsNotNone(loaded.finished_at)

    def test_incomplete_manifest_rejected(self):
        path = self.dir / MANIFEST_NAME
        path.write_text(json.dumps({"command": "tomo"}), encoding="utf-8")
        with self.assertRaises(ValueError):
            RunManifest.load(path)


if __name__ == "__main__":
    unittest.main()

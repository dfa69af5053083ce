import json
import tempfile
from pathlib import Path

from django.conf import settings
from django.test import TestCase, override_settings

from lab.exceptions import TableError, UnknownKnotError
from lab.models import Knot
from lab.serializers import KnotEntrySerializer, KnotSerializer
from lab.table import get_knot, load_table, read_table, store_table


class TableFileMixin:
    def setUp(self):
        super().setUp()
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def write(self, document, name="table.json"):
        path = Path(self.tmp.name) / name
        text = document if isinstance(document, str) else json.dumps(document)
        path.write_text(text, encoding="utf-8")
        return path


class KnotEntrySerializerTests(TestCase):
    def test_valid_entry(self):
        serializer = KnotEntrySerializer(data={"name": "3_1", "pd": [[4, 2, 5, 1], [6, 4, 1, 3], [2, 6, 3, 5]]})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.validated_data["loops"], 0)

    def test_bad_pd(self):
        serializer = KnotEntrySerializer(data={"name": "bad", "pd": [[1, 2, 3, 4]]})
        self.assertFalse(serializer.is_valid())
        self.assertIn("pd", serializer.errors)

    def test_blank_diagram(self):
        serializer = KnotEntrySerializer(data={"name": "empty", "pd": []})
        self.assertFalse(serializer.is_valid())

    def test_name_without_spaces(self):
        serializer = KnotEntrySerializer(data={"name": "four one", "pd": [], "loops": 1})
        self.assertFalse(serializer.is_valid())
        self.assertIn("name", serializer.errors)

    def test_volume_must_be_decimal(self):
        serializer = KnotEntrySerializer(data={"name": "u", "pd": [], "loops": 1, "vol": "big"})
        self.assertFalse(serializer.is_valid())
        self.assertIn("vol", serializer.errors)

    def test_zero_a_polynomial(self):
        serializer = KnotEntrySerializer(data={"name": "u", "pd": [], "loops": 1, "a_poly": [[0, 1, 1]]})
        self.assertFalse(serializer.is_valid())
        self.assertIn("a_poly", serializer.errors)

    def test_anchor_is_parsed(self):
        serializer = KnotEntrySerializer(data={"name": "u", "pd": [], "loops": 1, "ics_anchor": "1+x"})
        self.assertFalse(serializer.is_valid())
        self.assertIn("ics_anchor", serializer.errors)


class ReadTableTests(TableFileMixin, TestCase):
    def test_shipped_table(self):
        table = load_table()
        self.assertEqual(sorted(table), ["3_1", "4_1", "unknot"])
        self.assertTrue(table["4_1"].has_closed_form)
        self.assertEqual(len(table["4_1"].a_polynomial.terms), 12)
        self.assertIsNone(table["unknot"].a_polynomial)

    def test_missing_file(self):
        with self.assertRaises(TableError):
            read_table(Path(self.tmp.name) / "nope.json")

    def test_invalid_json(self):
        with self.assertRaises(TableError):
            read_table(self.write("{not json"))

    def test_duplicate_names(self):
        entry = {"name": "unknot", "pd": [], "loops": 1}
        with self.assertRaisesMessage(TableError, "Duplicate knot names: unknot"):
            read_table(self.write({"knots": [entry, entry]}))

    def test_error_paths_are_reported(self):
        document = {"knots": [{"name": "ok", "pd": [], "loops": 1}, {"name": "bad", "pd": [[1, 2, 3, 4]]}]}
        with self.assertRaisesMessage(TableError, "knots.1.pd"):
            read_table(self.write(document))


class StoreTableTests(TableFileMixin, TestCase):
    def test_store_and_update(self):
        self.assertEqual(store_table(), (3, 0))
        self.assertEqual(store_table(), (0, 3))
        self.assertEqual(Knot.objects.count(), 3)
        data = KnotSerializer(Knot.objects.get(name="4_1")).data
        self.assertEqual(data["crossings"], 4)
        self.assertTrue(data["closed_form"])

    def test_database_rows_take_precedence(self):
        store_table()
        Knot.objects.filter(name="3_1").update(vol="1.5")
        self.assertEqual(str(get_knot("3_1").known_volume), "1.5")

    def test_explicit_path_skips_database(self):
        store_table()
        path = self.write({"knots": [{"name": "unknot", "pd": [], "loops": 2, "is_link": True}]})
        self.assertEqual(get_knot("unknot", path).diagram.loops, 2)
        with self.assertRaises(UnknownKnotError):
            get_knot("4_1", path)

    def test_unknown_knot(self):
        with self.assertRaises(UnknownKnotError):
            get_knot("nosuch")

    def test_default_path_setting(self):
        path = self.write({"knots": [{"name": "hopf", "pd": [[4, 1, 3, 2], [2, 3, 1, 4]], "is_link": True}]})
        with override_settings(KNOTLAB_TABLE_PATH=path):
            self.assertEqual(settings.KNOTLAB_TABLE_PATH, path)
            self.assertEqual(get_knot("hopf").diagram.components(), 2)

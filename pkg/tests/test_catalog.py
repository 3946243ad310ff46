import json
import random

import pytest

from cmforge.catalog import (
    Catalog,
    CatalogError,
    load_catalog,
    load_channel_profiles,
    load_rule_sets,
    save_catalog,
)
from cmforge.dsl import serialize_templates
from cmforge.model import DEFAULT_FORMATS, Format, StructuralPartKind

from helpers import rand_template_spec

VALID_ONE = """\
template "alpha" {
  channel: "google_adwords"
  part title {
    semantics: [usp_focus]
    format: argument
    budget: 60
    text: "One"
  }
}
"""

VALID_TWO = VALID_ONE.replace('"alpha"', '"beta"').replace("One", "Two")


class TestLoadCatalog:
    def test_empty_directory(self, tmp_path):
        catalog = load_catalog(tmp_path)
        assert len(catalog) == 0

    def test_two_valid_templates(self, tmp_path):
        (tmp_path / "a.cmt").write_text(VALID_ONE, encoding="utf-8")
        (tmp_path / "b.cmt").write_text(VALID_TWO, encoding="utf-8")
        catalog = load_catalog(tmp_path)
        assert sorted(catalog.templates) == ["alpha", "beta"]

    def test_recursive_loading(self, tmp_path):
        (tmp_path / "sub").mkdir()
        (tmp_path / "a.cmt").write_text(VALID_ONE, encoding="utf-8")
        (tmp_path / "sub" / "b.cmt").write_text(VALID_TWO, encoding="utf-8")
        assert len(load_catalog(tmp_path)) == 2

    def test_duplicate_id_names_both_files(self, tmp_path):
        (tmp_path / "a.cmt").write_text(VALID_ONE, encoding="utf-8")
        (tmp_path / "b.cmt").write_text(VALID_ONE, encoding="utf-8")
        with pytest.raises(CatalogError) as exc_info:
            load_catalog(tmp_path)
        [issue] = exc_info.value.issues
        assert "duplicate template id 'alpha'" in issue.message
        assert issue.path.endswith("b.cmt")
        assert "a.cmt" in issue.message

    def test_missing_directory(self, tmp_path):
        with pytest.raises(CatalogError, match="does not exist"):
            load_catalog(tmp_path / "nope")

    def test_errors_aggregated_across_files(self, tmp_path):
        (tmp_path / "bad1.cmt").write_text(
            VALID_ONE.replace("budget: 60", "budget: -1"), encoding="utf-8"
        )
        (tmp_path / "bad2.cmt").write_text(
            VALID_TWO.replace("format: argument", "format: sonnet"), encoding="utf-8"
        )
        (tmp_path / "good.cmt").write_text(
            VALID_ONE.replace('"alpha"', '"gamma"'), encoding="utf-8"
        )
        with pytest.raises(CatalogError) as exc_info:
            load_catalog(tmp_path)
        paths = {issue.path for issue in exc_info.value.issues}
        assert any(p.endswith("bad1.cmt") for p in paths)
        assert any(p.endswith("bad2.cmt") for p in paths)

    def test_no_partial_catalog_on_error(self, tmp_path):
        (tmp_path / "good.cmt").write_text(VALID_ONE, encoding="utf-8")
        (tmp_path / "bad.cmt").write_text("template oops", encoding="utf-8")
        with pytest.raises(CatalogError):
            load_catalog(tmp_path)

    def test_invalid_utf8_reported(self, tmp_path):
        (tmp_path / "bad.cmt").write_bytes(b'template "x" {\xff\xfe}')
        with pytest.raises(CatalogError, match="invalid UTF-8"):
            load_catalog(tmp_path)

    def test_format_declared_in_sibling_file(self, tmp_path):
        (tmp_path / "vocab.cmt").write_text("format sonnet\n", encoding="utf-8")
        (tmp_path / "a.cmt").write_text(
            VALID_ONE.replace("format: argument", "format: sonnet"), encoding="utf-8"
        )
        catalog = load_catalog(tmp_path)
        assert Format("sonnet") in catalog.formats
        assert catalog.templates["alpha"].parts[0].format == Format("sonnet")

    def test_multi_template_file(self, tmp_path):
        (tmp_path / "both.cmt").write_text(VALID_ONE + "\n" + VALID_TWO, encoding="utf-8")
        assert len(load_catalog(tmp_path)) == 2


class TestSaveCatalog:
    def test_round_trip_identity(self, tmp_path):
        rng = random.Random(13)
        specs = {f"tpl_{i}": rand_template_spec(rng, ident=f"tpl_{i}") for i in range(8)}
        formats = DEFAULT_FORMATS | frozenset(
            f for spec in specs.values() for f in spec.formats()
        )
        catalog = Catalog(templates=specs, formats=formats)
        save_catalog(catalog, tmp_path / "out")
        assert load_catalog(tmp_path / "out") == catalog

    def test_empty_catalog_creates_directory(self, tmp_path):
        target = tmp_path / "empty"
        written = save_catalog(Catalog(templates={}), target)
        assert target.is_dir() and written == []
        assert len(load_catalog(target)) == 0

    def test_one_file_per_template(self, tmp_path):
        rng = random.Random(14)
        catalog_dir = tmp_path / "c"
        spec = rand_template_spec(rng, ident="only_one")
        formats = DEFAULT_FORMATS | spec.formats()
        save_catalog(Catalog(templates={"only_one": spec}, formats=formats), catalog_dir)
        names = {p.name for p in catalog_dir.glob("*.cmt")}
        assert "only_one.cmt" in names

    def test_unused_declared_format_survives_round_trip(self, tmp_path):
        catalog = Catalog(templates={}, formats=DEFAULT_FORMATS | {Format("sonnet")})
        save_catalog(catalog, tmp_path / "v")
        assert load_catalog(tmp_path / "v").formats == catalog.formats

    def test_load_order_independence(self, tmp_path):
        rng = random.Random(15)
        specs = [rand_template_spec(rng, ident=f"t_{i}") for i in range(6)]
        dir_a = tmp_path / "a"
        dir_b = tmp_path / "b"
        dir_a.mkdir()
        dir_b.mkdir()
        # Same templates, grouped into files differently and created in a
        # different order.
        declared = frozenset(f for s in specs for f in s.formats()) | DEFAULT_FORMATS
        (dir_a / "one.cmt").write_text(serialize_templates(specs, declared), encoding="utf-8")
        for i, spec in enumerate(reversed(specs)):
            (dir_b / f"f{i}.cmt").write_text(
                serialize_templates([spec], declared), encoding="utf-8"
            )
        assert load_catalog(dir_a) == load_catalog(dir_b)


class TestCatalogInvariants:
    def test_key_must_match_template_id(self):
        rng = random.Random(16)
        spec = rand_template_spec(rng, ident="real_name")
        with pytest.raises(ValueError, match="does not match"):
            Catalog(templates={"wrong_name": spec}, formats=DEFAULT_FORMATS | spec.formats())

    def test_undeclared_format_rejected(self):
        rng = random.Random(17)
        spec = rand_template_spec(rng, ident="t")
        extra = spec.formats() - DEFAULT_FORMATS
        if extra:
            with pytest.raises(ValueError, match="undeclared format"):
                Catalog(templates={"t": spec}, formats=DEFAULT_FORMATS)


class TestChannelProfiles:
    def test_shipped_defaults_carry_platform_limits(self, demo_paths):
        profiles = {p.id: p for p in load_channel_profiles(demo_paths.channels_file)}
        adwords = profiles["google_adwords"]
        assert adwords.budgets[StructuralPartKind.TITLE].base == 60
        assert adwords.budgets[StructuralPartKind.TITLE].extension == 0
        yandex = profiles["yandex_direct"]
        assert yandex.budgets[StructuralPartKind.TITLE].base == 35
        assert yandex.budgets[StructuralPartKind.TITLE].extension == 30

    def test_negative_base_error_names_path(self, tmp_path):
        doc = {"channels": [{"id": "c", "budgets": {"title": {"base": -2}}, "required": []}]}
        path = tmp_path / "channels.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        with pytest.raises(CatalogError) as exc_info:
            load_channel_profiles(path)
        assert "$.channels[0].budgets.title.base" in exc_info.value.issues[0].message

    def test_missing_file(self, tmp_path):
        with pytest.raises(CatalogError, match="cannot read"):
            load_channel_profiles(tmp_path / "missing.json")


class TestRuleSets:
    def test_loads_by_name(self, demo_paths):
        rulesets = load_rule_sets(demo_paths.rules_dir)
        assert "demo" in rulesets
        assert len(rulesets["demo"]) == 3

    def test_bad_rules_reported_with_path(self, tmp_path):
        rules_dir = tmp_path / "rules"
        rules_dir.mkdir()
        (rules_dir / "broken.rules.json").write_text('{"rules": "nope"}', encoding="utf-8")
        with pytest.raises(CatalogError) as exc_info:
            load_rule_sets(rules_dir)
        assert exc_info.value.issues[0].path.endswith("broken.rules.json")

    def test_missing_rules_directory(self, tmp_path):
        with pytest.raises(CatalogError, match="does not exist"):
            load_rule_sets(tmp_path / "rules")

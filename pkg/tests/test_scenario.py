import pytest

from parley import Point, ScenarioError, load_scenario, parse_scenario_text
from parley.scenario import PRESETS, scenario_text

GOOD = """
[domain]
k = 10

[party1]
a1 = 1
a2 = 0
a3 = 4

[party2]
a1 = 0
a2 = 1
a3 = 7/3

[start]
x1 = 5
x2 = 4
"""


class TestPresets:
    def test_paper_preset(self):
        sc = load_scenario("paper-triangle")
        assert sc.domain.k == 10.0
        assert (sc.true1.a1, sc.true1.a2, sc.true1.a3) == (1.0, 0.0, 4.0)
        assert sc.true2.a3 == pytest.approx(7 / 3)
        assert sc.x0 == Point(5.0, 4.0)
        assert sc.label == "paper-triangle"

    def test_all_presets_load(self):
        for name in PRESETS:
            sc = load_scenario(name)
            assert sc.domain.contains(sc.x0, strict=True)


class TestParsing:
    def test_parse_with_fraction(self):
        sc = parse_scenario_text(GOOD, label="fixture")
        assert sc.true2.a3 == pytest.approx(7 / 3)
        assert sc.label == "fixture"

    def test_label_from_section(self):
        sc = parse_scenario_text(GOOD + "\n[scenario]\nlabel = custom\n")
        assert sc.label == "custom"

    def test_round_trip(self):
        sc = load_scenario("paper-triangle")
        again = parse_scenario_text(scenario_text(sc))
        assert again == sc

    def test_file_loading_uses_stem_as_label(self, tmp_path):
        path = tmp_path / "my-case.ini"
        path.write_text(GOOD)
        sc = load_scenario(str(path))
        assert sc.label == "my-case"

    def test_unknown_name(self):
        with pytest.raises(ScenarioError, match="neither a preset"):
            load_scenario("no-such-preset")

    def test_missing_section_named(self):
        with pytest.raises(ScenarioError, match=r"\[party2\]"):
            parse_scenario_text(GOOD.replace("[party2]", "[party3]"))

    def test_missing_key_named(self):
        with pytest.raises(ScenarioError, match="a3"):
            parse_scenario_text(GOOD.replace("a3 = 4", "zz = 4", 1))

    def test_bad_number_named(self):
        with pytest.raises(ScenarioError, match="k"):
            parse_scenario_text(GOOD.replace("k = 10", "k = ten"))

    def test_infeasible_start_rejected(self):
        with pytest.raises(ScenarioError, match="interior"):
            parse_scenario_text(GOOD.replace("x1 = 5", "x1 = 9"))

    def test_invalid_coefficients_rejected(self):
        with pytest.raises(ScenarioError):
            parse_scenario_text(GOOD.replace("a3 = 4", "a3 = -4", 1))

"""Scenario presets and the key-value scenario file format.

A scenario file is INI-style text with sections [domain], [party1],
[party2], [start] and an optional [scenario] section carrying a label:

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

Numbers accept plain floats or fractions like 7/3.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass

from .domain import Point, TriangularDomain, UtilitySpec
from .errors import ScenarioError


@dataclass(frozen=True)
class Scenario:
    domain: TriangularDomain
    true1: UtilitySpec
    true2: UtilitySpec
    x0: Point
    label: str

    def __post_init__(self):
        if self.true1.k != self.domain.k or self.true2.k != self.domain.k:
            raise ScenarioError("party resource caps must match the domain cap")
        if not self.domain.contains(self.x0, strict=True):
            raise ScenarioError(f"start point {self.x0} is not strictly interior")


def _preset_paper() -> Scenario:
    k = 10.0
    return Scenario(domain=TriangularDomain(k),
                    true1=UtilitySpec(1.0, 0.0, 4.0, k),
                    true2=UtilitySpec(0.0, 1.0, 7.0 / 3.0, k),
                    x0=Point(5.0, 4.0),
                    label="paper-triangle")


def _preset_symmetric() -> Scenario:
    k = 10.0
    return Scenario(domain=TriangularDomain(k),
                    true1=UtilitySpec(1.0, 0.0, 1.0, k),
                    true2=UtilitySpec(0.0, 1.0, 1.0, k),
                    x0=Point(3.0, 3.0),
                    label="symmetric-triangle")


PRESETS = {
    "paper-triangle": _preset_paper,
    "symmetric-triangle": _preset_symmetric,
}


def _number(section: str, key: str, text: str) -> float:
    """Parse a float or a/b fraction, naming the offending key on failure."""
    text = text.strip()
    try:
        if "/" in text:
            num, den = text.split("/", 1)
            return float(num) / float(den)
        return float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ScenarioError(f"invalid number for [{section}] {key}: {text!r}") from exc


def _get(parser: configparser.ConfigParser, section: str, key: str) -> float:
    if not parser.has_section(section):
        raise ScenarioError(f"missing section [{section}]")
    if not parser.has_option(section, key):
        raise ScenarioError(f"missing key {key!r} in section [{section}]")
    return _number(section, key, parser.get(section, key))


def parse_scenario_text(text: str, label: str = "scenario") -> Scenario:
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ScenarioError(f"scenario parse error: {exc}") from exc
    k = _get(parser, "domain", "k")
    if parser.has_option("domain", "interior_margin"):
        margin = _number("domain", "interior_margin",
                         parser.get("domain", "interior_margin"))
        domain = TriangularDomain(k, margin)
    else:
        domain = TriangularDomain(k)
    coeffs = {}
    for section in ("party1", "party2"):
        coeffs[section] = tuple(_get(parser, section, key)
                                for key in ("a1", "a2", "a3"))
    x0 = Point(_get(parser, "start", "x1"), _get(parser, "start", "x2"))
    if parser.has_option("scenario", "label"):
        label = parser.get("scenario", "label").strip()
    try:
        return Scenario(domain=domain,
                        true1=UtilitySpec(*coeffs["party1"], k),
                        true2=UtilitySpec(*coeffs["party2"], k),
                        x0=x0, label=label)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc


def load_scenario(name_or_path: str) -> Scenario:
    """Resolve a preset name or parse a scenario file."""
    if name_or_path in PRESETS:
        return PRESETS[name_or_path]()
    if not os.path.exists(name_or_path):
        raise ScenarioError(
            f"{name_or_path!r} is neither a preset ({', '.join(sorted(PRESETS))}) "
            f"nor an existing file")
    with open(name_or_path, "r", encoding="utf-8") as fh:
        text = fh.read()
    stem = os.path.splitext(os.path.basename(name_or_path))[0]
    return parse_scenario_text(text, label=stem)


def scenario_text(sc: Scenario) -> str:
    """Serialize a scenario back to the file format."""
    lines = [
        "[scenario]", f"label = {sc.label}", "",
        "[domain]", f"k = {sc.domain.k!r}",
        f"interior_margin = {sc.domain.interior_margin!r}", "",
        "[party1]", f"a1 = {sc.true1.a1!r}", f"a2 = {sc.true1.a2!r}",
        f"a3 = {sc.true1.a3!r}", "",
        "[party2]", f"a1 = {sc.true2.a1!r}", f"a2 = {sc.true2.a2!r}",
        f"a3 = {sc.true2.a3!r}", "",
        "[start]", f"x1 = {sc.x0.x1!r}", f"x2 = {sc.x0.x2!r}",
    ]
    return "\n".join(lines) + "\n"

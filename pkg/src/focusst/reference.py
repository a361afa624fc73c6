"""The bundled steam-boiler system and the behaviour expected of it."""
from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import UnknownReference
from .loader import load_network
from .model import Network

COMMON = ("steamboiler.fst", "converter.fst", "systemreq.fst")


@dataclass(frozen=True)
class ReferenceCase:
    name: str
    sources: tuple
    network_file: str
    expected_verdicts: dict = field(default_factory=dict)
    # name -> (value, provenance); STATED values come with the system description,
    # DERIVED ones from analysis of the closed loop
    bounded_facts: dict = field(default_factory=dict)


FACTS = {
    "initial_water_level": (500, "STATED"),
    "lower_limit": (200, "STATED"),
    "upper_limit": (800, "STATED"),
    "pump_on_threshold": (300, "STATED"),
    "pump_off_threshold": (700, "STATED"),
    "drift_range": ((1, 10), "STATED"),
    "envelope_min": (281, "DERIVED"),
    "envelope_max": (719, "DERIVED"),
}


def _expected(controller_rules):
    labels = ["boiler.A1", "boiler.I1", "boiler.B2", "boiler.B1", "controller.A1"]
    labels += [f"controller.B{k}" for k in range(1, controller_rules + 1)]
    labels += ["converter.A1", "converter.B2", "converter.B3", "converter.B1",
               "SystemReq.A1", "SystemReq.B1", "SystemReq.B2"]
    return {lab: "Satisfied" for lab in labels}


REFERENCES = {
    "steamboiler-rules": ReferenceCase(
        "steamboiler-rules", COMMON + ("controller.fst",), "steamboiler-rules.fst",
        _expected(4), FACTS),
    "steamboiler-ifthenelse": ReferenceCase(
        "steamboiler-ifthenelse", COMMON + ("controller_ifthenelse.fst",),
        "steamboiler-ifthenelse.fst", _expected(1), FACTS),
}


def specs_dir() -> Path:
    return Path(str(resources.files("focusst") / "specs"))


def load_reference(name: str) -> tuple[Network, ReferenceCase]:
    case = REFERENCES.get(name)
    if case is None:
        raise UnknownReference(f"unknown reference {name!r}; known: {', '.join(sorted(REFERENCES))}")
    return load_network(specs_dir() / case.network_file), case

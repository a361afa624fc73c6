"""Locating and loading ``.fst`` files, including a network's ``uses`` clauses."""
from __future__ import annotations

import errno
import os
from pathlib import Path

from .model import Diagnostic, Network, Severity, SourceSpan
from .errors import SpecError
from .parser import SourceUnit, parse_source, resolve_network

SPEC_PATH_ENV = "FOCUS_ST_SPEC_PATH"


def search_path(extra=()) -> list:
    """Explicit directories first, then the entries of ``FOCUS_ST_SPEC_PATH``."""
    dirs = [Path(d) for d in extra]
    env = os.environ.get(SPEC_PATH_ENV, "")
    dirs += [Path(d) for d in env.split(os.pathsep) if d]
    return dirs


def find_file(name, base: Path | None = None, extra=()) -> Path:
    p = Path(name)
    candidates = [p] if p.is_absolute() else \
        ([base / p] if base is not None else []) + [p] + [d / p for d in search_path(extra)]
    for c in candidates:
        if c.is_file():
            return c
    searched = ", ".join(str(c) for c in candidates)
    raise FileNotFoundError(errno.ENOENT, f"no such file (searched {searched})", str(name))


def load_source(path) -> SourceUnit:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return parse_source(text, str(path))


def load_network(path, extra=(), registry: dict | None = None) -> Network:
    """Load the network declared in ``path``; ``uses`` files are parsed for its components."""
    path = Path(path)
    unit = load_source(path)
    if len(unit.networks) != 1:
        raise SpecError([Diagnostic(Severity.ERROR,
                                    f"expected exactly one network, found {len(unit.networks)}",
                                    SourceSpan(str(path), 1, 1, 1))])
    decl = unit.networks[0]
    reg = dict(registry or {})
    for used in decl.uses:
        for spec in load_source(find_file(used.strip('"'), path.parent, extra)).specs:
            reg[spec.name] = spec
    for spec in unit.specs:
        reg[spec.name] = spec
    return resolve_network(decl, reg)

"""Sp-objects: spatial state of physical objects and their containment constraints.

All geometry is over natural numbers.  The module validates snapshots only;
how locations and zones evolve over time is up to component behaviour.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import EmptySubcomponents, TypeMismatch


def _nat(name, v):
    if type(v) is not int or v < 0:
        raise TypeMismatch(f"{name} must be a natural number, got {v!r}")


@dataclass(frozen=True)
class Space:
    xx: int
    yy: int

    def __post_init__(self):
        _nat("xx", self.xx)
        _nat("yy", self.yy)


@dataclass(frozen=True)
class Direction:
    angle: int

    def __post_init__(self):
        if type(self.angle) is not int or not 0 <= self.angle <= 359:
            raise TypeMismatch(f"direction must be an angle in 0..359, got {self.angle!r}")


@dataclass(frozen=True)
class Zone:
    minX: int
    minY: int
    maxX: int
    maxY: int

    def __post_init__(self):
        for name in ("minX", "minY", "maxX", "maxY"):
            _nat(name, getattr(self, name))
        if self.minX > self.maxX or self.minY > self.maxY:
            raise TypeMismatch(f"degenerate zone {self.as_tuple()}")

    def as_tuple(self):
        return (self.minX, self.minY, self.maxX, self.maxY)

    def contains(self, other: "Zone") -> bool:
        return (self.minX <= other.minX and self.minY <= other.minY
                and self.maxX >= other.maxX and self.maxY >= other.maxY)

    def translate(self, dx: int, dy: int) -> "Zone":
        return Zone(self.minX + dx, self.minY + dy, self.maxX + dx, self.maxY + dy)


@dataclass(frozen=True)
class SpObject:
    """An sp-object snapshot.

    ``rad`` may be omitted for composite objects, in which case it is computed
    from the subcomponents; a declared value that disagrees is rejected.
    """
    name: str
    location: Space
    rzone: Zone
    rad: int | None = None
    speed: int = 0
    direction: Direction = field(default_factory=lambda: Direction(0))
    subcomponents: tuple["SpObject", ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "subcomponents", tuple(self.subcomponents))
        _nat("speed", self.speed)
        if self.subcomponents:
            expected = composite_rad(self.subcomponents)
            if self.rad is None:
                object.__setattr__(self, "rad", expected)
            elif self.rad != expected:
                raise TypeMismatch(
                    f"{self.name}: declared rad {self.rad} differs from composite rad {expected}")
        elif self.rad is None:
            raise TypeMismatch(f"elementary sp-object {self.name} needs a declared rad")
        _nat("rad", self.rad)


@dataclass(frozen=True)
class Violation:
    parent: str
    child: str
    bound: str
    detail: str

    def __str__(self):
        return f"{self.parent}/{self.child}: {self.bound}: {self.detail}"


def composite_rad(subs) -> int:
    """Worst-case radius of a composite: half its subcomponents' bounding box, rounded up."""
    subs = list(subs)
    if not subs:
        raise EmptySubcomponents("composite_rad needs at least one subcomponent")
    wcx = max(c.rzone.maxX for c in subs) - min(c.rzone.minX for c in subs)
    wcy = max(c.rzone.maxY for c in subs) - min(c.rzone.minY for c in subs)
    return -(-max(wcx, wcy) // 2)


def check_zone_nesting(S: SpObject) -> list[Violation]:
    """Every subcomponent's zone must lie inside its parent's, at every level."""
    out = []
    for C in S.subcomponents:
        checks = (
            ("minX", S.rzone.minX <= C.rzone.minX, f"{S.rzone.minX} > {C.rzone.minX}"),
            ("minY", S.rzone.minY <= C.rzone.minY, f"{S.rzone.minY} > {C.rzone.minY}"),
            ("maxX", S.rzone.maxX >= C.rzone.maxX, f"{S.rzone.maxX} < {C.rzone.maxX}"),
            ("maxY", S.rzone.maxY >= C.rzone.maxY, f"{S.rzone.maxY} < {C.rzone.maxY}"),
        )
        out.extend(Violation(S.name, C.name, b, d) for b, ok, d in checks if not ok)
        out.extend(check_zone_nesting(C))
    return out


def check_margin(S: SpObject) -> list[Violation]:
    """Left-margin constraint: ``S.rzone.minX + C.rad <= C.location.xx`` for each subcomponent.

    This is the binding case of the constraint quantified over all
    ``k <= S.rzone.minX``.  Applied recursively.
    """
    out = []
    for C in S.subcomponents:
        if S.rzone.minX + C.rad > C.location.xx:
            out.append(Violation(S.name, C.name, "margin-x",
                                 f"{S.rzone.minX} + {C.rad} > {C.location.xx}"))
        out.extend(check_margin(C))
    return out


def check_margin_symmetric(S: SpObject) -> list[Violation]:
    """Extension, not part of the default checks: the margin on all four sides."""
    out = []
    for C in S.subcomponents:
        loc, r, z = C.location, C.rad, S.rzone
        if z.minX + r > loc.xx:
            out.append(Violation(S.name, C.name, "margin-minX", f"{z.minX} + {r} > {loc.xx}"))
        if z.minY + r > loc.yy:
            out.append(Violation(S.name, C.name, "margin-minY", f"{z.minY} + {r} > {loc.yy}"))
        if loc.xx + r > z.maxX:
            out.append(Violation(S.name, C.name, "margin-maxX", f"{loc.xx} + {r} > {z.maxX}"))
        if loc.yy + r > z.maxY:
            out.append(Violation(S.name, C.name, "margin-maxY", f"{loc.yy} + {r} > {z.maxY}"))
        out.extend(check_margin_symmetric(C))
    return out


def check_speed_limit(obj: SpObject, limit: int) -> bool:
    return obj.speed <= limit


def check_all(S: SpObject, symmetric_margin: bool = False) -> list[Violation]:
    out = check_zone_nesting(S) + check_margin(S)
    if symmetric_margin:
        out += check_margin_symmetric(S)
    return out


def to_json(obj: SpObject) -> dict:
    return {
        "name": obj.name,
        "rad": obj.rad,
        "location": [obj.location.xx, obj.location.yy],
        "speed": obj.speed,
        "direction": obj.direction.angle,
        "rzone": list(obj.rzone.as_tuple()),
        "subcomponents": [to_json(c) for c in obj.subcomponents],
    }


def from_json(data: dict) -> SpObject:
    subs = tuple(from_json(c) for c in data.get("subcomponents", []))
    return SpObject(
        name=data["name"],
        location=Space(*data["location"]),
        rzone=Zone(*data["rzone"]),
        rad=data.get("rad"),
        speed=data.get("speed", 0),
        direction=Direction(data.get("direction", 0)),
        subcomponents=subs,
    )

import random

import pytest

from focusst.errors import EmptySubcomponents, TypeMismatch
from focusst.spatial import (
    Direction, SpObject, Space, Zone, check_all, check_margin, check_margin_symmetric,
    check_speed_limit, check_zone_nesting, composite_rad, from_json, to_json,
)


def leaf(zone, name="c", loc=None, rad=None):
    z = Zone(*zone)
    if loc is None:
        loc = ((z.minX + z.maxX) // 2, (z.minY + z.maxY) // 2)
    if rad is None:
        rad = (max(z.maxX - z.minX, z.maxY - z.minY) + 1) // 2
    return SpObject(name, Space(*loc), z, rad)


def brute_rad(zones):
    # scan every corner point for the extreme coordinates, then halve rounding up
    xs = [x for z in zones for x in (z[0], z[2])]
    ys = [y for z in zones for y in (z[1], z[3])]
    wcx = max(a - b for a in xs for b in xs)
    wcy = max(a - b for a in ys for b in ys)
    w = max(wcx, wcy)
    r = 0
    while 2 * r < w:
        r += 1
    return r


def random_zone(rng, lim=50):
    x0, y0 = rng.randint(0, lim), rng.randint(0, lim)
    return (x0, y0, x0 + rng.randint(0, lim), y0 + rng.randint(0, lim))


class TestCompositeRad:
    def test_examples(self):
        assert composite_rad([leaf((0, 0, 10, 4))]) == 5
        assert composite_rad([leaf((0, 0, 2, 2)), leaf((4, 0, 6, 2))]) == 3
        assert composite_rad([leaf((5, 5, 5, 5))]) == 0

    def test_rounds_up(self):
        assert composite_rad([leaf((0, 0, 7, 1))]) == 4

    def test_empty(self):
        with pytest.raises(EmptySubcomponents):
            composite_rad([])

    def test_brute_force_oracle(self):
        rng = random.Random(7)
        for _ in range(1000):
            zones = [random_zone(rng) for _ in range(rng.randint(1, 5))]
            assert composite_rad([leaf(z) for z in zones]) == brute_rad(zones)

    def test_translation_invariant(self):
        rng = random.Random(8)
        for _ in range(200):
            zones = [random_zone(rng) for _ in range(rng.randint(1, 4))]
            dx, dy = rng.randint(0, 30), rng.randint(0, 30)
            moved = [leaf(Zone(*z).translate(dx, dy).as_tuple()) for z in zones]
            assert composite_rad(moved) == composite_rad([leaf(z) for z in zones])

    def test_composite_rad_filled_in_and_checked(self):
        subs = (leaf((0, 0, 10, 4)),)
        obj = SpObject("S", Space(5, 2), Zone(0, 0, 10, 4), subcomponents=subs)
        assert obj.rad == 5
        with pytest.raises(TypeMismatch):
            SpObject("S", Space(5, 2), Zone(0, 0, 10, 4), rad=4, subcomponents=subs)

    def test_elementary_needs_rad(self):
        with pytest.raises(TypeMismatch):
            SpObject("e", Space(0, 0), Zone(0, 0, 1, 1))


class TestNesting:
    def parent(self, zone, *subs):
        return SpObject("S", Space(5, 5), Zone(*zone), subcomponents=subs)

    def test_strict(self):
        assert check_zone_nesting(self.parent((0, 0, 10, 10), leaf((2, 2, 8, 8)))) == []

    def test_equal_zone(self):
        assert check_zone_nesting(self.parent((0, 0, 10, 10), leaf((0, 0, 10, 10)))) == []

    def test_max_x(self):
        vs = check_zone_nesting(self.parent((0, 0, 10, 10), leaf((2, 2, 12, 8))))
        assert [(v.parent, v.child, v.bound) for v in vs] == [("S", "c", "maxX")]

    @pytest.mark.parametrize("bound,zone", [
        ("minX", (1, 0, 10, 10)), ("minY", (0, 1, 10, 10)),
        ("maxX", (0, 0, 9, 10)), ("maxY", (0, 0, 10, 9)),
    ])
    def test_each_single_bound(self, bound, zone):
        vs = check_zone_nesting(self.parent(zone, leaf((0, 0, 10, 10))))
        assert [v.bound for v in vs] == [bound]

    def test_recursive(self):
        inner = SpObject("M", Space(5, 5), Zone(2, 2, 8, 8), subcomponents=(leaf((1, 2, 3, 3), "x"),))
        outer = SpObject("S", Space(5, 5), Zone(0, 0, 10, 10), subcomponents=(inner,))
        vs = check_zone_nesting(outer)
        assert [(v.parent, v.child, v.bound) for v in vs] == [("M", "x", "minX")]

    def test_bounding_box_always_passes(self):
        rng = random.Random(3)
        for _ in range(300):
            zones = [random_zone(rng) for _ in range(rng.randint(1, 4))]
            box = (min(z[0] for z in zones), min(z[1] for z in zones),
                   max(z[2] for z in zones), max(z[3] for z in zones))
            assert check_zone_nesting(self.parent(box, *[leaf(z) for z in zones])) == []

    def test_accepts_exactly_nested(self):
        rng = random.Random(4)
        for _ in range(1000):
            p, c = random_zone(rng, 20), random_zone(rng, 20)
            nested = p[0] <= c[0] and p[1] <= c[1] and p[2] >= c[2] and p[3] >= c[3]
            assert (check_zone_nesting(self.parent(p, leaf(c))) == []) == nested


class TestMargin:
    def obj(self, minX, rad, xx):
        c = SpObject("c", Space(xx, 0), Zone(xx, 0, xx, 0), rad)
        return SpObject("S", Space(0, 0), Zone(minX, 0, 100, 100), rad=0, subcomponents=(c,))

    def test_boundary_equality(self):
        assert check_margin(self.obj(0, 2, 2)) == []

    def test_violation(self):
        vs = check_margin(self.obj(0, 3, 2))
        assert len(vs) == 1 and vs[0].bound == "margin-x"

    def test_zero_radius(self):
        assert check_margin(self.obj(5, 0, 5)) == []

    def test_passing_checks_keep_extent_right_of_min(self):
        rng = random.Random(5)
        for _ in range(500):
            minX = rng.randint(0, 20)
            xx, rad = rng.randint(0, 40), rng.randint(0, 10)
            S = self.obj(minX, rad, xx)
            if check_margin(S) == []:
                assert xx - rad >= minX

    def test_symmetric_is_opt_in(self):
        c = SpObject("c", Space(99, 50), Zone(99, 50, 99, 50), 3)
        S = SpObject("S", Space(0, 0), Zone(0, 0, 100, 100), rad=0, subcomponents=(c,))
        assert check_margin(S) == [] and check_all(S) == []
        assert [v.bound for v in check_margin_symmetric(S)] == ["margin-maxX"]
        assert len(check_all(S, symmetric_margin=True)) == 1


def test_speed_limit():
    o = leaf((0, 0, 1, 1))
    assert check_speed_limit(SpObject("a", o.location, o.rzone, 1, speed=10), 10)
    assert not check_speed_limit(SpObject("a", o.location, o.rzone, 1, speed=11), 10)
    assert check_speed_limit(o, 0)


def test_value_domains():
    with pytest.raises(TypeMismatch):
        Direction(360)
    with pytest.raises(TypeMismatch):
        Zone(3, 0, 2, 0)
    with pytest.raises(TypeMismatch):
        Space(-1, 0)


def test_json_round_trip():
    subs = (leaf((0, 0, 2, 2), "a"), leaf((4, 0, 6, 2), "b"))
    S = SpObject("S", Space(3, 1), Zone(0, 0, 6, 2), speed=2, direction=Direction(90), subcomponents=subs)
    assert from_json(to_json(S)) == S

"""Instance factories: the tight families, the unit-square scenarios, and fuzz.

Every factory returns a ``GeneratedPair``: the request instance together with
a feasible candidate offline trajectory and a little metadata.  Any feasible
trajectory's cost upper-bounds the true offline optimum, so a measured
online/offline ratio against the bundled trajectory is a sound lower bound
on the real competitive ratio of that run.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .engine import OnlineServer
from .geometry import Point, Vector, l1_distance
from .model import (
    AlignedTrajectory,
    Instance,
    ModelError,
    RequestSegment,
    instance_from_json,
    instance_to_json,
    trajectory_from_json,
    trajectory_to_json,
)
from .scalar import Scalar, ZERO, ONE, SQRT3, scalar_from_json, scalar_to_json

__all__ = [
    "GeneratedPair",
    "GeneratorError",
    "ProtocolError",
    "tight1",
    "tight2",
    "fig2_scenario",
    "adversary_continuous",
    "random_orthogonal",
    "HALF_STEP",
]

# the tight families' short leg: (sqrt(3)-1)/2 = 1/(1+sqrt(3))
HALF_STEP = (SQRT3 - ONE) / 2

_UP = Vector(ZERO, ONE)
_DOWN = Vector(ZERO, -ONE)
_RIGHT = Vector(ONE, ZERO)
_LEFT = Vector(-ONE, ZERO)


class GeneratorError(ValueError):
    pass


class ProtocolError(RuntimeError):
    """The interactive online callback broke the adversary protocol."""


@dataclass(frozen=True)
class GeneratedPair:
    instance: Instance
    opt: AlignedTrajectory
    meta: dict = field(default_factory=dict)

    def to_json(self):
        meta = dict(self.meta)
        if isinstance(meta.get("expected_ratio"), Scalar):
            meta["expected_ratio"] = scalar_to_json(meta["expected_ratio"])
        return {
            "instance": instance_to_json(self.instance),
            "opt": trajectory_to_json(self.opt),
            "meta": meta,
        }

    @classmethod
    def from_json(cls, v, where="pair"):
        meta = dict(v.get("meta", {}))
        if "expected_ratio" in meta and meta["expected_ratio"] is not None:
            meta["expected_ratio"] = scalar_from_json(
                meta["expected_ratio"], where + ".meta.expected_ratio"
            )
        return cls(
            instance_from_json(v["instance"], where + ".instance"),
            trajectory_from_json(v["opt"], where + ".opt"),
            meta,
        )


# -- tight families ------------------------------------------------------------


def tight1(cycles: int) -> GeneratedPair:
    """The rotating three-leg family with cost ratio exactly 3 + 2*sqrt(3).

    Each cycle sends the request one unit away, one unit across, then a
    short (sqrt(3)-1)/2 leg back; the offline server only moves with the
    short leg.  Successive cycles are quarter-turned copies of each other.
    """
    if cycles < 1:
        raise GeneratorError("tight1 needs cycles >= 1")
    c = HALF_STEP
    start = Point(ZERO, ONE)
    segs: list[RequestSegment] = []
    opt_bps: list[tuple[Scalar, Point]] = []
    u, v = _DOWN, _RIGHT
    opt = Point(ZERO, ZERO)
    opt_bps.append((ZERO, opt))
    s = ZERO
    for _ in range(cycles):
        segs.append(RequestSegment(u, ONE))
        segs.append(RequestSegment(v, ONE))
        segs.append(RequestSegment(-u, c))
        opt_bps.append((s + 2, opt))
        opt = opt + (-u).scaled(c)
        s = s + 2 + c
        opt_bps.append((s, opt))
        u, v = -v, u
    return GeneratedPair(
        Instance(start, tuple(segs)),
        AlignedTrajectory(tuple(opt_bps)),
        {"name": "tight1", "cycles": cycles, "expected_ratio": Scalar(3) + 2 * SQRT3},
    )


def tight2(cycles: int) -> GeneratedPair:
    """The translating five-leg family, also tight at 3 + 2*sqrt(3).

    Each cycle drops the request a unit below the shelf y = 1, forcing a
    diagonal chase, a short drag, a free climb, a long diagonal chase and
    a long drag; the offline server spends exactly $1 moving one unit
    right along the shelf.
    """
    if cycles < 1:
        raise GeneratorError("tight2 needs cycles >= 1")
    c = HALF_STEP
    start = Point(ZERO, ONE)
    segs: list[RequestSegment] = []
    opt_bps: list[tuple[Scalar, Point]] = [(ZERO, Point(ZERO, ONE))]
    s = ZERO
    for k in range(cycles):
        kx = Scalar(k)
        segs.append(RequestSegment(_DOWN, ONE))
        segs.append(RequestSegment(_RIGHT, ONE))
        segs.append(RequestSegment(_DOWN, c))
        segs.append(RequestSegment(_UP, ONE + c))
        segs.append(RequestSegment(_LEFT, ONE + c))
        segs.append(RequestSegment(_RIGHT, ONE + c))
        opt_bps.append((s + 1, Point(kx, ONE)))
        opt_bps.append((s + 2, Point(kx + 1, ONE)))
        s = s + 5 + 4 * c
        opt_bps.append((s, Point(kx + 1, ONE)))
    return GeneratedPair(
        Instance(start, tuple(segs)),
        AlignedTrajectory(tuple(opt_bps)),
        {"name": "tight2", "cycles": cycles, "expected_ratio": Scalar(3) + 2 * SQRT3},
    )


def fig2_scenario(reps: int = 3) -> GeneratedPair:
    """Unit-square scenario: corner commitment versus the bottom-left spot.

    The request walks to the bottom-right corner and then loops in an
    L shape over the left and bottom edges.  The bundled offline server
    makes a single unit move down to (0, 0) and never moves again.
    """
    if reps < 1:
        raise GeneratorError("fig2_scenario needs reps >= 1")
    start = Point(ZERO, ONE)
    segs = [RequestSegment(_RIGHT, ONE), RequestSegment(_DOWN, ONE)]
    for _ in range(reps):
        segs += [
            RequestSegment(_LEFT, ONE),
            RequestSegment(_UP, ONE),
            RequestSegment(_DOWN, ONE),
            RequestSegment(_RIGHT, ONE),
        ]
    total = Scalar(2 + 4 * reps)
    opt_bps = (
        (ZERO, Point(ZERO, ONE)),
        (ONE, Point(ZERO, ONE)),
        (Scalar(2), Point(ZERO, ZERO)),
        (total, Point(ZERO, ZERO)),
    )
    return GeneratedPair(
        Instance(start, tuple(segs)),
        AlignedTrajectory(opt_bps),
        {"name": "fig2", "reps": reps, "expected_ratio": None},
    )


# -- the continuous unit-square adversary --------------------------------------


def _corner(x: int, y: int) -> Point:
    return Point(Scalar(x), Scalar(y))


def adversary_continuous(online, cycles: int, reps: int = 2) -> GeneratedPair:
    """Interactive unit-square adversary against a continuous online server.

    `online` must expose feed(direction, length) -> Point and a `position`
    property.  Each cycle herds the request across the square, watches
    which corner the server leans toward, then loops L-moves through the
    corner it neglected; the bundled offline server reaches that corner
    for $1 per cycle and sits out the loops.
    """
    if online.position != _corner(0, 0):
        raise ProtocolError("online server must start at the request start (0, 0)")
    segs: list[RequestSegment] = []
    opt_bps: list[tuple[Scalar, Point]] = [(ZERO, _corner(0, 0))]
    s = ZERO
    req = _corner(0, 0)

    def feed_to(target: Point):
        nonlocal s, req
        delta = target - req
        length = delta.l1_norm()
        direction = Vector(delta.dx / length, delta.dy / length)
        segs.append(RequestSegment(direction, length))
        served = online.feed(direction, length)
        s = s + length
        req = target
        if served.x != req.x and served.y != req.y:
            raise ProtocolError(f"online server unaligned at s={s}")
        return served

    cx, cy = 0, 0
    for _ in range(cycles):
        a = _corner(1 - cx, cy)  # horizontal neighbor
        b = _corner(cx, 1 - cy)  # vertical neighbor
        d = _corner(1 - cx, 1 - cy)  # opposite corner
        here = _corner(cx, cy)
        if opt_bps[-1][0] != s:
            opt_bps.append((s, here))  # hold until the cycle opens
        feed_to(a)
        s_after_first = s
        server = feed_to(d)
        # the neglected corner: whichever of a, b the server is farther from
        sweet = a if l1_distance(server, a) > l1_distance(server, b) else b
        if sweet == b:
            opt_bps.append((s_after_first, here))
            opt_bps.append((s, b))
        else:
            opt_bps.append((s_after_first, a))
        feed_to(sweet)
        for _ in range(reps):
            feed_to(here)
            feed_to(sweet)
            feed_to(d)
            feed_to(sweet)
        cx, cy = int(sweet.x == 1), int(sweet.y == 1)
    if not opt_bps or opt_bps[-1][0] != s:
        opt_bps.append((s, opt_bps[-1][1]))
    return GeneratedPair(
        Instance(_corner(0, 0), tuple(segs)),
        AlignedTrajectory(tuple(opt_bps)),
        {"name": "adversary-continuous", "cycles": cycles, "expected_ratio": None},
    )


# -- seeded fuzz instances -----------------------------------------------------


def _quarter(rng: random.Random, bound: int) -> Fraction:
    return Fraction(rng.randint(-4 * bound, 4 * bound), 4)


def random_orthogonal(seed: int, n_segments: int = 12, coord_bound: int = 4) -> GeneratedPair:
    """Seeded axis-parallel polyline plus a feasible shadow trajectory.

    The offline trajectory copies the request's coordinate on one random
    axis (keeping alignment automatic) while random-walking freely on the
    other, or simply rides the request itself.  Deterministic in the seed.
    """
    if n_segments < 0:
        raise GeneratorError("n_segments must be nonnegative")
    rng = random.Random(seed)
    x = _quarter(rng, coord_bound)
    y = _quarter(rng, coord_bound)
    start = Point(Scalar(x), Scalar(y))
    segs: list[RequestSegment] = []
    for _ in range(n_segments):
        axis = rng.randrange(2)
        cur = x if axis == 0 else y
        target = cur
        while target == cur:
            target = _quarter(rng, coord_bound)
        length = Scalar(abs(target - cur))
        sign = Scalar(1 if target > cur else -1)
        if axis == 0:
            segs.append(RequestSegment(Vector(sign, ZERO), length))
            x = target
        else:
            segs.append(RequestSegment(Vector(ZERO, sign), length))
            y = target
    inst = Instance(start, tuple(segs))
    mode = rng.choice(["request", "shadow-x", "shadow-y"])
    lengths = inst.breakpoint_lengths()
    points = inst.points()
    if mode == "request" or n_segments == 0:
        opt_bps = tuple(zip(lengths, points))
        if n_segments == 0:
            opt_bps = ((ZERO, start),)
    elif mode == "shadow-y":
        # copy the request's y; drift freely in x (starting at the start
        # point, so the pair is comparable with the cost guarantee)
        opt_bps = ((lengths[0], start),) + tuple(
            (sl, Point(Scalar(_quarter(rng, coord_bound)), p.y))
            for sl, p in zip(lengths[1:], points[1:])
        )
    else:
        opt_bps = ((lengths[0], start),) + tuple(
            (sl, Point(p.x, Scalar(_quarter(rng, coord_bound))))
            for sl, p in zip(lengths[1:], points[1:])
        )
    return GeneratedPair(
        inst,
        AlignedTrajectory(opt_bps),
        {"name": "random", "seed": seed, "mode": mode, "expected_ratio": None},
    )


def br_online_factory(start: Point) -> OnlineServer:
    """Convenience: the two-phase engine behind the adversary protocol."""
    return OnlineServer(start)

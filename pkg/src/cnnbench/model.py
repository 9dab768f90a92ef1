"""Request trajectories, candidate offline trajectories, and their plumbing.

The request trajectory is a connected polyline given by a start point and a
list of (direction, length) segments.  Arc length s of the request is the
master clock: the online trace and any candidate offline trajectory are both
parameterized by the same s in [0, total_length].
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass, field
from functools import cached_property

from .geometry import Point, Vector, l1_distance
from .scalar import Scalar, ZERO, ScalarParseError, scalar_from_json, scalar_to_json

__all__ = [
    "RequestSegment",
    "Instance",
    "AlignedTrajectory",
    "AlignmentReport",
    "ModelError",
    "rectify",
    "refine",
    "validate_alignment",
    "parse_instance",
    "serialize_instance",
    "parse_trajectory",
    "serialize_trajectory",
]


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class RequestSegment:
    direction: Vector  # axis-parallel with component +-1, or a raw unit diagonal
    length: Scalar

    def displacement(self) -> Vector:
        return self.direction.scaled(self.length)

    def is_axis_parallel(self) -> bool:
        return self.direction.is_axis_parallel()


@dataclass(frozen=True)
class Instance:
    start: Point
    segments: tuple[RequestSegment, ...]

    def __post_init__(self):
        # normalize away zero-length segments; they carry no information
        kept = tuple(s for s in self.segments if s.length != 0)
        for s in kept:
            if s.length < 0:
                raise ModelError("segment length must be nonnegative")
        object.__setattr__(self, "segments", kept)

    @property
    def total_length(self) -> Scalar:
        total = ZERO
        for s in self.segments:
            total = total + s.length
        return total

    def is_axis_parallel(self) -> bool:
        return all(s.is_axis_parallel() for s in self.segments)

    def points(self) -> list[Point]:
        """Segment endpoints, starting with the start point."""
        pts = [self.start]
        for s in self.segments:
            pts.append(pts[-1] + s.displacement())
        return pts

    def breakpoint_lengths(self) -> list[Scalar]:
        out = [ZERO]
        for s in self.segments:
            out.append(out[-1] + s.length)
        return out

    @cached_property
    def _prefix(self) -> tuple[list[Scalar], list[Point]]:
        return (self.breakpoint_lengths(), self.points())

    def position_at(self, s: Scalar) -> Point:
        lengths, points = self._prefix
        if s < 0 or s > lengths[-1]:
            raise ModelError(f"arc length {s} outside [0, {lengths[-1]}]")
        i = bisect.bisect_right(lengths, s) - 1
        if i >= len(self.segments):
            return points[-1]
        return points[i] + self.segments[i].direction.scaled(s - lengths[i])


@dataclass(frozen=True)
class AlignedTrajectory:
    """Piecewise-linear trajectory keyed to the request arc length."""

    breakpoints: tuple[tuple[Scalar, Point], ...]

    def __post_init__(self):
        ss = [s for s, _ in self.breakpoints]
        for a, b in zip(ss, ss[1:]):
            if not a < b:
                raise ModelError("trajectory breakpoints must be strictly increasing")

    @property
    def total_length(self) -> Scalar:
        return self.breakpoints[-1][0] if self.breakpoints else ZERO

    @cached_property
    def _ss(self) -> list[Scalar]:
        return [s for s, _ in self.breakpoints]

    def position_at(self, s: Scalar) -> Point:
        bps = self.breakpoints
        ss = self._ss
        if not bps or s < ss[0] or s > ss[-1]:
            raise ModelError(f"arc length {s} outside trajectory domain")
        i = bisect.bisect_left(ss, s)
        if ss[i] == s:
            return bps[i][1]
        s0, p0 = bps[i - 1]
        s1, p1 = bps[i]
        t = (s - s0) / (s1 - s0)
        return Point(p0.x + (p1.x - p0.x) * t, p0.y + (p1.y - p0.y) * t)

    def path_cost(self) -> Scalar:
        """Cumulative L1 length of the whole trajectory."""
        total = ZERO
        for (_, p0), (_, p1) in zip(self.breakpoints, self.breakpoints[1:]):
            total = total + l1_distance(p0, p1)
        return total

    def prefix_costs(self) -> list[Scalar]:
        out = [ZERO]
        for (_, p0), (_, p1) in zip(self.breakpoints, self.breakpoints[1:]):
            out.append(out[-1] + l1_distance(p0, p1))
        return out


# -- rectification -------------------------------------------------------------


def _ceil_ratio(num: Scalar, den: Scalar) -> int:
    """Exact ceil(num/den) for positive Scalars."""
    q = num / den
    n = math.ceil(float(q))
    while Scalar(n) < q:
        n += 1
    while n > 0 and q <= Scalar(n - 1):
        n -= 1
    return max(n, 1)


def rectify(inst: Instance, epsilon: Scalar) -> Instance:
    """Replace diagonal segments by monotone staircases with steps <= epsilon.

    Axis-parallel segments pass through untouched.  Each staircase visits the
    same endpoint and has L1 length exactly |dx| + |dy| of the replaced
    segment.
    """
    if not epsilon > ZERO:
        raise ModelError("rectify needs a positive epsilon")
    out: list[RequestSegment] = []
    for seg in inst.segments:
        if seg.is_axis_parallel():
            out.append(seg)
            continue
        d = seg.displacement()
        if d.dx == 0 and d.dy == 0:
            raise ModelError("zero-length direction in diagonal segment")
        n = _ceil_ratio(max(abs(d.dx), abs(d.dy)), epsilon)
        step_x = d.dx / n
        step_y = d.dy / n
        ux = Vector(Scalar(d.dx.sign()), ZERO)
        uy = Vector(ZERO, Scalar(d.dy.sign()))
        for _ in range(n):
            out.append(RequestSegment(ux, abs(step_x)))
            out.append(RequestSegment(uy, abs(step_y)))
    return Instance(inst.start, tuple(out))


# -- refinement ----------------------------------------------------------------


def refine(inst: Instance, s: Scalar) -> Instance:
    """Split the segment containing arc length s into two collinear halves."""
    if s < 0 or s > inst.total_length:
        raise ModelError(f"refine point {s} outside [0, {inst.total_length}]")
    out: list[RequestSegment] = []
    acc = ZERO
    for seg in inst.segments:
        if acc < s < acc + seg.length:
            first = s - acc
            out.append(RequestSegment(seg.direction, first))
            out.append(RequestSegment(seg.direction, seg.length - first))
        else:
            out.append(seg)
        acc = acc + seg.length
    return Instance(inst.start, tuple(out))


# -- alignment checking --------------------------------------------------------


@dataclass(frozen=True)
class AlignmentReport:
    feasible: bool
    first_violation: Scalar | None = None


def validate_alignment(traj: AlignedTrajectory, inst: Instance) -> AlignmentReport:
    """Check that traj shares an x or y coordinate with the request at every s.

    Each linear piece is subdivided wherever a per-axis coordinate difference
    (server minus request) hits zero; on the resulting subintervals both
    differences have constant sign, so alignment is decided exactly by
    endpoint evaluation.  ``first_violation`` reports the onset (left end) of
    the earliest violating subinterval.
    """
    if not traj.breakpoints:
        raise ModelError("empty trajectory")
    if traj.total_length != inst.total_length or traj.breakpoints[0][0] != ZERO:
        raise ModelError(
            "trajectory must span the instance arc length "
            f"[0, {inst.total_length}], got [{traj.breakpoints[0][0]}, "
            f"{traj.total_length}]"
        )

    grid = sorted(
        set(inst.breakpoint_lengths()) | {s for s, _ in traj.breakpoints}
    )
    for s0, s1 in zip(grid, grid[1:]):
        p0 = traj.position_at(s0)
        p1 = traj.position_at(s1)
        r0 = inst.position_at(s0)
        r1 = inst.position_at(s1)
        dx0, dx1 = p0.x - r0.x, p1.x - r1.x
        dy0, dy1 = p0.y - r0.y, p1.y - r1.y
        cuts = {s0, s1}
        for v0, v1 in ((dx0, dx1), (dy0, dy1)):
            if (v0.sign()) * (v1.sign()) < 0:
                # linear zero crossing inside (s0, s1)
                cuts.add(s0 + (s1 - s0) * (v0 / (v0 - v1)))
        cut_list = sorted(cuts)
        for a, b in zip(cut_list, cut_list[1:]):
            pa, ra = traj.position_at(a), inst.position_at(a)
            pb, rb = traj.position_at(b), inst.position_at(b)
            x_ok = pa.x == ra.x and pb.x == rb.x
            y_ok = pa.y == ra.y and pb.y == rb.y
            if not (x_ok or y_ok):
                # also catch a point violation at the left endpoint itself
                onset = a
                if (pa.x == ra.x) or (pa.y == ra.y):
                    onset = a  # aligned at a, breaks immediately after
                return AlignmentReport(False, onset)
    # final point check (grid interval loop covers interiors and left ends)
    pe, re = traj.position_at(grid[-1]), inst.position_at(grid[-1])
    if not (pe.x == re.x or pe.y == re.y):
        return AlignmentReport(False, grid[-1])
    return AlignmentReport(True, None)


# -- serialization -------------------------------------------------------------


def _segment_from_json(v, where):
    try:
        direction = Vector.from_json(v["dir"], where + ".dir")
        length = scalar_from_json(v["len"], where + ".len")
    except KeyError as e:
        raise ModelError(f"{where}: missing field {e.args[0]!r}") from None
    if direction.dx == 0 and direction.dy == 0:
        raise ModelError(f"{where}.dir: both components zero")
    if length < 0:
        raise ModelError(f"{where}.len: negative length")
    return RequestSegment(direction, length)


def instance_from_json(v, where="instance") -> Instance:
    try:
        start = Point.from_json(v["start"], where + ".start")
        raw_segments = v["segments"]
    except KeyError as e:
        raise ModelError(f"{where}: missing field {e.args[0]!r}") from None
    except TypeError:
        raise ModelError(f"{where}: object expected") from None
    segs = tuple(
        _segment_from_json(sv, f"{where}.segments[{i}]")
        for i, sv in enumerate(raw_segments)
    )
    return Instance(start, segs)


def instance_to_json(inst: Instance) -> dict:
    return {
        "start": inst.start.to_json(),
        "segments": [
            {"dir": s.direction.to_json(), "len": scalar_to_json(s.length)}
            for s in inst.segments
        ],
    }


def trajectory_from_json(v, where="trajectory") -> AlignedTrajectory:
    try:
        raw = v["breakpoints"]
    except (KeyError, TypeError):
        raise ModelError(f"{where}: missing field 'breakpoints'") from None
    bps = []
    for i, bv in enumerate(raw):
        w = f"{where}.breakpoints[{i}]"
        try:
            s = scalar_from_json(bv["s"], w + ".s")
            p = Point(
                scalar_from_json(bv["x"], w + ".x"),
                scalar_from_json(bv["y"], w + ".y"),
            )
        except KeyError as e:
            raise ModelError(f"{w}: missing field {e.args[0]!r}") from None
        bps.append((s, p))
    return AlignedTrajectory(tuple(bps))


def trajectory_to_json(traj: AlignedTrajectory) -> dict:
    return {
        "breakpoints": [
            {
                "s": scalar_to_json(s),
                "x": scalar_to_json(p.x),
                "y": scalar_to_json(p.y),
            }
            for s, p in traj.breakpoints
        ]
    }


def parse_instance(text: str) -> Instance:
    try:
        v = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelError(f"instance: invalid JSON at line {e.lineno}: {e.msg}") from e
    try:
        return instance_from_json(v)
    except ScalarParseError as e:
        raise ModelError(str(e)) from e


def serialize_instance(inst: Instance) -> str:
    return json.dumps(instance_to_json(inst), indent=2) + "\n"


def parse_trajectory(text: str) -> AlignedTrajectory:
    try:
        v = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelError(f"trajectory: invalid JSON at line {e.lineno}: {e.msg}") from e
    try:
        return trajectory_from_json(v)
    except ScalarParseError as e:
        raise ModelError(str(e)) from e


def serialize_trajectory(traj: AlignedTrajectory) -> str:
    return json.dumps(trajectory_to_json(traj), indent=2) + "\n"

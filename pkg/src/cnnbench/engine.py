"""The two-phase online server: diagonal (bishop) and axis (rook) movement.

The engine consumes an axis-parallel instance segment by segment, splitting
each segment exactly (linear equations in Q[sqrt(3)]) at every phase switch,
and emits a trace of elementary linear motions.  All bookkeeping happens in
a per-cycle canonical frame in which the cycle began with the request at the
origin and the server at (0, h), h >= 0.

Frame convention for the trace: every event carries the phase, frame and
offset magnitude in effect for the motion *following* it, so the interval
between consecutive events is fully described by its left event.
"""

from __future__ import annotations

from dataclasses import dataclass

from .geometry import (
    Frame,
    Point,
    Vector,
    frame_mapping_to_minus_y,
    frame_mapping_to_plus_y,
    l1_distance,
    PERMS,
)
from .model import AlignedTrajectory, Instance, ModelError, RequestSegment
from .scalar import Scalar, ZERO, SQRT3, scalar_to_json

__all__ = [
    "TraceEvent",
    "Trace",
    "EngineError",
    "run",
    "trace_trajectory",
    "OnlineServer",
    "trace_to_json",
    "trace_from_json",
]

BISHOP = "bishop"
ROOK = "rook"

DECAY_VERTICAL = Scalar(1) + SQRT3  # offset loss per unit of vertical rook motion
_REFLECT_X = Frame(PERMS["flip_x"], Vector(ZERO, ZERO))


class EngineError(RuntimeError):
    """Internal invariant breach; indicates a bug, not bad input."""


@dataclass(frozen=True)
class TraceEvent:
    s: Scalar
    server: Point  # world coordinates
    phase: str  # BISHOP or ROOK, in effect after this event
    frame: Frame  # world -> canonical for the current cycle
    offset_mag: Scalar
    cost_on: Scalar
    kind: str  # cycle-start | phase-switch | request-horizontal | request-vertical

    def to_json(self):
        return {
            "s": scalar_to_json(self.s),
            "server": self.server.to_json(),
            "phase": self.phase,
            "frame": self.frame.to_json(),
            "offset_mag": scalar_to_json(self.offset_mag),
            "cost_on": scalar_to_json(self.cost_on),
            "kind": self.kind,
        }


@dataclass(frozen=True)
class Trace:
    instance: Instance
    events: tuple[TraceEvent, ...]
    final_cost: Scalar

    @property
    def final_server(self) -> Point:
        return self.events[-1].server


def trace_trajectory(trace: Trace) -> AlignedTrajectory:
    """The server's polyline keyed to request arc length."""
    bps: list[tuple[Scalar, Point]] = []
    for ev in trace.events:
        if bps and bps[-1][0] == ev.s:
            bps[-1] = (ev.s, ev.server)  # same instant, keep latest state
        else:
            bps.append((ev.s, ev.server))
    return AlignedTrajectory(tuple(bps))


def trace_to_json(trace: Trace) -> dict:
    from .model import instance_to_json
    from .scalar import scalar_to_json as sj

    return {
        "instance": instance_to_json(trace.instance),
        "events": [e.to_json() for e in trace.events],
        "final_cost": sj(trace.final_cost),
    }


def trace_from_json(v, where="trace") -> Trace:
    from .model import instance_from_json
    from .scalar import scalar_from_json

    inst = instance_from_json(v["instance"], where + ".instance")
    events = []
    for i, ev in enumerate(v["events"]):
        w = f"{where}.events[{i}]"
        events.append(
            TraceEvent(
                scalar_from_json(ev["s"], w + ".s"),
                Point.from_json(ev["server"], w + ".server"),
                ev["phase"],
                Frame.from_json(ev["frame"], w + ".frame"),
                scalar_from_json(ev["offset_mag"], w + ".offset_mag"),
                scalar_from_json(ev["cost_on"], w + ".cost_on"),
                ev["kind"],
            )
        )
    return Trace(inst, tuple(events), scalar_from_json(v["final_cost"], where + ".final_cost"))


class _Engine:
    def __init__(self, start: Point):
        self.server = start
        self.request = start
        self.phase = BISHOP
        self.frame: Frame | None = None  # None: bishop entry frame not yet pinned
        self.offset_mag = ZERO
        self.cost = ZERO
        self.s = ZERO
        self.events: list[TraceEvent] = []

    # -- events ---------------------------------------------------------------

    def emit(self, kind: str, frame: Frame | None = None):
        f = frame if frame is not None else self.frame
        if f is None:
            raise EngineError("emitting event with unpinned frame")
        if self.phase == BISHOP:
            # running offset during the bishop phase: -s_x along canonical x
            mag = abs(f.apply(self.server).x)
        else:
            mag = self.offset_mag
        self.events.append(
            TraceEvent(self.s, self.server, self.phase, f, mag, self.cost, kind)
        )

    # -- frame helpers --------------------------------------------------------

    def _pin_bishop_frame(self, world_dir: Vector):
        """Fix the cycle frame so the imminent request move is canonical -y.

        Only called when server and request coincide, i.e. while the running
        offset is zero, where any orthogonal redraw leaves the potential
        untouched.
        """
        lin = frame_mapping_to_minus_y(world_dir)
        base = Frame(lin, Vector(ZERO, ZERO))
        t = base.apply(self.request)
        self.frame = Frame(lin, Vector(-t.x, -t.y))
        self.emit("cycle-start")

    def _start_cycle_separated(self):
        """Bishop entry with server and request aligned at distance h > 0."""
        sep = self.server - self.request
        lin = frame_mapping_to_plus_y(sep)
        base = Frame(lin, Vector(ZERO, ZERO))
        t = base.apply(self.request)
        self.frame = Frame(lin, Vector(-t.x, -t.y))
        self.phase = BISHOP
        self.emit("cycle-start")

    def enter_bishop(self):
        self.phase = BISHOP
        self.offset_mag = ZERO
        if self.server == self.request:
            self.frame = None  # pinned lazily on the next elementary move
        else:
            self._start_cycle_separated()

    def enter_rook(self, canon_server_x: Scalar):
        """Bishop terminated at coincidence with canonical server x s_x."""
        if canon_server_x == 0:
            # zero offset: skip the degenerate rook phase entirely
            self.enter_bishop()
            return
        if canon_server_x < 0:
            # reflect canonical x so the offset points along -x; this leaves
            # every potential term unchanged mid-cycle
            self.frame = _REFLECT_X.compose(self.frame)
        self.phase = ROOK
        self.offset_mag = abs(canon_server_x)
        self.emit("phase-switch")

    # -- canonical views ------------------------------------------------------

    def canon(self, p: Point) -> Point:
        return self.frame.apply(p)

    def world_step(self, canon_delta: Vector) -> Vector:
        return self.frame.unapply_vector(canon_delta)

    # -- the dynamics ---------------------------------------------------------

    def process_segment(self, direction: Vector, length: Scalar):
        remaining = length
        while remaining > 0:
            if self.phase == BISHOP:
                remaining = self._bishop_step(direction, remaining)
            else:
                remaining = self._rook_step(direction, remaining)

    def _bishop_step(self, direction: Vector, remaining: Scalar) -> Scalar:
        if self.frame is None:
            self._pin_bishop_frame(direction)
        cdir = self.frame.apply_vector(direction)
        cs = self.canon(self.server)
        cr = self.canon(self.request)
        gap = cs.y - cr.y
        if gap < 0:
            raise EngineError("bishop invariant breach: server below request")
        if cdir.dy != 0:
            if cdir.dy < 0:  # request moves away downward: server stays
                self.request = self.request + direction.scaled(remaining)
                self.s = self.s + remaining
                self.emit("request-vertical")
                return ZERO
            # request climbs toward the server
            step = min(remaining, gap)
            self.request = self.request + direction.scaled(step)
            self.s = self.s + step
            self.emit("request-vertical")
            if step == gap:
                self.enter_rook(self.canon(self.server).x)
            return remaining - step
        # horizontal request move: server mirrors x and descends by the same
        # amount, meeting the request's line after exactly `gap` of motion
        if gap == 0:
            raise EngineError("bishop with zero gap must have switched already")
        step = min(remaining, gap)
        self.request = self.request + direction.scaled(step)
        self.server = self.server + direction.scaled(step) + self.world_step(
            Vector(ZERO, -step)
        )
        self.cost = self.cost + step + step
        self.s = self.s + step
        self.emit("request-horizontal")
        if step == gap:
            self.enter_rook(self.canon(self.server).x)
        return remaining - step

    def _rook_step(self, direction: Vector, remaining: Scalar) -> Scalar:
        cdir = self.frame.apply_vector(direction)
        if cdir.dy != 0:
            # vertical: the server rides along; offset decays at rate 1+sqrt3
            budget = self.offset_mag / DECAY_VERTICAL
            step = min(remaining, budget)
            move = direction.scaled(step)
            self.request = self.request + move
            self.server = self.server + move
            self.cost = self.cost + step
            self.offset_mag = self.offset_mag - DECAY_VERTICAL * step
            self.s = self.s + step
            self.emit("request-vertical")
            if step == budget:
                self.offset_mag = ZERO  # exact by construction; belt and braces
                self.enter_bishop()
            return remaining - step
        if cdir.dx > 0:
            # request retreats into the complement halfplane: server stays
            self.request = self.request + direction.scaled(remaining)
            self.s = self.s + remaining
            self.emit("request-horizontal")
            return ZERO
        # request moves toward / past the server's x
        gap = self.canon(self.request).x - self.canon(self.server).x
        if gap < 0:
            raise EngineError("rook invariant breach: server right of request")
        if gap > 0:
            step = min(remaining, gap)
            self.request = self.request + direction.scaled(step)
            self.s = self.s + step
            self.emit("request-horizontal")
            return remaining - step
        # x coordinates coincide: the request drags the server with it
        step = min(remaining, self.offset_mag)
        move = direction.scaled(step)
        self.request = self.request + move
        self.server = self.server + move
        self.cost = self.cost + step
        self.offset_mag = self.offset_mag - step
        self.s = self.s + step
        self.emit("request-horizontal")
        if self.offset_mag == 0:
            self.enter_bishop()
        return remaining - step


class OnlineServer:
    """Segment-at-a-time interface for interactive (adversarial) callers."""

    def __init__(self, start: Point):
        self._eng = _Engine(start)
        self._segments: list[RequestSegment] = []

    def feed(self, direction: Vector, length: Scalar) -> Point:
        """Advance the request by one axis segment; returns the server."""
        if not direction.is_axis_parallel():
            raise ModelError("feed requires an axis-parallel direction")
        self._eng.process_segment(direction, length)
        self._segments.append(RequestSegment(direction, length))
        return self._eng.server

    @property
    def position(self) -> Point:
        return self._eng.server

    @property
    def cost(self) -> Scalar:
        return self._eng.cost


def run(inst: Instance) -> Trace:
    """Deterministic execution of the online algorithm on an instance."""
    if not inst.is_axis_parallel():
        raise ModelError("engine requires an axis-parallel instance; rectify first")
    eng = _Engine(inst.start)
    for seg in inst.segments:
        eng.process_segment(seg.direction, seg.length)
    if eng.frame is None:
        # trace ends at a fresh coincident cycle; pin an arbitrary legal frame
        base = Frame(PERMS["identity"], Vector(ZERO, ZERO))
        t = base.apply(eng.request)
        eng.frame = Frame(PERMS["identity"], Vector(-t.x, -t.y))
        eng.emit("cycle-start")
    return Trace(inst, tuple(eng.events), eng.cost)

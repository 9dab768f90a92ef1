"""Exact certificate checking for the online server's cost guarantee.

The certificate is a scalar potential combining five terms: the offline and
online cumulative costs, the shifted-distance term, the offset magnitude and
a piecewise-linear correction depending on the vertical separation h of the
offline server above the online one (measured in the cycle's canonical
frame).  Along any execution paired with any feasible offline trajectory the
potential never decreases; this module verifies that exactly, by evaluating
the potential on a breakpoint grid fine enough that it is linear in between.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

from .engine import BISHOP, Trace, TraceEvent, trace_trajectory
from .geometry import Point, Vector, l1_distance
from .model import (
    AlignedTrajectory,
    Instance,
    ModelError,
    RequestSegment,
    validate_alignment,
)
from .scalar import Scalar, ZERO, SQRT3

__all__ = [
    "PotentialRecord",
    "VerificationReport",
    "MonitorError",
    "f_term",
    "potential_record",
    "verify_nondecreasing",
    "append_homing_suffix",
    "competitive_ratio",
    "RatioUndefined",
]

RATIO = Scalar(3) + 2 * SQRT3  # the guarantee constant, ~6.464
F_SLOPE = Scalar(6) - 2 * SQRT3


class MonitorError(ValueError):
    pass


class RatioUndefined(ValueError):
    """Offline cost is zero while the online server paid; ratio unbounded."""


def f_term(offset_mag: Scalar, h: Scalar) -> Scalar:
    """Correction term: 0 for h <= 0, slope (6-2*sqrt3) in h, capped at |o|."""
    if offset_mag < 0:
        raise MonitorError("negative offset magnitude")
    if h <= 0:
        return ZERO
    if h <= offset_mag:
        return F_SLOPE * h
    return F_SLOPE * offset_mag


@dataclass(frozen=True)
class PotentialRecord:
    s: Scalar
    ell_opt: Scalar
    ell_on: Scalar
    d_term: Scalar
    offset_mag: Scalar
    f_term: Scalar
    phi: Scalar

    def to_json(self):
        from .scalar import scalar_to_json as sj

        return {
            "s": sj(self.s),
            "ell_opt": sj(self.ell_opt),
            "ell_on": sj(self.ell_on),
            "d_term": sj(self.d_term),
            "offset_mag": sj(self.offset_mag),
            "f_term": sj(self.f_term),
            "phi": sj(self.phi),
            "phi_float": float(self.phi),
        }


@dataclass(frozen=True)
class VerificationReport:
    ok: bool
    first_decrease: tuple[Scalar, Scalar, Scalar] | None  # (s, before, after)
    records: tuple[PotentialRecord, ...]


def potential_record(
    server: Point,
    opt: Point,
    offset_vec: Vector,
    ell_on: Scalar,
    ell_opt: Scalar,
    frame,
    s: Scalar = ZERO,
) -> PotentialRecord:
    """Evaluate the potential and all of its terms at one checkpoint."""
    shifted = server + offset_vec
    d = l1_distance(shifted, opt)
    m = offset_vec.l1_norm()
    h = frame.apply(opt).y - frame.apply(server).y
    f = f_term(m, h)
    phi = RATIO * ell_opt - 3 * d - ell_on - m + f
    return PotentialRecord(s, ell_opt, ell_on, d, m, f, phi)


# -- interval machinery --------------------------------------------------------


def _lerp_scalar(a: Scalar, b: Scalar, lam: Scalar) -> Scalar:
    return a + (b - a) * lam


def _lerp_point(a: Point, b: Point, lam: Scalar) -> Point:
    return Point(_lerp_scalar(a.x, b.x, lam), _lerp_scalar(a.y, b.y, lam))


class _Interval:
    """One trace interval [e0.s, e1.s]; dynamics described by e0."""

    def __init__(self, e0: TraceEvent, e1: TraceEvent, opt: AlignedTrajectory,
                 opt_prefix: list[Scalar]):
        self.e0 = e0
        self.e1 = e1
        self.opt = opt
        self.opt_prefix = opt_prefix
        self.span = e1.s - e0.s

    def _lam(self, s: Scalar) -> Scalar:
        return (s - self.e0.s) / self.span

    def server_at(self, s: Scalar) -> Point:
        return _lerp_point(self.e0.server, self.e1.server, self._lam(s))

    def cost_at(self, s: Scalar) -> Scalar:
        return _lerp_scalar(self.e0.cost_on, self.e1.cost_on, self._lam(s))

    def offset_vec_at(self, s: Scalar) -> Vector:
        frame = self.e0.frame
        if self.e0.phase == BISHOP:
            sx = frame.apply(self.server_at(s)).x
            canon = Vector(-sx, ZERO)
        else:
            m = _lerp_scalar(self.e0.offset_mag, self.e1.offset_mag, self._lam(s))
            canon = Vector(-m, ZERO)
        return frame.unapply_vector(canon)

    def opt_at(self, s: Scalar) -> Point:
        return self.opt.position_at(s)

    def ell_opt_at(self, s: Scalar) -> Scalar:
        return _prefix_at(self.opt, self.opt_prefix, s)

    def record_at(self, s: Scalar) -> PotentialRecord:
        return potential_record(
            self.server_at(s),
            self.opt_at(s),
            self.offset_vec_at(s),
            self.cost_at(s),
            self.ell_opt_at(s),
            self.e0.frame,
            s,
        )

    # -- breakpoint enumeration ----------------------------------------------

    def checkpoints(self) -> list[Scalar]:
        """All s in (e0.s, e1.s] where the potential's slope may change."""
        s0, s1 = self.e0.s, self.e1.s
        stage1 = {s0, s1}
        ss = self.opt._ss
        for i in range(bisect.bisect_right(ss, s0), bisect.bisect_left(ss, s1)):
            stage1.add(ss[i])
        if self.e0.phase == BISHOP:
            # canonical server x may cross zero inside the move
            sx0 = self.e0.frame.apply(self.e0.server).x
            sx1 = self.e0.frame.apply(self.e1.server).x
            z = _linear_zero(s0, s1, sx0, sx1)
            if z is not None:
                stage1.add(z)
        pieces = sorted(stage1)
        cuts = set(pieces)
        for a, b in zip(pieces, pieces[1:]):
            cuts |= self._piece_kinks(a, b)
        return sorted(c for c in cuts if c > s0)

    def _piece_kinks(self, a: Scalar, b: Scalar) -> set[Scalar]:
        """Zeros of the linear pieces of d, h and h - |o| inside (a, b)."""
        out: set[Scalar] = set()
        frame = self.e0.frame

        def values(s: Scalar):
            server = self.server_at(s)
            o = self.offset_vec_at(s)
            opt = self.opt_at(s)
            wx = server.x + o.dx - opt.x
            wy = server.y + o.dy - opt.y
            h = frame.apply(opt).y - frame.apply(server).y
            m = o.l1_norm()
            return (wx, wy, h, h - m)

        va = values(a)
        vb = values(b)
        for fa, fb in zip(va, vb):
            z = _linear_zero(a, b, fa, fb)
            if z is not None:
                out.add(z)
        return out


def _linear_zero(s0: Scalar, s1: Scalar, v0: Scalar, v1: Scalar) -> Scalar | None:
    """Zero of the linear function through (s0, v0), (s1, v1), if strictly inside."""
    if v0.sign() * v1.sign() < 0:
        return s0 + (s1 - s0) * (v0 / (v0 - v1))
    return None


def verify_nondecreasing(trace: Trace, opt: AlignedTrajectory) -> VerificationReport:
    """Certify that the potential never decreases along (trace, opt)."""
    inst = trace.instance
    if opt.total_length != inst.total_length:
        raise MonitorError("offline trajectory does not span the instance arc length")
    report = validate_alignment(opt, inst)
    if not report.feasible:
        raise MonitorError(
            f"offline trajectory infeasible, first violation near s={report.first_violation}"
        )
    opt_prefix = opt.prefix_costs()
    events = trace.events
    records: list[PotentialRecord] = []
    first = events[0]
    records.append(
        potential_record(
            first.server,
            opt.position_at(first.s),
            _event_offset_vec(first),
            first.cost_on,
            _prefix_at(opt, opt_prefix, first.s),
            first.frame,
            first.s,
        )
    )
    for e0, e1 in zip(events, events[1:]):
        if e0.s == e1.s:
            records.append(
                potential_record(
                    e1.server,
                    opt.position_at(e1.s),
                    _event_offset_vec(e1),
                    e1.cost_on,
                    _prefix_at(opt, opt_prefix, e1.s),
                    e1.frame,
                    e1.s,
                )
            )
            continue
        iv = _Interval(e0, e1, opt, opt_prefix)
        for s in iv.checkpoints():
            records.append(iv.record_at(s))

    first_decrease = None
    for r0, r1 in zip(records, records[1:]):
        if r1.phi < r0.phi:
            first_decrease = (r1.s, r0.phi, r1.phi)
            break
    return VerificationReport(first_decrease is None, first_decrease, tuple(records))


def _event_offset_vec(e: TraceEvent) -> Vector:
    if e.phase == BISHOP:
        sx = e.frame.apply(e.server).x
        canon = Vector(-sx, ZERO)
    else:
        canon = Vector(-e.offset_mag, ZERO)
    return e.frame.unapply_vector(canon)


def _prefix_at(opt: AlignedTrajectory, prefix: list[Scalar], s: Scalar) -> Scalar:
    bps = opt.breakpoints
    ss = opt._ss
    i = bisect.bisect_left(ss, s)
    if i < len(ss) and ss[i] == s:
        return prefix[i]
    s0, p0 = bps[i - 1]
    s1, p1 = bps[i]
    return prefix[i - 1] + l1_distance(p0, p1) * ((s - s0) / (s1 - s0))


# -- terminal homing -----------------------------------------------------------


def append_homing_suffix(inst: Instance, corner: Point, reps: int) -> Instance:
    """Append repeated L-shaped request motion through `corner`.

    With the offline server parked at the corner this costs it nothing, while
    the online server is drawn onto the corner, zeroing the correction term.
    """
    end = inst.points()[-1]
    if end.x != corner.x and end.y != corner.y:
        raise MonitorError("corner must be aligned with the final request point")
    if reps == 0:
        return inst
    segs = list(inst.segments)
    if end != corner:
        delta = corner - end
        length = delta.l1_norm()
        segs.append(
            RequestSegment(
                Vector(delta.dx / length, delta.dy / length), length
            )
        )
    one = Scalar(1)
    up = Vector(ZERO, one)
    down = Vector(ZERO, -one)
    right = Vector(one, ZERO)
    left = Vector(-one, ZERO)
    for _ in range(reps):
        segs.append(RequestSegment(up, one))
        segs.append(RequestSegment(down, one))
        segs.append(RequestSegment(right, one))
        segs.append(RequestSegment(left, one))
    return Instance(inst.start, tuple(segs))


def extend_opt_to(opt: AlignedTrajectory, total: Scalar) -> AlignedTrajectory:
    """Hold the final offline position until arc length `total`."""
    if opt.total_length == total:
        return opt
    if opt.total_length > total:
        raise MonitorError("cannot shrink an offline trajectory")
    last = opt.breakpoints[-1][1]
    return AlignedTrajectory(opt.breakpoints + ((total, last),))


# -- ratio ---------------------------------------------------------------------


def competitive_ratio(trace: Trace, opt: AlignedTrajectory) -> Scalar:
    ell_on = trace.final_cost
    ell_opt = opt.path_cost()
    if ell_opt == 0:
        if ell_on == 0:
            return Scalar(1)
        raise RatioUndefined("offline cost is zero but online cost is positive")
    return ell_on / ell_opt

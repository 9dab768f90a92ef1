"""The unit-cost variant: $1 per axis-parallel move, regardless of distance.

Requests are points; the server serves a request by sharing an x or y
coordinate with it.  This module holds the cycle-based online algorithm
(at most $4 per cycle), the lazy algorithm for orthogonal inputs (at most
$3 per offline dollar), an exact offline optimum, and the unit-square
adversary that forces ratio 3 out of any online algorithm.

Coordinates are kept as plain hashable values (ints, Fractions, Scalars);
``Point`` inputs are unpacked at the boundary.  All internals work on bare
(x, y) tuples for speed — the offline oracle is run over hundreds of
thousands of short sequences in the test suite.
"""

from __future__ import annotations

from .geometry import Point

__all__ = [
    "UnitError",
    "UnitProtocolError",
    "Sweet4Server",
    "Ortho3Server",
    "sweet4_run",
    "ortho3_run",
    "bruteforce_opt",
    "exhaustive_frugal_opt",
    "adversary_unit_square",
    "move_charge",
    "transcript_to_json",
]


class UnitError(ValueError):
    pass


class UnitProtocolError(RuntimeError):
    """The online callback reported an unserviceable state."""


def _xy(r):
    if isinstance(r, Point):
        return (r.x, r.y)
    x, y = r
    return (x, y)


def _aligned(p, q) -> bool:
    return p[0] == q[0] or p[1] == q[1]


def move_charge(src, dst) -> int:
    """$1 per axis used by the move; $0 for staying put."""
    return int(src[0] != dst[0]) + int(src[1] != dst[1])


# -- the $4-per-cycle algorithm ------------------------------------------------

_IDLE = "idle"
_HAVE1 = "have1"
_CASE_A = "case-a"
_CASE_B = "case-b"
_SETTLED = "settled"


class Sweet4Server:
    """Cycle algorithm: hunt the offline server's sweet spot in <= 4 moves.

    A cycle opens on the first request the server cannot serve in place
    (r1) and closes either when the sweet spot is pinned down or when a
    request rules every candidate out.  Requests servable from the current
    position are skipped without charge in every state.
    """

    def __init__(self, start=(0, 0)):
        self.position = _xy(start)
        self.dollars = 0
        self.cycle_dollars = 0
        self.transcript: list[tuple[tuple, tuple, int]] = []
        self._state = _IDLE
        self._r1 = None
        self._r2 = None

    def _move(self, dst):
        charge = move_charge(self.position, dst)
        self.position = dst
        self.dollars += charge
        self.cycle_dollars += charge
        assert self.cycle_dollars <= 4
        return charge

    def _open_cycle(self, r):
        self.cycle_dollars = 0
        self._r1 = r
        self._state = _HAVE1
        return self._move((r[0], self.position[1]))

    def serve(self, request) -> int:
        r = _xy(request)
        if _aligned(self.position, r):
            self.transcript.append((r, self.position, 0))
            return 0
        if self._state in (_IDLE, _SETTLED):
            charge = self._open_cycle(r)
        elif self._state == _HAVE1:
            # r shares no coordinate with the server at (x1, .), so x != x1
            self._r2 = r
            charge = self._move((self._r1[0], r[1]))
            self._state = _CASE_A if r[1] == self._r1[1] else _CASE_B
        elif self._state == _CASE_A:
            # sweet spot must be (x3, y1)
            charge = self._move((r[0], self._r1[1]))
            self._state = _SETTLED
        else:  # _CASE_B
            if r[0] == self._r2[0] or r[1] == self._r1[1]:
                # a candidate survives: it is (x2, y1), two axes away
                charge = self._move((self._r2[0], self._r1[1]))
                self._state = _SETTLED
            else:
                # no sweet spot exists; r opens the next cycle
                charge = self._open_cycle(r)
        self.transcript.append((r, self.position, charge))
        return charge


# -- the lazy algorithm for orthogonal inputs ----------------------------------


class Ortho3Server:
    """Stay while aligned; otherwise make one $1 move to the previous request.

    Correct on orthogonal inputs: consecutive requests share a coordinate,
    so the previous request's point serves the new request, and the server
    is aligned with the previous request (it just served it), making the
    move a single-axis one.
    """

    def __init__(self, start=(0, 0)):
        self.position = _xy(start)
        self.dollars = 0
        self.transcript: list[tuple[tuple, tuple, int]] = []
        self._prev = None

    def serve(self, request) -> int:
        r = _xy(request)
        if self._prev is not None and not _aligned(self._prev, r):
            raise UnitError("consecutive requests must share a coordinate")
        if _aligned(self.position, r):
            charge = 0
        else:
            if self._prev is None:
                dst = (r[0], self.position[1])
            else:
                dst = self._prev
            charge = move_charge(self.position, dst)
            if charge > 1:
                raise AssertionError("lazy move must use a single axis")
            self.position = dst
            self.dollars += charge
        self._prev = r
        self.transcript.append((r, self.position, charge))
        return charge


def sweet4_run(requests, start=(0, 0)):
    """Run the cycle algorithm; returns (transcript, dollars)."""
    server = Sweet4Server(start)
    for r in requests:
        server.serve(r)
    return server.transcript, server.dollars


def ortho3_run(requests, start=(0, 0)):
    """Run the lazy algorithm on an orthogonal sequence."""
    server = Ortho3Server(start)
    for r in requests:
        server.serve(r)
    return server.transcript, server.dollars


# -- exact offline optimum -----------------------------------------------------


def bruteforce_opt(requests, start=(0, 0), limit=14):
    """Exact minimum dollars to serve the sequence from `start`.

    Dynamic program over (request index, server position).  Positions are
    restricted to frugal moves: stay when aligned, otherwise slide one
    axis onto the request's x or y line — some optimal strategy always has
    this form, since any move can be canonicalized to the cheapest one
    serving the same request without hurting the future.  Ties between
    equal-cost positions resolve to the lexicographically smallest, which
    keeps the table iteration order deterministic.
    """
    reqs = [_xy(r) for r in requests]
    if len(reqs) > limit:
        raise UnitError(f"sequence of {len(reqs)} requests exceeds limit {limit}")
    dp = {_xy(start): 0}
    for r in reqs:
        ndp: dict[tuple, int] = {}
        for p in sorted(dp):
            c = dp[p]
            if _aligned(p, r):
                if c < ndp.get(p, c + 1):
                    ndp[p] = c
                continue
            for q in ((r[0], p[1]), (p[0], r[1])):
                if c + 1 < ndp.get(q, c + 2):
                    ndp[q] = c + 1
        dp = ndp
    return min(dp.values(), default=0)


def exhaustive_frugal_opt(requests, start=(0, 0)):
    """Independent oracle: enumerate every frugal move sequence outright."""
    reqs = [_xy(r) for r in requests]

    def best(i, p):
        if i == len(reqs):
            return 0
        r = reqs[i]
        if _aligned(p, r):
            return best(i + 1, p)
        return 1 + min(best(i + 1, (r[0], p[1])), best(i + 1, (p[0], r[1])))

    return best(0, _xy(start))


# -- the unit-square adversary -------------------------------------------------


def adversary_unit_square(online, rounds: int):
    """Drive `online` around the unit square; returns the request stream.

    Each request is placed diagonally opposite the online server's current
    vertex.  The stream is orthogonal by construction as long as the online
    server stays on the square's vertices (any frugal vertex algorithm
    does); if it ever strays to a non-vertex the protocol is violated.
    """
    stream: list[tuple] = []
    prev = None
    for _ in range(rounds):
        p = online.position
        if p[0] not in (0, 1) or p[1] not in (0, 1):
            raise UnitProtocolError(f"online server off the square vertices: {p}")
        r = (1 - p[0], 1 - p[1])
        if prev is not None and not _aligned(prev, r):
            # restore orthogonality via an intermediate corner; it is
            # servable in place, so it costs the online algorithm nothing
            mid = (prev[0], r[1])
            online.serve(mid)
            stream.append(mid)
        online.serve(r)
        stream.append(r)
        prev = r
    return stream


# -- serialization -------------------------------------------------------------


def transcript_to_json(transcript):
    from .scalar import Scalar, scalar_to_json

    def coord(v):
        return scalar_to_json(Scalar.coerce(v))

    return [
        {
            "request": {"x": coord(r[0]), "y": coord(r[1])},
            "online_position": {"x": coord(p[0]), "y": coord(p[1])},
            "charge": charge,
        }
        for r, p, charge in transcript
    ]

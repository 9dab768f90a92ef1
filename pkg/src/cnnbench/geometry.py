"""L1 plane primitives: exact points, vectors and signed-permutation frames.

A ``Frame`` is an isometry of the L1 plane of the form p -> L*p + t where L
is one of the 8 signed axis permutations (rotations by multiples of 90
degrees and axis reflections).  These are exactly the coordinate redraws the
engine is allowed to perform between cycles.
"""

from __future__ import annotations

from dataclasses import dataclass

from .scalar import Scalar, ZERO, scalar_from_json, scalar_to_json

__all__ = [
    "Point",
    "Vector",
    "Frame",
    "l1_distance",
    "PERMS",
    "PERM_NAMES",
    "IDENTITY_PERM",
]


@dataclass(frozen=True)
class Point:
    x: Scalar
    y: Scalar

    def __add__(self, v: "Vector") -> "Point":
        return Point(self.x + v.dx, self.y + v.dy)

    def __sub__(self, other: "Point") -> "Vector":
        return Vector(self.x - other.x, self.y - other.y)

    def to_json(self):
        return {"x": scalar_to_json(self.x), "y": scalar_to_json(self.y)}

    @classmethod
    def from_json(cls, v, where="point"):
        return cls(
            scalar_from_json(v["x"], where + ".x"),
            scalar_from_json(v["y"], where + ".y"),
        )


@dataclass(frozen=True)
class Vector:
    dx: Scalar
    dy: Scalar

    def __add__(self, other: "Vector") -> "Vector":
        return Vector(self.dx + other.dx, self.dy + other.dy)

    def __neg__(self) -> "Vector":
        return Vector(-self.dx, -self.dy)

    def scaled(self, k: Scalar) -> "Vector":
        return Vector(self.dx * k, self.dy * k)

    def l1_norm(self) -> Scalar:
        return abs(self.dx) + abs(self.dy)

    def is_axis_parallel(self) -> bool:
        return (self.dx == 0) != (self.dy == 0)

    def to_json(self):
        return {"dx": scalar_to_json(self.dx), "dy": scalar_to_json(self.dy)}

    @classmethod
    def from_json(cls, v, where="vector"):
        return cls(
            scalar_from_json(v["dx"], where + ".dx"),
            scalar_from_json(v["dy"], where + ".dy"),
        )


def pt(x, y) -> Point:
    return Point(Scalar.coerce(x), Scalar.coerce(y))


def vec(dx, dy) -> Vector:
    return Vector(Scalar.coerce(dx), Scalar.coerce(dy))


def l1_distance(p: Point, q: Point) -> Scalar:
    return abs(p.x - q.x) + abs(p.y - q.y)


# The 8 signed permutations as 2x2 integer matrices ((m00, m01), (m10, m11)),
# acting on column vectors.  The tuple order below is the fixed tie-break
# order: proper rotations first, identity-most first.
PERMS: dict[str, tuple[tuple[int, int], tuple[int, int]]] = {
    "identity": ((1, 0), (0, 1)),
    "rot90": ((0, -1), (1, 0)),
    "rot270": ((0, 1), (-1, 0)),
    "rot180": ((-1, 0), (0, -1)),
    "flip_x": ((-1, 0), (0, 1)),
    "flip_y": ((1, 0), (0, -1)),
    "swap": ((0, 1), (1, 0)),
    "swap_neg": ((0, -1), (-1, 0)),
}
PERM_NAMES = list(PERMS)
IDENTITY_PERM = PERMS["identity"]
_NAME_OF = {m: n for n, m in PERMS.items()}


def _row_apply(a: int, b: int, dx: Scalar, dy: Scalar) -> Scalar:
    # signed-permutation rows have exactly one entry in {-1, +1}
    if a:
        return dx if a > 0 else -dx
    return dy if b > 0 else -dy


def _mat_apply(m, dx: Scalar, dy: Scalar) -> tuple[Scalar, Scalar]:
    return (_row_apply(m[0][0], m[0][1], dx, dy), _row_apply(m[1][0], m[1][1], dx, dy))


def _mat_mul(m, n):
    return tuple(
        tuple(sum(m[i][k] * n[k][j] for k in range(2)) for j in range(2))
        for i in range(2)
    )


def _mat_inv(m):
    # signed permutation matrices are orthogonal: inverse = transpose
    return ((m[0][0], m[1][0]), (m[0][1], m[1][1]))


@dataclass(frozen=True)
class Frame:
    """Map world coordinates to canonical ones: canon(p) = linear*p + t."""

    linear: tuple[tuple[int, int], tuple[int, int]]
    t: Vector

    @classmethod
    def identity(cls) -> "Frame":
        return cls(IDENTITY_PERM, Vector(ZERO, ZERO))

    def apply(self, p: Point) -> Point:
        x, y = _mat_apply(self.linear, p.x, p.y)
        return Point(x + self.t.dx, y + self.t.dy)

    def apply_vector(self, v: Vector) -> Vector:
        dx, dy = _mat_apply(self.linear, v.dx, v.dy)
        return Vector(dx, dy)

    def invert(self) -> "Frame":
        inv = _mat_inv(self.linear)
        tx, ty = _mat_apply(inv, self.t.dx, self.t.dy)
        return Frame(inv, Vector(-tx, -ty))

    def compose(self, other: "Frame") -> "Frame":
        """self after other: (self o other)(p) = self(other(p))."""
        lin = _mat_mul(self.linear, other.linear)
        tx, ty = _mat_apply(self.linear, other.t.dx, other.t.dy)
        return Frame(lin, Vector(tx + self.t.dx, ty + self.t.dy))

    def unapply_vector(self, v: Vector) -> Vector:
        dx, dy = _mat_apply(_mat_inv(self.linear), v.dx, v.dy)
        return Vector(dx, dy)

    @property
    def perm_name(self) -> str:
        return _NAME_OF[self.linear]

    def to_json(self):
        return {"perm": self.perm_name, "t": self.t.to_json()}

    @classmethod
    def from_json(cls, v, where="frame"):
        name = v["perm"]
        if name not in PERMS:
            raise ValueError(f"{where}.perm: unknown permutation {name!r}")
        return cls(PERMS[name], Vector.from_json(v["t"], where + ".t"))


def frame_apply(f: Frame, p: Point) -> Point:
    return f.apply(p)


def frame_compose(f: Frame, g: Frame) -> Frame:
    return f.compose(g)


def frame_invert(f: Frame) -> Frame:
    return f.invert()


def frame_mapping_to_plus_y(u: Vector) -> tuple[tuple[int, int], tuple[int, int]]:
    """First permutation in tie-break order sending axis direction u to +y."""
    return _first_perm_sending(u, (0, 1))


def frame_mapping_to_minus_y(u: Vector) -> tuple[tuple[int, int], tuple[int, int]]:
    """First permutation in tie-break order sending axis direction u to -y."""
    return _first_perm_sending(u, (0, -1))


def _first_perm_sending(u: Vector, target: tuple[int, int]):
    sx, sy = u.dx.sign(), u.dy.sign()
    if (sx == 0) == (sy == 0):
        raise ValueError("direction must be axis-parallel and nonzero")
    for name in PERM_NAMES:
        m = PERMS[name]
        ix = m[0][0] * sx + m[0][1] * sy
        iy = m[1][0] * sx + m[1][1] * sy
        if (ix, iy) == target:
            return m
    raise AssertionError("signed permutations act transitively on axis directions")

"""3D points, 2D paper vectors and axis directions shared by all modules."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

# Coincidence tolerance for "same point" tests, in model millimeters.
EPS = 1e-3

# Tolerance for orthonormal frames and axis/plane membership tests.
FRAME_TOL = 1e-9

Vec2 = tuple[float, float]


@dataclass(frozen=True)
class Point3:
    """A 3D point (or displacement) in model millimeters."""

    x: float
    y: float
    z: float

    def __add__(self, other: "Point3") -> "Point3":
        return Point3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Point3") -> "Point3":
        return Point3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> "Point3":
        return Point3(-self.x, -self.y, -self.z)

    def scaled(self, k: float) -> "Point3":
        return Point3(self.x * k, self.y * k, self.z * k)

    def dot(self, other: "Point3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Point3") -> "Point3":
        return Point3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def dist(self, other: "Point3") -> float:
        return (self - other).norm()

    def unit(self) -> "Point3":
        n = self.norm()
        if n == 0.0:
            raise ZeroDivisionError("cannot normalize a zero vector")
        return self.scaled(1.0 / n)

    def lerp(self, other: "Point3", t: float) -> "Point3":
        return self + (other - self).scaled(t)

    def is_close(self, other: "Point3", tol: float = EPS) -> bool:
        return self.dist(other) <= tol

    def is_finite(self) -> bool:
        return all(math.isfinite(c) for c in (self.x, self.y, self.z))

    def component(self, axis: int) -> float:
        return (self.x, self.y, self.z)[axis]

    def with_component(self, axis: int, value: float) -> "Point3":
        c = [self.x, self.y, self.z]
        c[axis] = value
        return Point3(*c)

    def to_list(self) -> list[float]:
        return [self.x, self.y, self.z]

    @staticmethod
    def from_list(vals) -> "Point3":
        return Point3(float(vals[0]), float(vals[1]), float(vals[2]))


ORIGIN = Point3(0.0, 0.0, 0.0)
UNIT_X = Point3(1.0, 0.0, 0.0)
UNIT_Y = Point3(0.0, 1.0, 0.0)
UNIT_Z = Point3(0.0, 0.0, 1.0)
GLOBAL_AXES = (UNIT_X, UNIT_Y, UNIT_Z)
AXIS_NAMES = ("x", "y", "z")


class AxisDir(Enum):
    """One of the six signed model axis directions."""

    PX = "+x"
    NX = "-x"
    PY = "+y"
    NY = "-y"
    PZ = "+z"
    NZ = "-z"

    @property
    def axis(self) -> int:
        return {"x": 0, "y": 1, "z": 2}[self.value[1]]

    @property
    def sign(self) -> float:
        return 1.0 if self.value[0] == "+" else -1.0

    @property
    def vector(self) -> Point3:
        return GLOBAL_AXES[self.axis].scaled(self.sign)

    @staticmethod
    def parse(text: str) -> "AxisDir":
        return AxisDir(text.lower())


def v2_add(a: Vec2, b: Vec2) -> Vec2:
    return (a[0] + b[0], a[1] + b[1])

def v2_sub(a: Vec2, b: Vec2) -> Vec2:
    return (a[0] - b[0], a[1] - b[1])

def v2_scale(a: Vec2, k: float) -> Vec2:
    return (a[0] * k, a[1] * k)

def v2_dot(a: Vec2, b: Vec2) -> float:
    return a[0] * b[0] + a[1] * b[1]

def v2_cross(a: Vec2, b: Vec2) -> float:
    return a[0] * b[1] - a[1] * b[0]

def v2_norm(a: Vec2) -> float:
    return math.hypot(a[0], a[1])

def v2_unit(a: Vec2) -> Vec2:
    n = v2_norm(a)
    if n == 0.0:
        raise ZeroDivisionError("cannot normalize a zero vector")
    return (a[0] / n, a[1] / n)

def v2_perp(a: Vec2) -> Vec2:
    """Counter-clockwise perpendicular."""
    return (-a[1], a[0])


def segment_point_dist_2d(p: Vec2, a: Vec2, b: Vec2) -> float:
    """Distance from p to the segment a-b in paper space."""
    ab = v2_sub(b, a)
    denom = v2_dot(ab, ab)
    if denom == 0.0:
        return v2_norm(v2_sub(p, a))
    t = v2_dot(v2_sub(p, a), ab) / denom
    t = max(0.0, min(1.0, t))
    closest = v2_add(a, v2_scale(ab, t))
    return v2_norm(v2_sub(p, closest))


def segment_param_of_point(p: Point3, a: Point3, b: Point3) -> float:
    """Parameter t of the projection of p onto the segment a-b, clamped to [0,1]."""
    ab = b - a
    denom = ab.dot(ab)
    if denom == 0.0:
        return 0.0
    t = (p - a).dot(ab) / denom
    return max(0.0, min(1.0, t))


def segment_point_dist_3d(p: Point3, a: Point3, b: Point3) -> float:
    t = segment_param_of_point(p, a, b)
    return p.dist(a.lerp(b, t))


def angle_between(a: Point3, b: Point3) -> float:
    """Spatial angle between two vectors, radians in [0, pi]."""
    na, nb = a.norm(), b.norm()
    if na == 0.0 or nb == 0.0:
        raise ZeroDivisionError("angle with zero vector")
    c = a.dot(b) / (na * nb)
    c = max(-1.0, min(1.0, c))
    return math.acos(c)

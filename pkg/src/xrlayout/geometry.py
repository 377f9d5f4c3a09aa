"""Minimal 3D geometry kernel: vectors, unit quaternions, poses, view cones.

Conventions, fixed once for the whole package:

  * right-handed coordinates, +Y up, -Z forward at identity orientation
    (so +X is to the right of an identity observer);
  * lengths in meters, angles in radians internally, degrees at API and
    file boundaries;
  * quaternions are unit, scalar-first (w, x, y, z), and q and -q denote
    the same rotation;
  * compass yaw: 0 deg faces -Z, positive turns clockwise seen from above
    (toward +X), stored in degrees in scenario files.

Poses carry an independent per-axis scale channel.  Scale composes
multiplicatively and never touches positions; this keeps composition
associative for non-uniform scales and matches how object size is used
here (size metadata, not a spatial transform of children).

All types are frozen value objects and safe to share.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DegenerateTarget

# Tolerance for geometric equality assertions (positions in meters,
# angles in radians, quaternion components).
GEOM_EPS = 1e-9
# Below this length a direction is considered undefined.
DEGENERACY_EPS = 1e-12


@dataclass(frozen=True)
class Vec3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        for c in (self.x, self.y, self.z):
            if not math.isfinite(c):
                raise ValueError(f"non-finite vector component: {c!r}")

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __mul__(self, s: float) -> "Vec3":
        return Vec3(self.x * s, self.y * s, self.z * s)

    __rmul__ = __mul__

    def __neg__(self) -> "Vec3":
        return Vec3(-self.x, -self.y, -self.z)

    def hadamard(self, other: "Vec3") -> "Vec3":
        """Per-axis product; used for scale composition."""
        return Vec3(self.x * other.x, self.y * other.y, self.z * other.z)

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Vec3") -> "Vec3":
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def normalized(self) -> "Vec3":
        n = self.norm()
        if n < DEGENERACY_EPS:
            raise DegenerateTarget("cannot normalize a near-zero vector")
        return Vec3(self.x / n, self.y / n, self.z / n)

    def horizontal(self) -> "Vec3":
        """Projection onto the ground plane (y zeroed)."""
        return Vec3(self.x, 0.0, self.z)

    def distance_to(self, other: "Vec3") -> float:
        return (other - self).norm()

    def is_close(self, other: "Vec3", tol: float = GEOM_EPS) -> bool:
        return self.distance_to(other) <= tol

    def to_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    @classmethod
    def from_seq(cls, seq) -> "Vec3":
        x, y, z = seq
        return cls(float(x), float(y), float(z))


ZERO = Vec3(0.0, 0.0, 0.0)
ONES = Vec3(1.0, 1.0, 1.0)
UP = Vec3(0.0, 1.0, 0.0)
FORWARD = Vec3(0.0, 0.0, -1.0)
RIGHT = Vec3(1.0, 0.0, 0.0)


def angle_between(u: Vec3, v: Vec3) -> float:
    """Unsigned angle between two directions, radians in [0, pi].

    atan2 form: numerically stable near 0 and pi, unlike plain acos.
    """
    nu, nv = u.norm(), v.norm()
    if nu < DEGENERACY_EPS or nv < DEGENERACY_EPS:
        raise DegenerateTarget("angle against a near-zero direction")
    return math.atan2(u.cross(v).norm(), u.dot(v))


@dataclass(frozen=True)
class Rotation:
    """Unit quaternion, scalar first.  Normalized on construction."""

    w: float
    x: float
    y: float
    z: float

    def __post_init__(self):
        n = math.sqrt(self.w**2 + self.x**2 + self.y**2 + self.z**2)
        if not math.isfinite(n) or n < DEGENERACY_EPS:
            raise ValueError("degenerate quaternion")
        if abs(n - 1.0) > GEOM_EPS:
            object.__setattr__(self, "w", self.w / n)
            object.__setattr__(self, "x", self.x / n)
            object.__setattr__(self, "y", self.y / n)
            object.__setattr__(self, "z", self.z / n)

    @classmethod
    def identity(cls) -> "Rotation":
        return cls(1.0, 0.0, 0.0, 0.0)

    @classmethod
    def from_axis_angle(cls, axis: Vec3, angle_rad: float) -> "Rotation":
        a = axis.normalized()
        h = 0.5 * angle_rad
        s = math.sin(h)
        return cls(math.cos(h), a.x * s, a.y * s, a.z * s)

    def __mul__(self, other: "Rotation") -> "Rotation":
        """Hamilton product; self is applied after other."""
        w1, x1, y1, z1 = self.w, self.x, self.y, self.z
        w2, x2, y2, z2 = other.w, other.x, other.y, other.z
        return Rotation(
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        )

    def inverse(self) -> "Rotation":
        return Rotation(self.w, -self.x, -self.y, -self.z)

    def rotate(self, v: Vec3) -> Vec3:
        # q v q* expanded via the two-cross-product identity.
        u = Vec3(self.x, self.y, self.z)
        t = u.cross(v) * 2.0
        return v + t * self.w + u.cross(t)

    def forward(self) -> Vec3:
        """World direction of the local -Z axis."""
        return self.rotate(FORWARD)

    def up(self) -> Vec3:
        return self.rotate(UP)

    def to_matrix(self) -> list[list[float]]:
        """3x3 row-major rotation matrix (columns are local axes in world)."""
        w, x, y, z = self.w, self.x, self.y, self.z
        return [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]

    @classmethod
    def from_matrix(cls, m) -> "Rotation":
        """Shepperd's method; picks the numerically largest pivot."""
        m00, m01, m02 = m[0]
        m10, m11, m12 = m[1]
        m20, m21, m22 = m[2]
        tr = m00 + m11 + m22
        if tr > 0:
            s = math.sqrt(tr + 1.0) * 2
            return cls(0.25 * s, (m21 - m12) / s, (m02 - m20) / s, (m10 - m01) / s)
        if m00 > m11 and m00 > m22:
            s = math.sqrt(1.0 + m00 - m11 - m22) * 2
            return cls((m21 - m12) / s, 0.25 * s, (m01 + m10) / s, (m02 + m20) / s)
        if m11 > m22:
            s = math.sqrt(1.0 + m11 - m00 - m22) * 2
            return cls((m02 - m20) / s, (m01 + m10) / s, 0.25 * s, (m12 + m21) / s)
        s = math.sqrt(1.0 + m22 - m00 - m11) * 2
        return cls((m10 - m01) / s, (m02 + m20) / s, (m12 + m21) / s, 0.25 * s)

    def angle_to(self, other: "Rotation") -> float:
        """Geodesic angle between two rotations, radians in [0, pi].

        atan2 over the relative quaternion, not acos of the dot product:
        acos loses ~1e-8 of precision right where rotations are nearly
        equal, which is exactly where tolerance checks look.
        """
        d = self.inverse() * other
        vec = math.sqrt(d.x * d.x + d.y * d.y + d.z * d.z)
        return 2.0 * math.atan2(vec, abs(d.w))

    def approx_eq(self, other: "Rotation", tol: float = GEOM_EPS) -> bool:
        """Equality as rotations, i.e. up to quaternion sign."""
        return self.angle_to(other) <= tol

    def slerp(self, other: "Rotation", t: float) -> "Rotation":
        d = self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
        ow, ox, oy, oz = other.w, other.x, other.y, other.z
        if d < 0.0:  # take the short arc
            d, ow, ox, oy, oz = -d, -ow, -ox, -oy, -oz
        if d > 1.0 - 1e-12:
            return Rotation(
                self.w + t * (ow - self.w),
                self.x + t * (ox - self.x),
                self.y + t * (oy - self.y),
                self.z + t * (oz - self.z),
            )
        theta = math.acos(d)
        sa = math.sin(theta)
        ka = math.sin((1 - t) * theta) / sa
        kb = math.sin(t * theta) / sa
        return Rotation(
            ka * self.w + kb * ow,
            ka * self.x + kb * ox,
            ka * self.y + kb * oy,
            ka * self.z + kb * oz,
        )


def yaw_rotation(yaw_deg: float) -> Rotation:
    """Compass yaw: 0 faces -Z, positive turns toward +X (right).

    Equivalent to rotating by -yaw about the +Y axis in right-handed terms.
    """
    return Rotation.from_axis_angle(UP, -math.radians(yaw_deg))


def facing_yaw_deg(direction: Vec3) -> float:
    """Inverse of yaw_rotation restricted to the ground plane, in (-180, 180]."""
    h = direction.horizontal()
    if h.norm() < DEGENERACY_EPS:
        raise DegenerateTarget("facing yaw of a vertical direction")
    d = math.degrees(math.atan2(h.x, -h.z))
    return 180.0 if d == -180.0 else d  # keep yaw in (-180, 180]


def look_rotation(forward: Vec3, up: Vec3 = UP) -> Rotation:
    """Rotation whose local -Z points along forward with up as the up hint.

    Falls back to a forward-based hint when forward is near-parallel to up.
    """
    f = forward.normalized()
    zaxis = -f
    if abs(f.dot(up)) > 1.0 - 1e-9:
        up = FORWARD if abs(f.dot(FORWARD)) < 0.9 else RIGHT
    xaxis = up.cross(zaxis).normalized()
    yaxis = zaxis.cross(xaxis)
    return Rotation.from_matrix(
        [
            [xaxis.x, yaxis.x, zaxis.x],
            [xaxis.y, yaxis.y, zaxis.y],
            [xaxis.z, yaxis.z, zaxis.z],
        ]
    )


@dataclass(frozen=True)
class Pose:
    """Position, orientation and per-axis positive scale."""

    position: Vec3 = ZERO
    orientation: Rotation = field(default_factory=Rotation.identity)
    scale: Vec3 = ONES

    def __post_init__(self):
        if min(self.scale.x, self.scale.y, self.scale.z) <= 0.0:
            raise ValueError(f"scale must be positive, got {self.scale}")

    def apply_to_point(self, p: Vec3) -> Vec3:
        """Rigid map of a point from this frame into the parent frame."""
        return self.position + self.orientation.rotate(p)

    def apply_to_direction(self, d: Vec3) -> Vec3:
        return self.orientation.rotate(d)

    def relative_to(self, frame: "Pose") -> "Pose":
        """Express this pose in the given frame's coordinates."""
        inv = frame.orientation.inverse()
        return Pose(
            position=inv.rotate(self.position - frame.position),
            orientation=inv * self.orientation,
            scale=Vec3(
                self.scale.x / frame.scale.x,
                self.scale.y / frame.scale.y,
                self.scale.z / frame.scale.z,
            ),
        )

    def is_close(self, other: "Pose", tol: float = GEOM_EPS) -> bool:
        return (
            self.position.is_close(other.position, tol)
            and self.orientation.approx_eq(other.orientation, tol)
            and self.scale.is_close(other.scale, tol)
        )


def compose(parent: Pose, local: Pose) -> Pose:
    """Pose composition: rigid position/orientation, per-axis scale channel.

    Positions are deliberately not scaled by the parent: scale is size
    metadata here, and leaving it out of translation keeps composition
    associative under non-uniform scales.
    """
    return Pose(
        position=parent.position + parent.orientation.rotate(local.position),
        orientation=parent.orientation * local.orientation,
        scale=parent.scale.hadamard(local.scale),
    )


def cartesian_from_spherical(r: float, theta: float, phi: float) -> Vec3:
    """Spherical to Cartesian, physics convention mapped onto our axes.

    theta is the polar angle from +up (+Y); phi is azimuth from -Z
    (forward), positive per the right-hand rule about +Y.  r >= 0.
    """
    if r < 0:
        raise ValueError("radius must be non-negative")
    s = math.sin(theta)
    return Vec3(-r * s * math.sin(phi), r * math.cos(theta), -r * s * math.cos(phi))


@dataclass(frozen=True)
class FovSpec:
    """Circular view-cone model of a display field of view.

    diagonal_deg is the full diagonal angle; visibility uses its half as
    the cone half-angle.  aspect_ratio is carried for downstream layout
    but does not affect the cone test.
    """

    diagonal_deg: float = 52.0
    aspect_ratio: float = 16.0 / 9.0

    def __post_init__(self):
        if not 0.0 < self.diagonal_deg < 180.0:
            raise ValueError(f"diagonal FOV out of range: {self.diagonal_deg}")
        if self.aspect_ratio <= 0.0:
            raise ValueError(f"aspect ratio must be positive: {self.aspect_ratio}")

    @property
    def half_angle_deg(self) -> float:
        return 0.5 * self.diagonal_deg


def angular_deviation(head: Pose, target: Vec3) -> float:
    """Angle in degrees between the head's forward axis and the target.

    Raises DegenerateTarget when the target sits at the head position
    (within DEGENERACY_EPS).
    """
    offset = target - head.position
    if offset.norm() < DEGENERACY_EPS:
        raise DegenerateTarget("target coincides with the viewpoint")
    return math.degrees(angle_between(head.orientation.forward(), offset))


def in_fov(head: Pose, target: Vec3, fov: FovSpec) -> bool:
    """Cone visibility: deviation no greater than half the diagonal angle."""
    return angular_deviation(head, target) <= fov.half_angle_deg

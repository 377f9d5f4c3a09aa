"""Panel placement strategies.

Two strategies carry the interesting behavior:

  * body_fixed: each panel sits at a fixed compass bearing in the user's
    body frame (0 = straight ahead, positive = right), at a fixed distance
    and height.  The layout never changes relative to the body.

  * environment_referenced: each panel is re-aimed every update onto the
    horizontal ray from the user's body toward that panel's intermediary
    (the person or poster the panel's content belongs to), at a fixed
    horizontal distance.  Looking at the intermediary therefore always
    brings its panel into view, and panels rearrange themselves as the
    user or the intermediaries move.

world_fixed, object_fixed and head_fixed are the classic baselines and are
supported for comparison runs.

Panels are kept upright (no vertical tilt): they yaw to face the user's
body position at eye height, with world up as their up axis.  All direct
placement functions are pure; the only runtime state in this module is the
EnvironmentReferencedPlacer's hold-last-pose cache for degenerate frames
(user standing exactly on an intermediary), which is confined to one
placer instance.

emit_layouts mirrors the direct functions through the frames machinery:
body_fixed emits unified user-body frames, environment_referenced emits
hybrid frames (position and scale follow the body, orientation follows a
derived bearing entity).  Resolving an emission must match the direct
computation to within GEOM_EPS; tests compare both routes.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

from .designspace import SizeSpec, SpatialLayout
from .errors import (
    DegenerateIntermediary,
    MissingConfig,
    UnknownPanelId,
    WarningEvent,
)
from .frames import USER_BODY, USER_HEAD, WORLD, FrameOfReference, SceneState
from .geometry import (
    UP,
    Pose,
    Vec3,
    facing_yaw_deg,
    look_rotation,
    yaw_rotation,
)

# Horizontal user-intermediary distances below this leave the panel
# bearing undefined.
DEGENERATE_HORIZONTAL_M = 1e-6

# Comfortable reading band for the panel distance; values outside it are
# legal but almost certainly a configuration mistake, so they warn.
PANEL_DISTANCE_SOFT_RANGE_M = (0.4, 2.0)


class PlacementWarning(UserWarning):
    pass


class Strategy(str, Enum):
    WORLD_FIXED = "world_fixed"
    OBJECT_FIXED = "object_fixed"
    HEAD_FIXED = "head_fixed"
    BODY_FIXED = "body_fixed"
    ENVIRONMENT_REFERENCED = "environment_referenced"


@dataclass(frozen=True)
class PlacementParams:
    """Geometry shared by all panels of a session."""

    panel_distance: float = 1.2  # m, horizontal, user body to panel center
    panel_height: float = 1.5  # m, panel center above the body's ground level
    eye_height: float = 1.6  # m, user eye above the body's ground level
    panel_scale: Vec3 = Vec3(1.4, 0.8, 0.02)
    aspect_ratio: float = 1.75

    def __post_init__(self):
        for name in ("panel_distance", "panel_height", "eye_height"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.aspect_ratio <= 0:
            raise ValueError("aspect_ratio must be positive")
        lo, hi = PANEL_DISTANCE_SOFT_RANGE_M
        if not lo <= self.panel_distance <= hi:
            warnings.warn(
                f"panel_distance {self.panel_distance} m outside comfortable "
                f"band [{lo}, {hi}] m",
                PlacementWarning,
                stacklevel=2,
            )


def bearing_direction(body: Pose, bearing_deg: float) -> Vec3:
    """Unit horizontal direction at a compass bearing from body forward."""
    fwd = body.orientation.forward().horizontal()
    if fwd.norm() < 1e-12:
        # Body pitched straight up/down never happens for scripted bodies;
        # fall back to world forward so the result stays defined.
        fwd = Vec3(0.0, 0.0, -1.0)
    base = facing_yaw_deg(fwd)
    return yaw_rotation(base + bearing_deg).forward()


def _upright_facing(center: Vec3, body_pos: Vec3):
    """Orientation for a panel at center, yawed to face the body, upright."""
    back = (body_pos - center).horizontal()
    return look_rotation(back.normalized(), UP)


def place_body_fixed(
    state: SceneState,
    bearings: Mapping[str, float],
    params: PlacementParams,
    panel_ids=None,
) -> dict[str, Pose]:
    """Direct body-fixed placement for the given panels.

    Each panel goes panel_distance out from the user's body position along
    its configured bearing (relative to the body's horizontal forward),
    with its center panel_height above the body's ground level, facing the
    user, upright.
    """
    body = state.pose_of(USER_BODY)
    out: dict[str, Pose] = {}
    for pid in bearings if panel_ids is None else panel_ids:
        if pid not in bearings:
            raise UnknownPanelId(pid)
        direction = bearing_direction(body, bearings[pid])
        center = body.position + direction * params.panel_distance + UP * params.panel_height
        out[pid] = Pose(
            position=center,
            orientation=_upright_facing(center, body.position),
            scale=params.panel_scale,
        )
    return out


def place_environment_referenced(
    state: SceneState,
    intermediaries: Mapping[str, str],
    params: PlacementParams,
    panel_ids=None,
) -> dict[str, Pose]:
    """Direct environment-referenced placement for the given panels.

    The panel center lies on the horizontal ray from the user's body
    toward the panel's intermediary, at the configured horizontal distance
    (even when the intermediary itself is nearer), panel_height above the
    body's ground level, facing the user, upright.

    Raises DegenerateIntermediary when that ray is undefined; callers that
    want hold-last-pose behavior use EnvironmentReferencedPlacer.
    """
    body = state.pose_of(USER_BODY)
    out: dict[str, Pose] = {}
    for pid in intermediaries if panel_ids is None else panel_ids:
        if pid not in intermediaries:
            raise UnknownPanelId(pid)
        target = state.pose_of(intermediaries[pid])
        offset = (target.position - body.position).horizontal()
        dist = offset.norm()
        if dist < DEGENERATE_HORIZONTAL_M:
            raise DegenerateIntermediary(pid, dist)
        direction = offset * (1.0 / dist)
        center = body.position + direction * params.panel_distance + UP * params.panel_height
        out[pid] = Pose(
            position=center,
            orientation=_upright_facing(center, body.position),
            scale=params.panel_scale,
        )
    return out


class EnvironmentReferencedPlacer:
    """Stateful wrapper adding hold-last-pose behavior on degeneracy.

    While the user stands (horizontally) on top of an intermediary the
    panel's bearing is undefined; rather than flinging the panel around,
    the placer keeps the last valid pose and records a warning event.  If
    the very first update is already degenerate there is nothing to hold,
    so the underlying error propagates.
    """

    def __init__(self, intermediaries: Mapping[str, str], params: PlacementParams):
        self.intermediaries = dict(intermediaries)
        self.params = params
        self.warnings: list[WarningEvent] = []
        self._last: dict[str, Pose] = {}

    def place(self, state: SceneState) -> dict[str, Pose]:
        out: dict[str, Pose] = {}
        for pid in self.intermediaries:
            try:
                out[pid] = place_environment_referenced(
                    state, self.intermediaries, self.params, panel_ids=[pid]
                )[pid]
            except DegenerateIntermediary as exc:
                if pid not in self._last:
                    raise
                out[pid] = self._last[pid]
                self.warnings.append(
                    WarningEvent(
                        time=state.time,
                        subject=pid,
                        message="degenerate intermediary bearing; holding last pose",
                        extra={"distance": exc.distance},
                    )
                )
        self._last.update(out)
        return out


@dataclass(frozen=True)
class LayoutEmission:
    """Layouts plus any derived entity poses they reference.

    Environment-referenced layouts orient themselves by per-panel bearing
    entities that are not part of the authored scene; merge derived_poses
    into the state before resolving.
    """

    layouts: dict[str, SpatialLayout]
    derived_poses: dict[str, Pose] = field(default_factory=dict)


def bearing_entity_id(panel_id: str) -> str:
    return f"bearing:{panel_id}"


def emit_layouts(
    strategy: Strategy,
    state: SceneState,
    params: PlacementParams,
    *,
    bearings: Mapping[str, float] | None = None,
    intermediaries: Mapping[str, str] | None = None,
    world_poses: Mapping[str, Pose] | None = None,
    anchors: Mapping[str, tuple[str, Pose]] | None = None,
) -> LayoutEmission:
    """Express a strategy's placement as frame-of-reference layouts.

    Config per strategy: bearings for body_fixed and head_fixed,
    intermediaries for environment_referenced, world_poses for
    world_fixed, anchors (entity ref + local pose) for object_fixed.
    Raises MissingConfig when the needed one is absent.
    """
    size = SizeSpec(scale=params.panel_scale, aspect_ratio=params.aspect_ratio)
    ident = lambda s: SpatialLayout(FrameOfReference.unified(s), Pose(), size)  # noqa: E731

    if strategy in (Strategy.BODY_FIXED, Strategy.HEAD_FIXED):
        if bearings is None:
            raise MissingConfig(strategy.value, "bearings")
        frame_ref = USER_BODY if strategy is Strategy.BODY_FIXED else USER_HEAD
        # In the head frame the panels ring the eyes, so no height term.
        height = params.panel_height if strategy is Strategy.BODY_FIXED else 0.0
        layouts = {}
        for pid, b in bearings.items():
            d = yaw_rotation(b).forward() * params.panel_distance + UP * height
            layouts[pid] = SpatialLayout(
                FrameOfReference.unified(frame_ref),
                Pose(position=d, orientation=yaw_rotation(b + 180.0)),
                size,
            )
        return LayoutEmission(layouts)

    if strategy is Strategy.ENVIRONMENT_REFERENCED:
        if intermediaries is None:
            raise MissingConfig(strategy.value, "intermediaries")
        body = state.pose_of(USER_BODY)
        layouts: dict[str, SpatialLayout] = {}
        derived: dict[str, Pose] = {}
        local = Pose(
            position=Vec3(0.0, params.panel_height, -params.panel_distance),
            orientation=yaw_rotation(180.0),
        )
        for pid, inter in intermediaries.items():
            target = state.pose_of(inter)
            offset = (target.position - body.position).horizontal()
            if offset.norm() < DEGENERATE_HORIZONTAL_M:
                raise DegenerateIntermediary(pid, offset.norm())
            bid = bearing_entity_id(pid)
            derived[bid] = Pose(
                position=body.position,
                orientation=look_rotation(offset.normalized(), UP),
            )
            layouts[pid] = SpatialLayout(
                FrameOfReference(
                    position_ref=USER_BODY, orientation_ref=bid, scale_ref=USER_BODY
                ),
                local,
                size,
            )
        return LayoutEmission(layouts, derived)

    if strategy is Strategy.WORLD_FIXED:
        if world_poses is None:
            raise MissingConfig(strategy.value, "world_poses")
        return LayoutEmission(
            {
                pid: SpatialLayout(FrameOfReference.unified(WORLD), pose, size)
                for pid, pose in world_poses.items()
            }
        )

    if strategy is Strategy.OBJECT_FIXED:
        if anchors is None:
            raise MissingConfig(strategy.value, "anchors")
        return LayoutEmission(
            {
                pid: SpatialLayout(FrameOfReference.unified(ref), local, size)
                for pid, (ref, local) in anchors.items()
            }
        )

    raise MissingConfig(str(strategy), "a recognized strategy")


def collinearity_error_rad(
    body_pos: Vec3, panel_center: Vec3, intermediary_pos: Vec3
) -> float:
    """Horizontal angle between body->panel and body->intermediary rays."""
    a = (panel_center - body_pos).horizontal()
    b = (intermediary_pos - body_pos).horizontal()
    return math.atan2(a.cross(b).norm(), a.dot(b))


def reheighted_intermediary(
    head: Pose, panel_center: Vec3, intermediary_pos: Vec3
) -> Vec3:
    """The intermediary's horizontal location lifted onto the head-panel ray.

    Environment-referenced panels share a vertical plane with their
    intermediary as seen from the body, so the point directly above/below
    the intermediary that lies on the ray from the head through the panel
    center is the height-neutral stand-in used by the visibility
    equivalence: the panel is in the view cone exactly when this point is.
    """
    to_panel = panel_center - head.position
    horiz_panel = to_panel.horizontal().norm()
    horiz_inter = (intermediary_pos - head.position).horizontal().norm()
    if horiz_panel < DEGENERATE_HORIZONTAL_M:
        raise DegenerateIntermediary("<panel>", horiz_panel)
    s = horiz_inter / horiz_panel
    lifted = head.position + to_panel * s
    return Vec3(intermediary_pos.x, lifted.y, intermediary_pos.z)

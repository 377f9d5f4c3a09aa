"""Hybrid frames of reference: mixing position, orientation, and scale anchors.

A layout names three reference frames independently.  The position_ref
decides which entity the offset is measured from, the orientation_ref
decides which frame the offset (and the object's facing) rotates with,
and the scale_ref contributes a size channel.  The interesting cases are
the mixed ones: an object can ride the user's body while keeping a
compass-stable offset, or stay put in the world while turning with the
user's head.

Run: python3 demos/01_frames_of_reference.py
"""

from xrlayout import (
    USER_BODY,
    FrameOfReference,
    Pose,
    SceneState,
    SizeSpec,
    SpatialLayout,
    Vec3,
    resolve_world_pose,
    yaw_rotation,
)


def state_with_body_yaw(yaw_deg):
    body = Pose(position=Vec3(2.0, 0.0, -1.0), orientation=yaw_rotation(yaw_deg))
    return SceneState(0.0, {USER_BODY: body})


def show(title, layout):
    print(f"\n{title}")
    print(f"  frame: position={layout.frame.position_ref!r} "
          f"orientation={layout.frame.orientation_ref!r}")
    for yaw in (0.0, 45.0, 90.0, 180.0):
        pose = resolve_world_pose(layout, state_with_body_yaw(yaw))
        p = pose.position
        print(f"  body yaw {yaw:5.0f} deg -> world position "
              f"({p.x:+.3f}, {p.y:+.3f}, {p.z:+.3f})")


def main():
    offset = Pose(position=Vec3(0.0, 1.5, -1.2))  # 1.2 m ahead, chest height

    # Fully body-fixed: the offset swings around as the body turns.
    unified = SpatialLayout(
        frame=FrameOfReference.unified(USER_BODY),
        local_pose=offset,
        size=SizeSpec(scale=Vec3(1.4, 0.8, 0.02), aspect_ratio=1.75),
    )
    show("body-fixed (offset turns with the body)", unified)

    # Hybrid: position rides the body, orientation stays on the compass.
    # The panel keeps pointing the same way no matter where the user looks,
    # so it sits north of the user at every yaw.
    hybrid = SpatialLayout(
        frame=FrameOfReference(
            position_ref=USER_BODY, orientation_ref="world", scale_ref="world"
        ),
        local_pose=offset,
        size=SizeSpec(scale=Vec3(1.4, 0.8, 0.02), aspect_ratio=1.75),
    )
    show("hybrid (offset anchored to the compass)", hybrid)

    # The size channel is independent too: scale comes from whichever
    # frame scale_ref names, and the aspect ratio is enforced afterwards.
    pose = resolve_world_pose(hybrid, state_with_body_yaw(0.0))
    s = pose.scale
    print(f"\ncorrected scale: ({s.x:.3f}, {s.y:.3f}, {s.z:.3f})  "
          f"(y forced to x / aspect_ratio)")


if __name__ == "__main__":
    main()

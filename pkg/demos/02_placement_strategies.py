"""Panel placement strategies side by side on one scene.

The same three content panels are placed with each strategy while an
intermediary (a conversation partner) walks across the room.  The
environment-referenced placer keeps each panel between the user and its
intermediary; the other strategies ignore the intermediary entirely.

Run: python3 demos/02_placement_strategies.py
"""

from xrlayout import (
    USER_BODY,
    USER_HEAD,
    EnvironmentReferencedPlacer,
    PlacementParams,
    Pose,
    SceneState,
    Strategy,
    Vec3,
    place_body_fixed,
    place_environment_referenced,
    yaw_rotation,
)

BEARINGS = {"panel_sports": 0.0, "panel_food": 90.0, "panel_movies": -90.0}
INTERMEDIARIES = {
    "panel_sports": "host_sports",
    "panel_food": "host_food",
    "panel_movies": "host_movies",
}


def make_state(t, food_host_x):
    body = Pose(orientation=yaw_rotation(0.0))
    return SceneState(
        t,
        {
            USER_BODY: body,
            USER_HEAD: Pose(position=Vec3(0.0, 1.6, 0.0)),
            "host_sports": Pose(position=Vec3(0.0, 0.0, -3.0)),
            "host_food": Pose(position=Vec3(food_host_x, 0.0, 0.0)),
            "host_movies": Pose(position=Vec3(3.0, 0.0, 0.0)),
        },
    )


def fmt(pose):
    p = pose.position
    return f"({p.x:+.2f}, {p.y:+.2f}, {p.z:+.2f})"


def main():
    params = PlacementParams()
    state = make_state(0.0, -3.0)

    print("panel centers, one scene state:")
    env = place_environment_referenced(state, INTERMEDIARIES, params)
    body = place_body_fixed(state, BEARINGS, params)
    for pid in sorted(BEARINGS):
        print(f"  {pid:13s} env-ref {fmt(env[pid])}   body-fixed {fmt(body[pid])}")

    # The adaptive placer tracks a moving intermediary and holds the last
    # good pose if the geometry degenerates (partner standing on top of
    # the user).
    print("\nfood panel while its host walks from x=-3 to x=+0.4:")
    placer = EnvironmentReferencedPlacer(INTERMEDIARIES, params)
    for t, x in enumerate((-3.0, -2.0, -1.0, -0.4, 0.0, 0.4)):
        poses = placer.place(make_state(float(t), x))
        note = ""
        if placer.warnings and placer.warnings[-1].time == float(t):
            note = f"  <- {placer.warnings[-1].message}"
        print(f"  host x {x:+.1f}: panel {fmt(poses['panel_food'])}{note}")

    print("\nstrategies on offer:", ", ".join(s.value for s in Strategy))


if __name__ == "__main__":
    main()

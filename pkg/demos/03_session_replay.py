"""Replaying one bundled session with the synthetic gaze agent.

Loads a mobile session where three conversation partners move around the
user, simulates it once per placement strategy, and prints trial-level
metrics plus the agent's gaze timeline around the first question.

Run: python3 demos/03_session_replay.py
"""

from xrlayout import (
    Strategy,
    load_bundled,
    session_metrics,
    simulate_session,
)

SCENARIO = "dynamic_mobile_env_ref"


def describe(target):
    return repr(target)


def main():
    scn = load_bundled(SCENARIO)
    print(f"{scn.name}: {scn.setting} setting, {scn.user_state} user, "
          f"{len(scn.trials)} trials")

    for strategy in (Strategy.ENVIRONMENT_REFERENCED, Strategy.BODY_FIXED):
        trace = simulate_session(scn, strategy=strategy, seed=42)
        rows = session_metrics(trace)
        print(f"\n{strategy.value}:")
        print("  trial  category  country     nav time  switches  errors")
        for r in rows:
            print(f"  {r.trial_index:5d}  {r.category:8s}  {r.country:10s}"
                  f"  {r.navigation_time_s:7.3f}s  {r.gaze_switches:8d}  {r.errors:6d}")

    # A closer look at what the agent actually fixated during trial 0.
    trace = simulate_session(scn, strategy=Strategy.BODY_FIXED, seed=42)
    tt = trace.trials[0]
    print(f"\ngaze timeline, trial 0 ({tt.trial.category}/{tt.trial.country}), "
          f"question complete at {tt.t_complete:.2f}s:")
    for seg in tt.segments:
        print(f"  {seg.t0:7.3f} .. {seg.t1:7.3f}  {describe(seg.target)}")
    for o in tt.opens:
        flag = "correct" if o.correct else "WRONG"
        print(f"  opened {o.category}/{o.country} cell ({o.row},{o.col}) "
              f"at {o.t:.3f}s [{flag}]")


if __name__ == "__main__":
    main()

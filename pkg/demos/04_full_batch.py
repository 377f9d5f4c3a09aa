"""Full batch: every bundled session, adaptive vs body baseline.

Simulates all four contexts under both bundled strategies, aggregates
per-session metrics, and prints the comparison the batch CLI would write
to disk (`xrlayout run --all`).

Run: python3 demos/04_full_batch.py
"""

from collections import defaultdict

from xrlayout import (
    aggregate,
    bundled_scenario_names,
    load_bundled,
    session_metrics,
    simulate_session,
)

SEED = 42


def main():
    by_context = defaultdict(dict)
    for name in sorted(bundled_scenario_names()):
        scn = load_bundled(name)
        trace = simulate_session(scn, seed=SEED)
        summary = aggregate(session_metrics(trace), seed=SEED)
        by_context[summary.context][summary.strategy] = summary

    print(f"seed {SEED}; nav time in seconds, switches per trial\n")
    print(f"{'context':20s} {'strategy':26s} {'nav mean':>9s} {'nav sd':>7s} "
          f"{'switches':>9s} {'errors':>7s} {'relevant':>9s}")
    for context in sorted(by_context):
        for strategy in sorted(by_context[context]):
            s = by_context[context][strategy]
            print(f"{context:20s} {strategy:26s} {s.nav_time_mean_s:9.3f} "
                  f"{s.nav_time_sd_s:7.3f} {s.switches_mean:9.3f} "
                  f"{s.errors_total:7d} {s.relevant_fraction:9.3f}")

    print("\nadaptive placement vs the body baseline (same seed):")
    for context in sorted(by_context):
        pair = by_context[context]
        if len(pair) != 2:
            continue
        env = pair["environment_referenced"]
        body = pair["body_fixed"]
        dn = env.nav_time_mean_s - body.nav_time_mean_s
        ds = env.switches_mean - body.switches_mean
        print(f"  {context:20s} nav {dn:+.3f}s  switches {ds:+.3f}")


if __name__ == "__main__":
    main()

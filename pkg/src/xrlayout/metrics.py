"""Placement-quality metrics over gaze traces, plus tabular export.

Metrics are computed from gaze sample streams (time-stamped target
observations) rather than from the simulator's internals, so recorded
hardware streams and synthetic traces go through the same code path.
"""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
from dataclasses import dataclass
from typing import Iterable, Sequence

from .agent import (
    DocumentGaze,
    GazeSample,
    OpenEvent,
    SessionTrace,
    TrialTrace,
    panel_category_of,
)
from .errors import EmptyTrialSet, IncompleteTrial
from .scenario import Trial, grid_cell

# A glance shorter than this is a saccade passing through, not a fixation.
DEFAULT_MIN_FIXATION_S = 0.15


def _dwells(samples: Sequence[GazeSample], end_time: float):
    """Collapse a sample stream into (t0, t1, target) dwell runs."""
    runs = []
    for s in samples:
        if runs and runs[-1][2] == s.target:
            continue
        if runs:
            runs[-1] = (runs[-1][0], s.t, runs[-1][2])
        runs.append([s.t, end_time, s.target])
    return [(a, b, t) for a, b, t in runs]


def navigation_time(
    samples: Sequence[GazeSample],
    trial: Trial,
    *,
    end_time: float,
    min_fixation: float = DEFAULT_MIN_FIXATION_S,
) -> float:
    """Seconds from full question presentation to the first qualifying
    fixation on the correct document cell.

    Raises IncompleteTrial when no such fixation exists in the stream.
    """
    row, col = grid_cell(trial.category, trial.country)
    want = DocumentGaze(trial.category, row, col)
    t_done = trial.question_complete
    for t0, t1, target in _dwells(samples, end_time):
        if target != want:
            continue
        start = max(t0, t_done)
        if t1 - start >= min_fixation - 1e-12:
            return start - t_done
    raise IncompleteTrial(
        f"no fixation >= {min_fixation}s on {trial.category}/{trial.country}"
    )


def gaze_switches(
    samples: Sequence[GazeSample],
    *,
    window: tuple[float, float] | None = None,
) -> int:
    """Transitions between distinct panels within the window.

    Document fixations count as being on their panel.  Off-panel targets
    (hosts, the screen, saccades) neither count nor reset the previous
    panel, so glancing away and back to the same panel is not a switch.
    """
    last: str | None = None
    switches = 0
    for s in samples:
        if window is not None and not (window[0] <= s.t < window[1]):
            continue
        cat = panel_category_of(s.target)
        if cat is None:
            continue
        if last is not None and cat != last:
            switches += 1
        last = cat
    return switches


def error_events(opens: Iterable[OpenEvent]) -> list[OpenEvent]:
    """Wrong-document opens, in time order."""
    return sorted((o for o in opens if not o.correct), key=lambda o: o.t)


def classify_relevance(trial: Trial, *, context: str) -> bool:
    """Whether adaptive placement had the right intermediary available.

    Dynamic contexts always do (hosts carry their own category).  Static
    mobile has it only when the user is near the matching poster.  Static
    stationary only for the sports poster the user faces throughout.
    """
    if context in ("dynamic_mobile", "dynamic_stationary"):
        return True
    if context == "static_mobile":
        if trial.near is None:
            raise ValueError("static mobile trial without a near flag")
        return trial.near
    if context == "static_stationary":
        return trial.category == "sports"
    raise ValueError(f"unknown context: {context!r}")


@dataclass(frozen=True)
class TrialMetrics:
    context: str
    strategy: str
    trial_index: int
    category: str
    country: str
    navigation_time_s: float
    gaze_switches: int
    errors: int
    relevant: bool
    near: bool | None


@dataclass(frozen=True)
class SessionSummary:
    context: str
    strategy: str
    seed: int
    trials: int
    nav_time_mean_s: float
    nav_time_median_s: float
    nav_time_sd_s: float
    switches_mean: float
    switches_median: float
    switches_sd: float
    errors_total: int
    relevant_fraction: float


def trial_metrics(
    trace: TrialTrace,
    *,
    context: str,
    strategy: str,
    min_fixation: float = DEFAULT_MIN_FIXATION_S,
) -> TrialMetrics:
    samples = trace.boundary_samples()
    end = trace.segments[-1].t1 if trace.segments else trace.t_complete
    nav = navigation_time(samples, trace.trial, end_time=end, min_fixation=min_fixation)
    t0 = trace.trial.question_start
    switches = gaze_switches(samples, window=(t0, end))
    errs = len(error_events(trace.opens))
    return TrialMetrics(
        context=context,
        strategy=strategy,
        trial_index=trace.trial.index,
        category=trace.trial.category,
        country=trace.trial.country,
        navigation_time_s=nav,
        gaze_switches=switches,
        errors=errs,
        relevant=classify_relevance(trace.trial, context=context),
        near=trace.trial.near,
    )


def session_metrics(
    trace: SessionTrace,
    *,
    min_fixation: float = DEFAULT_MIN_FIXATION_S,
) -> list[TrialMetrics]:
    return [
        trial_metrics(
            t,
            context=trace.context,
            strategy=trace.strategy.value,
            min_fixation=min_fixation,
        )
        for t in trace.trials
    ]


def aggregate(rows: Sequence[TrialMetrics], *, seed: int) -> SessionSummary:
    """Mean/median/sd summary over one session's trials."""
    if not rows:
        raise EmptyTrialSet("cannot aggregate zero trials")
    contexts = {r.context for r in rows}
    strategies = {r.strategy for r in rows}
    if len(contexts) != 1 or len(strategies) != 1:
        raise ValueError("aggregate expects rows from a single session")
    navs = [r.navigation_time_s for r in rows]
    sws = [float(r.gaze_switches) for r in rows]

    def sd(xs):
        return statistics.stdev(xs) if len(xs) > 1 else 0.0

    return SessionSummary(
        context=rows[0].context,
        strategy=rows[0].strategy,
        seed=seed,
        trials=len(rows),
        nav_time_mean_s=statistics.fmean(navs),
        nav_time_median_s=statistics.median(navs),
        nav_time_sd_s=sd(navs),
        switches_mean=statistics.fmean(sws),
        switches_median=statistics.median(sws),
        switches_sd=sd(sws),
        errors_total=sum(r.errors for r in rows),
        relevant_fraction=sum(1 for r in rows if r.relevant) / len(rows),
    )


# -- export -----------------------------------------------------------------
#
# Floats are written with repr so CSV -> read -> CSV is byte-stable and
# values round-trip exactly.

TRIAL_FIELDS = (
    "context",
    "strategy",
    "trial_index",
    "category",
    "country",
    "navigation_time_s",
    "gaze_switches",
    "errors",
    "relevant",
    "near",
)

SUMMARY_FIELDS = (
    "context",
    "strategy",
    "seed",
    "trials",
    "nav_time_mean_s",
    "nav_time_median_s",
    "nav_time_sd_s",
    "switches_mean",
    "switches_median",
    "switches_sd",
    "errors_total",
    "relevant_fraction",
)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def trials_to_csv(rows: Sequence[TrialMetrics]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRIAL_FIELDS)
    for r in rows:
        w.writerow([_cell(getattr(r, f)) for f in TRIAL_FIELDS])
    return buf.getvalue()


def summaries_to_csv(rows: Sequence[SessionSummary]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_FIELDS)
    for r in rows:
        w.writerow([_cell(getattr(r, f)) for f in SUMMARY_FIELDS])
    return buf.getvalue()


def _parse_cell(field: str, text: str):
    if field in ("trial_index", "gaze_switches", "errors", "errors_total", "seed", "trials"):
        return int(text)
    if field.endswith("_s") or field in (
        "switches_mean",
        "switches_median",
        "switches_sd",
        "relevant_fraction",
    ):
        return float(text)
    if field in ("relevant", "near"):
        if text == "":
            return None
        return text == "true"
    return text


def trials_from_csv(text: str) -> list[TrialMetrics]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != TRIAL_FIELDS:
        raise ValueError(f"unexpected trial csv header: {header}")
    out = []
    for row in reader:
        kwargs = {f: _parse_cell(f, v) for f, v in zip(TRIAL_FIELDS, row)}
        out.append(TrialMetrics(**kwargs))
    return out


def summaries_from_csv(text: str) -> list[SessionSummary]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != SUMMARY_FIELDS:
        raise ValueError(f"unexpected summary csv header: {header}")
    out = []
    for row in reader:
        kwargs = {f: _parse_cell(f, v) for f, v in zip(SUMMARY_FIELDS, row)}
        out.append(SessionSummary(**kwargs))
    return out


def _jsonable(value):
    if isinstance(value, float):
        if math.isnan(value) or math.isinf(value):
            raise ValueError("non-finite metric value in export")
        return value
    return value


def results_to_json(
    summaries: Sequence[SessionSummary],
    trials: Sequence[TrialMetrics],
    *,
    meta: dict | None = None,
) -> str:
    doc = {
        "meta": dict(meta or {}),
        "summaries": [
            {f: _jsonable(getattr(r, f)) for f in SUMMARY_FIELDS} for r in summaries
        ],
        "trials": [
            {f: _jsonable(getattr(r, f)) for f in TRIAL_FIELDS} for r in trials
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def results_from_json(text: str) -> tuple[list[SessionSummary], list[TrialMetrics], dict]:
    doc = json.loads(text)
    summaries = [SessionSummary(**{f: r[f] for f in SUMMARY_FIELDS}) for r in doc["summaries"]]
    trials = [TrialMetrics(**{f: r[f] for f in TRIAL_FIELDS}) for r in doc["trials"]]
    return summaries, trials, doc.get("meta", {})

"""Event-driven simulator of the dynamic guard-channel scheme.

Calls of each class arrive as Poisson streams whose rates follow a
piecewise-constant schedule; admitted calls hold a channel for an
exponential time. Under the dynamic scheme every arrival first updates the
rate estimator, re-classifies the load, and rebuilds the availability
limits before its own admission is decided, so the simulator exercises the
live adaptation that the frozen-threshold chain cannot. Fixed-guard and
shared-pool baselines run on the same event loop for comparison.

A run is deterministic for a given scenario and seed: each class draws its
inter-arrival times from its own seeded stream and holding times come from
one more, so changing one class's traffic never perturbs the others.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from heapq import heappop, heappush

import numpy as np

from .traffic import (
    RateEstimator,
    RateVector,
    SystemParams,
    ThresholdVector,
    _threshold_limits,
    as_rate_vector,
)

# Event kinds; departures sort ahead of arrivals at equal timestamps so a
# freed channel is visible to a simultaneous arrival.
_DEPARTURE = 0
_ARRIVAL = 1


class Scheme(Enum):
    """Admission policy variants."""

    DYNAMIC = "dynamic"
    FIXED_GUARD = "fixed"
    NON_PRIORITY = "nonpriority"


@dataclass(frozen=True)
class Scenario:
    """Complete description of one simulation run.

    schedule: piecewise-constant per-class rates as (start time, rates)
        segments; the first must start at 0 and starts must increase. Each
        segment lasts until the next one (the last until the horizon).
    warmup: leading time span excluded from statistics; defaults to 10% of
        the horizon.
    fixed_thresholds: availability limits for the FIXED_GUARD scheme.
    smoothing: optional exponential smoothing factor for the rate estimator.
    record_trace: when set, the report carries every arrival as
        (time, class, admitted) for exact run-to-run comparisons.
    """

    params: SystemParams
    schedule: tuple[tuple[float, RateVector], ...]
    horizon: float
    seed: int
    scheme: Scheme = Scheme.DYNAMIC
    warmup: float | None = None
    fixed_thresholds: ThresholdVector | None = None
    smoothing: float | None = None
    record_trace: bool = False

    def __post_init__(self) -> None:
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise ValueError(f"horizon must be positive and finite, got {self.horizon!r}")
        if not self.schedule:
            raise ValueError("schedule must have at least one segment")
        normalized = []
        prev_start = None
        for start, rates in self.schedule:
            start = float(start)
            if prev_start is None:
                if start != 0.0:
                    raise ValueError(f"first schedule segment must start at 0, got {start}")
            elif start <= prev_start:
                raise ValueError("schedule segment starts must be strictly increasing")
            if start >= self.horizon:
                raise ValueError(f"segment start {start} is not inside [0, horizon)")
            normalized.append((start, as_rate_vector(rates, self.params.class_count)))
            prev_start = start
        object.__setattr__(self, "schedule", tuple(normalized))
        if self.warmup is None:
            object.__setattr__(self, "warmup", 0.1 * self.horizon)
        if not 0.0 <= self.warmup < self.horizon:
            raise ValueError(f"warmup must lie in [0, horizon), got {self.warmup!r}")
        if self.scheme is Scheme.FIXED_GUARD:
            if self.fixed_thresholds is None:
                raise ValueError("FIXED_GUARD needs explicit fixed_thresholds")
            if self.fixed_thresholds.capacity != self.params.capacity:
                raise ValueError("fixed_thresholds capacity must match params.capacity")
            if self.fixed_thresholds.class_count != self.params.class_count:
                raise ValueError("fixed_thresholds must cover every traffic class")
        elif self.fixed_thresholds is not None:
            raise ValueError("fixed_thresholds only applies to the FIXED_GUARD scheme")
        if self.smoothing is not None and not 0 < self.smoothing <= 1:
            raise ValueError(f"smoothing must be in (0, 1], got {self.smoothing!r}")


@dataclass
class SimState:
    """Mutable admission-relevant state threaded through the event loop.

    ``thresholds`` is None while the shared pool is in effect (light load,
    bootstrap, or the non-priority scheme) and holds the current per-class
    limits otherwise.
    """

    occupied: int = 0
    thresholds: tuple[int, ...] | None = None
    estimator: RateEstimator | None = None
    clock: float = 0.0


def admit_call(state: SimState, cls: int, params: SystemParams) -> bool:
    """Admission decision for a class-``cls`` arrival; True means admit.

    With no thresholds in effect any class may take any free channel; with
    thresholds, class ``cls`` is admitted only below its limit. Ongoing
    calls are never preempted.
    """
    if state.thresholds is None:
        return state.occupied < params.capacity
    return state.occupied < state.thresholds[cls - 1]


def blocking_stderr(blocked: int, offered: int) -> float | None:
    """Binomial standard error of a blocking estimate; None when nothing was offered."""
    if offered < 0 or blocked < 0:
        raise ValueError("counts must be non-negative")
    if blocked > offered:
        raise ValueError(f"blocked count {blocked} exceeds offered count {offered}")
    if offered == 0:
        return None
    p = blocked / offered
    return math.sqrt(p * (1.0 - p) / offered)


@dataclass(frozen=True)
class SegmentStats:
    """Post-warmup statistics restricted to one schedule segment."""

    start: float
    end: float
    offered: tuple[int, ...]
    blocked: tuple[int, ...]
    utilization: float
    measured_time: float

    def blocking(self, cls: int) -> float | None:
        if self.offered[cls - 1] == 0:
            return None
        return self.blocked[cls - 1] / self.offered[cls - 1]

    def blocking_stderr(self, cls: int) -> float | None:
        return blocking_stderr(self.blocked[cls - 1], self.offered[cls - 1])


@dataclass(frozen=True)
class SimReport:
    """Aggregate statistics of one run (post-warmup unless noted).

    ``blocking`` entries are None for classes that saw no offered calls.
    ``light_time_fraction`` / ``high_time_fraction`` split the measured time
    by which admission regime was in effect. ``event_count`` covers every
    processed event including warmup. ``trace`` is present only when the
    scenario asked for it and lists all arrivals, warmup included.
    """

    offered: tuple[int, ...]
    blocked: tuple[int, ...]
    blocking: tuple[float | None, ...]
    blocking_stderr: tuple[float | None, ...]
    utilization: float
    light_time_fraction: float
    high_time_fraction: float
    event_count: int
    segments: tuple[SegmentStats, ...]
    trace: tuple[tuple[float, int, bool], ...] | None = None


def run_simulation(scenario: Scenario) -> SimReport:
    """Run one scenario to its horizon and report blocking and utilization."""
    params = scenario.params
    m_count = params.class_count
    capacity = params.capacity
    mu = params.service_rate
    pool = params.reservable_pool
    high_rate = params.high_load_rate
    horizon = scenario.horizon
    warmup = scenario.warmup
    scheme = scenario.scheme

    # Segment table: (start, end, rates).
    starts = [s for s, _ in scenario.schedule]
    segments = [
        (start, starts[k + 1] if k + 1 < len(starts) else horizon, rates)
        for k, (start, rates) in enumerate(scenario.schedule)
    ]

    seed_seq = np.random.SeedSequence(scenario.seed)
    child_seqs = seed_seq.spawn(m_count + 1)
    arrival_rngs = [np.random.default_rng(s) for s in child_seqs[:m_count]]
    holding_rng = np.random.default_rng(child_seqs[m_count])

    seg_ptrs = [0] * m_count

    def next_arrival(idx: int, t: float) -> tuple[float, int] | None:
        # Walk segments from t; redrawing at each boundary is exact for
        # piecewise-constant Poisson input (memorylessness).
        k = seg_ptrs[idx]
        while True:
            _, end, rates = segments[k]
            rate = rates[idx]
            if rate > 0.0:
                candidate = t + arrival_rngs[idx].exponential(1.0 / rate)
                if candidate < end:
                    seg_ptrs[idx] = k
                    return candidate, k
            if k + 1 >= len(segments):
                seg_ptrs[idx] = k
                return None
            t = end
            k += 1

    # Event heap entries: (time, kind, insertion seq, class index, segment).
    heap: list[tuple[float, int, int, int, int]] = []
    seq = 0
    for idx in range(m_count):
        nxt = next_arrival(idx, 0.0)
        if nxt is not None:
            heappush(heap, (nxt[0], _ARRIVAL, seq, idx, nxt[1]))
            seq += 1

    state = SimState()
    mode_high = False
    if scheme is Scheme.FIXED_GUARD:
        state.thresholds = scenario.fixed_thresholds.limits
        mode_high = True
    elif scheme is Scheme.DYNAMIC:
        state.estimator = RateEstimator(
            priors=segments[0][2], smoothing=scenario.smoothing
        )

    offered = [0] * m_count
    blocked = [0] * m_count
    seg_offered = [[0] * m_count for _ in segments]
    seg_blocked = [[0] * m_count for _ in segments]
    seg_busy = [0.0] * len(segments)
    busy_time = 0.0
    light_time = 0.0
    high_time = 0.0
    admitted_total = 0
    departed_total = 0
    event_count = 0
    trace: list[tuple[float, int, bool]] | None = [] if scenario.record_trace else None

    prev_t = 0.0
    busy_seg_ptr = 0

    def advance(to_t: float) -> None:
        # Accumulate occupancy-time over (prev_t, to_t] clipped to the
        # measurement window, split across schedule segments.
        nonlocal prev_t, busy_time, light_time, high_time, busy_seg_ptr
        lo = prev_t if prev_t > warmup else warmup
        hi = to_t if to_t < horizon else horizon
        if hi > lo:
            busy_time += state.occupied * (hi - lo)
            if mode_high:
                high_time += hi - lo
            else:
                light_time += hi - lo
            x = lo
            k = busy_seg_ptr
            while x < hi:
                while segments[k][1] <= x:
                    k += 1
                upto = hi if hi < segments[k][1] else segments[k][1]
                seg_busy[k] += state.occupied * (upto - x)
                x = upto
            busy_seg_ptr = k
        prev_t = to_t

    while heap:
        t, kind, _, idx, seg_k = heappop(heap)
        if t > horizon:
            break
        advance(t)
        state.clock = t
        event_count += 1

        if kind == _DEPARTURE:
            state.occupied -= 1
            departed_total += 1
            assert state.occupied >= 0
            continue

        # Arrival of class idx+1 inside segment seg_k.
        if scheme is Scheme.DYNAMIC:
            est = state.estimator.observe(idx + 1, t)
            state.estimator = est
            if est.ready:
                rates_hat = est.rates()
                if math.fsum(rates_hat) >= high_rate:
                    mode_high = True
                    state.thresholds = _threshold_limits(rates_hat, capacity, pool)
                else:
                    mode_high = False
                    state.thresholds = None
            # Until every class has two arrivals the gap estimates are
            # undefined; the scheme stays on the shared pool.

        admitted = admit_call(state, idx + 1, params)
        measured = t >= warmup
        if measured:
            offered[idx] += 1
            seg_offered[seg_k][idx] += 1
        if admitted:
            state.occupied += 1
            admitted_total += 1
            assert state.occupied <= capacity
            departure = t + holding_rng.exponential(1.0 / mu)
            heappush(heap, (departure, _DEPARTURE, seq, -1, -1))
            seq += 1
        elif measured:
            blocked[idx] += 1
            seg_blocked[seg_k][idx] += 1
        if trace is not None:
            trace.append((t, idx + 1, admitted))

        nxt = next_arrival(idx, t)
        if nxt is not None:
            heappush(heap, (nxt[0], _ARRIVAL, seq, idx, nxt[1]))
            seq += 1

    advance(horizon)
    assert admitted_total - departed_total == state.occupied

    measured_time = horizon - warmup
    seg_stats = []
    for k, (start, end, _) in enumerate(segments):
        win_lo = max(start, warmup)
        win_hi = min(end, horizon)
        win = max(0.0, win_hi - win_lo)
        seg_stats.append(
            SegmentStats(
                start=start,
                end=end,
                offered=tuple(seg_offered[k]),
                blocked=tuple(seg_blocked[k]),
                utilization=seg_busy[k] / (capacity * win) if win > 0 else 0.0,
                measured_time=win,
            )
        )

    return SimReport(
        offered=tuple(offered),
        blocked=tuple(blocked),
        blocking=tuple(
            b / o if o > 0 else None for b, o in zip(blocked, offered)
        ),
        blocking_stderr=tuple(
            blocking_stderr(b, o) for b, o in zip(blocked, offered)
        ),
        utilization=busy_time / (capacity * measured_time),
        light_time_fraction=light_time / measured_time,
        high_time_fraction=high_time / measured_time,
        event_count=event_count,
        segments=tuple(seg_stats),
        trace=tuple(trace) if trace is not None else None,
    )

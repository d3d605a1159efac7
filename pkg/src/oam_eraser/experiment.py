"""Experiment assembly: source + per-arm elements + analyzers.

The canonical arrangement couples a down-conversion source into a
spin-orbit converter (q-plate), a single-mode fiber post-selection and a
quarter-wave plate on arm A, producing a polarization(A)-OAM(B) entangled
pair.  Arm A is analyzed with a rotatable polarizer, arm B with a rotated
azimuthal hologram; the conditional coincidence probability follows

    P(alpha, theta) = (1 + sin(2*alpha) * cos(2*theta + pi/2)) / 2

exactly for the ideal configuration, which the test suite pins on a grid.

Counted data is simulated with counter-based RNG streams keyed by
``(seed, repetition, point index)``, so results do not depend on the
order in which scan points are evaluated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from . import elements as el
from .hilbert import (
    L_CAP,
    POL_H,
    POL_V,
    JointKet,
    apply_local,
    joint_ket,
    postselect_local,
)

TWO_PI = 2.0 * math.pi


class NullOutcomeError(RuntimeError):
    """The pipeline state was fully extinguished by a post-selection."""

    def __init__(self, element: str, message: str | None = None):
        self.element = element
        super().__init__(message or f"state extinguished by element '{element}'")


# ---------------------------------------------------------------------------
# configuration types


@dataclass(frozen=True)
class SourceSpec:
    """Photon-pair source.

    ``spdc`` produces the OAM-anticorrelated pair
    ``sum_l c_|l| |l>_A |-l>_B |H>_A |H>_B`` with a flat or Gaussian
    ``c_|l| ~ exp(-l^2 / (2 sigma_ell^2))`` spectrum over ``|l| <= l_max``.
    ``generic_two_path`` produces the fully marked two-path state
    ``(|H>_A|+1>_B + |V>_A|-1>_B)/sqrt(2)`` used by the pattern analytics.
    """

    kind: str = "spdc"
    l_max: int = 1
    spectrum: str = "flat"
    sigma_ell: float | None = None

    def __post_init__(self):
        if self.kind not in ("spdc", "generic_two_path"):
            raise ValueError(f"unknown source kind {self.kind!r}")
        if self.l_max < 0 or self.l_max > L_CAP:
            raise ValueError("l_max outside [0, OAM cap]")
        if self.spectrum not in ("flat", "gaussian"):
            raise ValueError(f"unknown spectrum {self.spectrum!r}")
        if self.spectrum == "gaussian" and not (self.sigma_ell and self.sigma_ell > 0):
            raise ValueError("gaussian spectrum needs sigma_ell > 0")

    def spectrum_amplitudes(self) -> dict:
        ells = range(-self.l_max, self.l_max + 1)
        if self.spectrum == "flat":
            raw = {ell: 1.0 for ell in ells}
        else:
            s2 = 2.0 * self.sigma_ell ** 2
            raw = {ell: math.exp(-ell * ell / s2) for ell in ells}
        norm = math.sqrt(sum(v * v for v in raw.values()))
        return {ell: v / norm for ell, v in raw.items()}


@dataclass(frozen=True)
class CountingModel:
    """Coincidence counting parameters; all rates in events per second."""

    pair_rate: float = 1000.0
    integration_time: float = 5.0
    gate: float = 25e-9
    singles_a: float = 0.0
    singles_b: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if min(self.pair_rate, self.singles_a, self.singles_b) < 0:
            raise ValueError("rates must be non-negative")
        if self.integration_time < 0:
            raise ValueError("integration time must be non-negative")
        if self.gate <= 0:
            raise ValueError("gate must be positive")

    def accidentals(self) -> float:
        """Expected accidental coincidences per integration window."""
        return self.singles_a * self.singles_b * self.gate * self.integration_time


@dataclass(frozen=True)
class ExperimentConfig:
    source: SourceSpec
    elements_a: tuple = ()
    elements_b: tuple = ()
    analyzer_a: el.PolarizerSpec = el.PolarizerSpec(alpha=0.0, arm="A")
    analyzer_b: el.HologramSpec = el.HologramSpec(ell=1, arm="B")
    counting: CountingModel = CountingModel()

    def __post_init__(self):
        for arm, elems in (("A", self.elements_a), ("B", self.elements_b)):
            delays = 0
            for spec in elems:
                if not isinstance(spec, el.ElementSpec):
                    raise TypeError(f"not an element spec: {spec!r}")
                if spec.arm != arm:
                    raise ValueError(f"element {spec!r} listed on arm {arm}")
                delays += isinstance(spec, el.DelaySpec)
            if delays > 1:
                raise ValueError(f"arm {arm} has more than one delay element")
        if self.analyzer_a.arm != "A" or self.analyzer_b.arm != "B":
            raise ValueError("analyzers must sit on arms A (polarizer) and B (hologram)")

    def arm_delay(self, arm: str) -> float:
        elems = self.elements_a if arm == "A" else self.elements_b
        for spec in elems:
            if isinstance(spec, el.DelaySpec):
                return spec.delay_seconds
        return 0.0


@dataclass(frozen=True)
class EventRecord:
    arm: str
    timestamp: float
    tag: str  # "true_pair" or "accidental"


@dataclass(frozen=True)
class ScanSeries:
    """One parameter scan: settings, probabilities and (optional) counts."""

    scan_variable: str  # "theta" or "alpha"
    settings: tuple
    probabilities: tuple  # conditional detection probabilities
    joint_probabilities: tuple | None = None
    counts: tuple | None = None
    fit: object | None = None

    def __post_init__(self):
        n = len(self.settings)
        for name in ("probabilities", "joint_probabilities", "counts"):
            seq = getattr(self, name)
            if seq is not None and len(seq) != n:
                raise ValueError(f"{name} length does not match settings")
        for p in self.probabilities:
            if not -1e-9 <= p <= 1.0 + 1e-9:
                raise ValueError("probabilities must lie in [0, 1]")


def hybrid_eraser_config(alpha: float = 0.0,
                         extinction: float = 0.0,
                         hologram_mode: str = "ideal",
                         l_max: int = 1,
                         spectrum: str = "flat",
                         sigma_ell: float | None = None,
                         counting: CountingModel | None = None,
                         delay_m: float = 0.0) -> ExperimentConfig:
    """The canonical hybrid-entanglement eraser: q=0.5 plate, fiber and
    quarter-wave plate at pi/4 on arm A; polarizer/hologram analyzers."""
    elements_a = [
        el.QPlateSpec(q=0.5, arm="A"),
        el.FiberSpec(arm="A", accepted_ell=0),
        el.WavePlateSpec(kind="quarter", fast_axis=math.pi / 4, arm="A"),
    ]
    if delay_m > 0.0:
        elements_a.append(el.DelaySpec(extra_path=delay_m, arm="A"))
    return ExperimentConfig(
        source=SourceSpec(kind="spdc", l_max=l_max, spectrum=spectrum,
                          sigma_ell=sigma_ell),
        elements_a=tuple(elements_a),
        elements_b=(),
        analyzer_a=el.PolarizerSpec(alpha=alpha, extinction=extinction, arm="A"),
        analyzer_b=el.HologramSpec(ell=1, mode=hologram_mode, arm="B"),
        counting=counting or CountingModel(),
    )


# ---------------------------------------------------------------------------
# state preparation and pipeline


def build_source_state(source: SourceSpec) -> JointKet:
    if source.kind == "generic_two_path":
        r = 1.0 / math.sqrt(2.0)
        return joint_ket({
            (POL_H, 0, POL_H, 1): r,
            (POL_V, 0, POL_H, -1): r,
        })
    amps = {}
    for ell, c in source.spectrum_amplitudes().items():
        amps[(POL_H, ell, POL_H, -ell)] = c
    return joint_ket(amps)


def build_spdc_state(source: SourceSpec) -> JointKet:
    """OAM-anticorrelated pair state from the down-conversion source."""
    if source.kind != "spdc":
        raise ValueError("not a down-conversion source")
    return build_source_state(source)


@lru_cache(maxsize=128)
def _pipeline(config: ExperimentConfig):
    state = build_source_state(config.source)
    cumulative = 1.0
    for arm, elems in (("A", config.elements_a), ("B", config.elements_b)):
        for i, spec in enumerate(elems):
            state, prob = el.apply_element(spec, state)
            if state is None:
                raise NullOutcomeError(
                    f"{el.element_name(spec)}[{arm}:{i}]")
            cumulative *= prob
    return state, cumulative


def run_pipeline(config: ExperimentConfig):
    """Apply all configured elements (not the analyzers) in order.

    Returns ``(state, cumulative_probability)`` where the cumulative
    probability is the product of every post-selection success along the
    way (also tracked on ``state.norm_tracked``).
    """
    return _pipeline(config)


def _projection_probability(op, arm: str, state: JointKet) -> float:
    after = apply_local(op, arm, state)
    return sum(abs(a) ** 2 for a in after.amplitudes.values())


def coincidence_probability(config: ExperimentConfig,
                            alpha: float, theta: float):
    """Joint and conditional detection probability at analyzer settings.

    ``joint`` is the probability that both analyzers pass (normalized to
    the post-selected pipeline state); ``conditional`` divides out the
    arm-A polarizer probability alone.
    """
    state, _ = run_pipeline(config)
    pol = replace(config.analyzer_a, alpha=alpha)
    state_a, p_a = el.polarizer_apply(pol, state)
    if state_a is None:
        raise NullOutcomeError("polarizer[analyzer_a]")
    op_b = el.sector_projector(config.analyzer_b, theta)
    p_b_given_a = _projection_probability(op_b, config.analyzer_b.arm, state_a)
    joint = p_a * p_b_given_a
    return joint, min(p_b_given_a, 1.0)


def conditional_grid(config: ExperimentConfig, alphas, thetas):
    """Joint/conditional probabilities over an (alpha, theta) grid."""
    state, _ = run_pipeline(config)
    arm_b = config.analyzer_b.arm
    ops_b = [el.sector_projector(config.analyzer_b, th) for th in thetas]
    joint = np.empty((len(alphas), len(thetas)))
    cond = np.empty_like(joint)
    for i, alpha in enumerate(alphas):
        pol = replace(config.analyzer_a, alpha=alpha)
        state_a, p_a = el.polarizer_apply(pol, state)
        if state_a is None:
            raise NullOutcomeError("polarizer[analyzer_a]")
        for j, op_b in enumerate(ops_b):
            p_bga = _projection_probability(op_b, arm_b, state_a)
            joint[i, j] = p_a * p_bga
            cond[i, j] = min(p_bga, 1.0)
    return joint, cond


def theta_scan(config: ExperimentConfig, thetas=None,
               points: int = 72) -> ScanSeries:
    """Exact hologram-rotation scan at the configured polarizer angle."""
    if thetas is None:
        thetas = np.linspace(0.0, TWO_PI, points, endpoint=False)
    thetas = np.asarray(thetas, dtype=float)
    joint, cond = conditional_grid(config, [config.analyzer_a.alpha], thetas)
    return ScanSeries(
        scan_variable="theta",
        settings=tuple(float(t) for t in thetas),
        probabilities=tuple(float(p) for p in cond[0]),
        joint_probabilities=tuple(float(p) for p in joint[0]),
    )


def causal_order_probability(config: ExperimentConfig, alpha: float,
                             theta: float, order: str = "A_first") -> float:
    """Conditional coincidence probability with projections in a fixed order.

    Both orders agree (the projectors act on different arms); the delayed
    variant of the experiment only reorders detection times, so this
    function is what makes that causal independence testable.
    """
    if order not in ("A_first", "B_first"):
        raise ValueError(f"unknown projection order {order!r}")
    state, _ = run_pipeline(config)
    pol_op = el.polarizer_operator(replace(config.analyzer_a, alpha=alpha))
    holo_op = el.sector_projector(config.analyzer_b, theta)
    arm_a, arm_b = config.analyzer_a.arm, config.analyzer_b.arm
    p_a = _projection_probability(pol_op, arm_a, state)
    if p_a < 1e-14:
        raise NullOutcomeError("polarizer[analyzer_a]")
    if order == "A_first":
        state_a, _ = postselect_local(pol_op, arm_a, state)
        return min(_projection_probability(holo_op, arm_b, state_a), 1.0)
    state_b, p_b = postselect_local(holo_op, arm_b, state)
    if state_b is None:
        return 0.0
    p_a_given_b = _projection_probability(pol_op, arm_a, state_b)
    return min(p_b * p_a_given_b / p_a, 1.0)


# ---------------------------------------------------------------------------
# counted data


def point_stream(seed: int, repetition: int, index: int) -> np.random.Generator:
    """Counter-based RNG stream for one scan point.

    Keyed by ``(seed, repetition, index)`` only, so a point's draws do not
    depend on the order (or parallel schedule) in which points are
    evaluated.
    """
    return np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=(repetition, index)))


def simulate_counts(config: ExperimentConfig, series: ScanSeries,
                    repetition: int = 0) -> ScanSeries:
    """Draw Poisson counts for each scan point.

    ``counts[i] ~ Poisson(pair_rate * T * joint[i] + accidentals)`` with
    the accidental term ``singles_a * singles_b * gate * T``.  Identical
    seeds give identical counts regardless of evaluation order.
    """
    if series.joint_probabilities is None:
        raise ValueError("series carries no joint probabilities")
    cm = config.counting
    acc = cm.accidentals()
    counts = []
    for i, p in enumerate(series.joint_probabilities):
        mean = cm.pair_rate * cm.integration_time * p + acc
        counts.append(int(point_stream(cm.seed, repetition, i).poisson(mean)))
    return replace(series, counts=tuple(counts))


def simulate_timeline(config: ExperimentConfig, alpha: float, theta: float,
                      duration: float):
    """Event-by-event Monte Carlo of the gated coincidence counter.

    Pair emissions form a Poisson process at ``pair_rate``; each pair
    yields a detector click on both arms with probability equal to the
    joint detection probability, time-shifted by any per-arm delay
    element.  Uncorrelated accidental singles are injected at the
    configured rates.  Two clicks coincide when ``|t_A - t_B| <= gate``.

    Returns ``(events, coincidences)`` with per-arm time-ordered events.
    """
    if duration <= 0:
        raise ValueError("duration must be positive")
    cm = config.counting
    joint, _ = coincidence_probability(config, alpha, theta)
    delay_a = config.arm_delay("A")
    delay_b = config.arm_delay("B")

    def rng(stream: int) -> np.random.Generator:
        return np.random.default_rng(
            np.random.SeedSequence(cm.seed, spawn_key=(stream,)))

    emit = rng(1)
    n_pairs = emit.poisson(cm.pair_rate * duration)
    pair_times = np.sort(emit.uniform(0.0, duration, n_pairs))
    detected = rng(2).random(n_pairs) < joint

    def accidental_times(stream: int, rate: float) -> np.ndarray:
        if rate <= 0.0:
            return np.empty(0)
        r = rng(stream)
        return np.sort(r.uniform(0.0, duration, r.poisson(rate * duration)))

    acc_a = accidental_times(3, cm.singles_a)
    acc_b = accidental_times(4, cm.singles_b)

    times_a = np.concatenate([pair_times[detected] + delay_a, acc_a])
    tags_a = ["true_pair"] * int(detected.sum()) + ["accidental"] * len(acc_a)
    times_b = np.concatenate([pair_times[detected] + delay_b, acc_b])
    tags_b = ["true_pair"] * int(detected.sum()) + ["accidental"] * len(acc_b)

    order_a = np.argsort(times_a, kind="stable")
    order_b = np.argsort(times_b, kind="stable")
    events = [EventRecord("A", float(times_a[i]), tags_a[i]) for i in order_a]
    events += [EventRecord("B", float(times_b[i]), tags_b[i]) for i in order_b]

    coincidences = _count_coincidences(times_a[order_a], times_b[order_b], cm.gate)
    return events, coincidences


def _count_coincidences(times_a: np.ndarray, times_b: np.ndarray,
                        gate: float) -> int:
    """Greedy gate matching over two sorted click streams."""
    i = j = matched = 0
    while i < len(times_a) and j < len(times_b):
        dt = times_a[i] - times_b[j]
        if abs(dt) <= gate:
            matched += 1
            i += 1
            j += 1
        elif dt < 0:
            i += 1
        else:
            j += 1
    return matched

"""Fringe analytics: visibility, which-path knowledge, pattern rendering.

Visibility is the Michelson contrast ``(P_max - P_min)/(P_max + P_min)``,
taken from a fitted sinusoid when a fit is attached to the series and from
raw extrema otherwise.  Which-path knowledge is quantified as the trace
norm of the weighted difference between the marker states conditioned on
each path; for pure joint states the two satisfy ``V**2 + D**2 = 1``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from . import elements as el
from .hilbert import JointKet, apply_local, reduced_density
from .experiment import ExperimentConfig, ScanSeries, theta_scan

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class FringeFit:
    """Least-squares parameters of ``offset + amplitude*cos(2x + phase)``.

    For probability data the amplitude never exceeds the offset (the curve
    stays non-negative); ``residual_rms`` is the root-mean-square misfit.
    """

    offset: float
    amplitude: float
    phase: float
    residual_rms: float


@dataclass(frozen=True)
class ComplementarityRecord:
    visibility: float
    distinguishability: float
    sum_of_squares: float
    violated: bool


@dataclass(frozen=True, eq=False)
class TwoPathModel:
    """Generic two-path interference with a which-path marker.

    ``marker_overlap`` is the inner product of the two marker states
    (1: unmarked, 0: fully marked); ``u1``/``u2`` are the complex path
    envelopes sampled on a common grid.
    """

    marker_overlap: complex
    relative_phase: float
    u1: np.ndarray
    u2: np.ndarray

    def __post_init__(self):
        if abs(self.marker_overlap) > 1.0 + 1e-12:
            raise ValueError("marker overlap magnitude exceeds 1")


# ---------------------------------------------------------------------------
# sinusoid fitting and visibility


def fit_sinusoid(series: ScanSeries, on: str = "auto") -> FringeFit:
    """Closed-form least squares of ``offset + a*cos(2x + phase)``.

    The model is linear in ``(offset, a*cos(phase), -a*sin(phase))`` so the
    normal equations solve it exactly.  Fits the counts when present (and
    ``on="auto"``), otherwise the conditional probabilities.
    """
    settings = np.asarray(series.settings, dtype=float)
    if len(set(series.settings)) < 4:
        raise ValueError("need at least 4 distinct settings to fit")
    if on == "auto":
        on = "counts" if series.counts is not None else "probabilities"
    if on == "counts":
        if series.counts is None:
            raise ValueError("series carries no counts")
        values = np.asarray(series.counts, dtype=float)
    elif on == "probabilities":
        values = np.asarray(series.probabilities, dtype=float)
    else:
        raise ValueError(f"unknown fit target {on!r}")
    design = np.column_stack([
        np.ones_like(settings),
        np.cos(2.0 * settings),
        np.sin(2.0 * settings),
    ])
    coeffs, _, rank, _ = np.linalg.lstsq(design, values, rcond=None)
    if rank < 3:
        raise ValueError("degenerate design: settings do not resolve the fringe")
    c0, c1, c2 = (float(c) for c in coeffs)
    amplitude = math.hypot(c1, c2)
    phase = math.atan2(-c2, c1)
    resid = design @ coeffs - values
    return FringeFit(offset=c0, amplitude=amplitude, phase=phase,
                     residual_rms=float(np.sqrt(np.mean(resid ** 2))))


def with_fit(series: ScanSeries, on: str = "auto") -> ScanSeries:
    return replace(series, fit=fit_sinusoid(series, on))


def visibility(series: ScanSeries) -> float:
    """Fringe contrast of a scan, in [0, 1].

    Uses the fitted extrema (``amplitude/offset``) when the series carries
    a fit, raw min/max otherwise; raw mode requires the settings to span a
    full fringe period (pi for the frequency-2 fringes here).
    """
    if series.fit is not None:
        if series.fit.offset <= 0.0:
            raise ValueError("no signal")
        return min(max(series.fit.amplitude / series.fit.offset, 0.0), 1.0)
    values = np.asarray(series.probabilities, dtype=float)
    span = max(series.settings) - min(series.settings)
    if len(values) < 2 or span < math.pi * (1.0 - 1e-9):
        raise ValueError("scan must span at least one fringe period")
    p_max, p_min = float(values.max()), float(values.min())
    if p_max + p_min <= 0.0:
        raise ValueError("no signal")
    return min(max((p_max - p_min) / (p_max + p_min), 0.0), 1.0)


def theoretical_visibility(alpha: float) -> float:
    """Ideal fringe contrast versus polarizer angle: ``|sin(2*alpha)|``."""
    return abs(math.sin(2.0 * alpha))


@dataclass(frozen=True)
class VisibilityPoint:
    alpha: float
    visibility: float
    fit: FringeFit


def fitted_visibility(config: ExperimentConfig, theta_points: int = 72):
    """Visibility of the exact hologram scan, via the sinusoid fit."""
    series = with_fit(theta_scan(config, points=theta_points))
    return visibility(series), series.fit


def visibility_curve(config: ExperimentConfig, alphas,
                     theta_points: int = 72):
    """Fitted visibility of a hologram scan at each polarizer angle."""
    points = []
    for alpha in alphas:
        cfg = replace(config,
                      analyzer_a=replace(config.analyzer_a, alpha=float(alpha)))
        vis, fit = fitted_visibility(cfg, theta_points)
        points.append(VisibilityPoint(float(alpha), vis, fit))
    return points


def calibrate_extinction(config_builder, target_visibility: float,
                         bracket=(0.0, 0.8), tol: float = 1e-7,
                         theta_points: int = 72) -> float:
    """Bisect the polarizer leak until the fitted visibility hits a target.

    ``config_builder(extinction)`` must return the experiment to evaluate;
    the fitted visibility must be monotone in the leak across ``bracket``.
    """
    lo, hi = bracket

    def misfit(e: float) -> float:
        vis, _ = fitted_visibility(config_builder(e), theta_points)
        return vis - target_visibility

    f_lo, f_hi = misfit(lo), misfit(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if f_lo * f_hi > 0.0:
        raise ValueError("target visibility not bracketed by the leak range")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = misfit(mid)
        if f_mid == 0.0:
            return mid
        if f_lo * f_mid < 0.0:
            hi = mid
        else:
            lo, f_lo = mid, f_mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# which-path knowledge and complementarity


def oam_fringe_visibility(state: JointKet, ell: int, points: int = 72,
                          arm: str = "B") -> float:
    """Visibility of the arm-B sector scan of a raw state (no polarizer)."""
    spec = el.HologramSpec(ell=ell, arm=arm)
    thetas = np.linspace(0.0, TWO_PI, points, endpoint=False)
    probs = []
    for theta in thetas:
        op = el.sector_projector(spec, float(theta))
        after = apply_local(op, arm, state)
        probs.append(min(sum(abs(a) ** 2 for a in after.amplitudes.values()), 1.0))
    series = ScanSeries("theta", tuple(float(t) for t in thetas),
                        tuple(probs))
    return visibility(with_fit(series, on="probabilities"))


def distinguishability(state: JointKet, ell: int, path_arm: str = "B") -> float:
    """Which-path knowledge carried by the other arm about the OAM path.

    Computed as the trace norm of ``p+ rho+ - p- rho-`` where ``rho+-``
    are the full marker-arm states conditioned on the path being ``+ell``
    or ``-ell`` and ``p+-`` the path probabilities.  With equally likely
    paths this is exactly the trace distance between the two conditional
    marker states; a path of zero probability is fully distinguishable by
    absence (D = 1).
    """
    marker_arm = "A" if path_arm == "B" else "B"
    ell_index = 3 if path_arm == "B" else 1
    plus, minus = {}, {}
    for key, amp in state.amplitudes.items():
        if key[ell_index] == ell:
            plus[key] = amp
        elif key[ell_index] == -ell:
            minus[key] = amp
        else:
            raise ValueError(f"state leaves the +-{ell} path subspace")
    p_plus = sum(abs(a) ** 2 for a in plus.values())
    p_minus = sum(abs(a) ** 2 for a in minus.values())
    if p_plus < 1e-14 or p_minus < 1e-14:
        return 1.0
    basis = sorted({(k[0], k[1]) if marker_arm == "A" else (k[2], k[3])
                    for k in state.amplitudes})
    rho_plus = reduced_density(
        JointKet({k: a / math.sqrt(p_plus) for k, a in plus.items()}),
        marker_arm, "both", basis=basis)
    rho_minus = reduced_density(
        JointKet({k: a / math.sqrt(p_minus) for k, a in minus.items()}),
        marker_arm, "both", basis=basis)
    diff = p_plus * rho_plus.matrix - p_minus * rho_minus.matrix
    d = float(np.sum(np.abs(np.linalg.eigvalsh(diff))))
    return min(max(d, 0.0), 1.0)


def complementarity_check(vis: float, dist: float) -> ComplementarityRecord:
    """Record ``V**2 + D**2`` and flag anything beyond the unit bound."""
    for name, val in (("visibility", vis), ("distinguishability", dist)):
        if not -1e-12 <= val <= 1.0 + 1e-9:
            raise ValueError(f"{name} outside [0, 1]")
    total = vis * vis + dist * dist
    return ComplementarityRecord(
        visibility=vis,
        distinguishability=dist,
        sum_of_squares=total,
        violated=total > 1.0 + 1e-9,
    )


# ---------------------------------------------------------------------------
# spatial patterns


def azimuthal_grid(grid_n: int) -> np.ndarray:
    return TWO_PI * np.arange(grid_n) / grid_n


def render_azimuthal_pattern(ell: int, intermodal_phase: float, grid_n: int,
                             weights=(1.0, 1.0),
                             normalized: bool = False) -> np.ndarray:
    """Azimuthal intensity of ``w+ |ell> + w- e^{i phase} |-ell>``.

    For equal weights this is ``1 + cos(2*ell*phi - phase)`` with ``2|ell|``
    bright lobes around the circle; a single mode (one zero weight) gives a
    flat ring.  The grid must resolve the lobes: ``grid_n >= 4|ell| + 1``.
    """
    if grid_n < 4 * abs(ell) + 1:
        raise ValueError("undersampled azimuthal grid")
    phi = azimuthal_grid(grid_n)
    w_plus, w_minus = complex(weights[0]), complex(weights[1])
    total = abs(w_plus) ** 2 + abs(w_minus) ** 2
    if total <= 0.0:
        raise ValueError("all-zero mode weights")
    field = (w_plus * np.exp(1j * ell * phi)
             + w_minus * np.exp(1j * (-ell * phi + intermodal_phase)))
    intensity = np.abs(field) ** 2 / total
    if normalized:
        intensity = intensity / intensity.max()
    return intensity


def count_azimuthal_lobes(intensity: np.ndarray) -> int:
    """Cyclic count of strict local maxima (sign changes of the derivative)."""
    wrapped = np.append(intensity, intensity[0])
    signs = np.sign(np.diff(wrapped))
    signs = signs[signs != 0]
    if signs.size == 0:
        return 0
    nxt = np.roll(signs, -1)
    return int(np.sum((signs > 0) & (nxt < 0)))


def two_path_pattern(model: TwoPathModel, projection: str | None = None
                     ) -> np.ndarray:
    """Intensity of the two-path superposition, optionally marker-projected.

    Without projection the cross term is scaled by the marker overlap, so
    orthogonal markers (overlap 0) wash the fringes out entirely.
    Projecting the marker onto the diagonal (``"D"``) or anti-diagonal
    (``"A"``) basis revives complementary fringe patterns whose pointwise
    sum reproduces the fringe-free marked intensity.
    """
    u1 = np.asarray(model.u1, dtype=complex)
    u2 = np.asarray(model.u2, dtype=complex)
    phase = cmath.exp(1j * model.relative_phase)
    gamma = complex(model.marker_overlap)
    if projection is None:
        cross = 2.0 * np.real(gamma * np.conj(u1) * u2 * phase)
        return np.abs(u1) ** 2 + np.abs(u2) ** 2 + cross
    beta = math.sqrt(max(1.0 - abs(gamma) ** 2, 0.0))
    if projection == "D":
        marker2 = gamma + beta
    elif projection == "A":
        marker2 = gamma - beta
    else:
        raise ValueError(f"unknown marker projection {projection!r}")
    amp = (u1 + phase * marker2 * u2) / math.sqrt(2.0)
    return np.abs(amp) ** 2

import math

import numpy as np
import pytest

from oam_eraser.analysis import (
    ComplementarityRecord,
    FringeFit,
    TwoPathModel,
    calibrate_extinction,
    complementarity_check,
    count_azimuthal_lobes,
    distinguishability,
    fit_sinusoid,
    fitted_visibility,
    oam_fringe_visibility,
    render_azimuthal_pattern,
    theoretical_visibility,
    two_path_pattern,
    visibility,
    visibility_curve,
    with_fit,
)
from oam_eraser.experiment import ScanSeries, hybrid_eraser_config
from oam_eraser.hilbert import POL_H, POL_V, joint_ket

from conftest import marked_pair

ROOT2 = math.sqrt(2.0)


def series_of(settings, values):
    return ScanSeries("theta", tuple(float(s) for s in settings),
                      tuple(float(v) for v in values))


# ---------------------------------------------------------------------------
# visibility


def test_constant_series_has_zero_visibility():
    thetas = np.linspace(0, 2 * math.pi, 24, endpoint=False)
    assert visibility(series_of(thetas, np.full(24, 0.5))) == 0.0


def test_unit_contrast_sinusoid():
    thetas = np.linspace(0, 2 * math.pi, 100, endpoint=False)
    values = (1 + np.cos(2 * thetas)) / 2
    assert visibility(series_of(thetas, values)) == pytest.approx(1.0, abs=1e-9)


def test_all_zero_series_raises():
    thetas = np.linspace(0, 2 * math.pi, 12, endpoint=False)
    with pytest.raises(ValueError, match="no signal"):
        visibility(series_of(thetas, np.zeros(12)))


def test_visibility_requires_full_period():
    thetas = np.linspace(0, 1.0, 10)
    with pytest.raises(ValueError, match="period"):
        visibility(series_of(thetas, np.full(10, 0.5)))


def test_erased_setting_reaches_full_contrast():
    config = hybrid_eraser_config(alpha=-math.pi / 4)
    vis, _ = fitted_visibility(config)
    assert vis == pytest.approx(1.0, abs=1e-10)


# ---------------------------------------------------------------------------
# sinusoid fit


def test_fit_recovers_exact_parameters():
    thetas = np.linspace(0, 2 * math.pi, 36, endpoint=False)
    values = 0.4 + 0.3 * np.cos(2 * thetas + 1.1)
    fit = fit_sinusoid(series_of(thetas, values))
    assert fit.offset == pytest.approx(0.4, abs=1e-10)
    assert fit.amplitude == pytest.approx(0.3, abs=1e-10)
    assert fit.phase == pytest.approx(1.1, abs=1e-10)
    assert fit.residual_rms < 1e-10


def test_fit_phase_of_erased_scan():
    config = hybrid_eraser_config(alpha=math.pi / 4)
    _, fit = fitted_visibility(config)
    assert fit.phase == pytest.approx(math.pi / 2, abs=1e-9)


def test_fit_on_noisy_counts_recovers_amplitude():
    thetas = np.linspace(0, 2 * math.pi, 36, endpoint=False)
    truth = 1000.0 + 300.0 * np.cos(2 * thetas + 0.7)
    rng = np.random.default_rng(123)
    amplitudes = []
    for _ in range(50):
        counts = rng.poisson(truth)
        series = ScanSeries("theta", tuple(thetas),
                            tuple(np.clip(truth / truth.max(), 0, 1)),
                            counts=tuple(int(c) for c in counts))
        amplitudes.append(fit_sinusoid(series, on="counts").amplitude)
    stderr = np.std(amplitudes, ddof=1) / math.sqrt(len(amplitudes))
    assert abs(np.mean(amplitudes) - 300.0) < 3.0 * stderr


def test_fit_needs_four_distinct_settings():
    with pytest.raises(ValueError, match="4 distinct"):
        fit_sinusoid(series_of([0.0, 0.1, 0.2], [0.1, 0.2, 0.3]))


def test_degenerate_design_is_rejected():
    thetas = [0.0, math.pi, 0.0, math.pi]
    with pytest.raises(ValueError, match="4 distinct|degenerate"):
        fit_sinusoid(series_of(thetas, [0.5, 0.5, 0.5, 0.5]))
    # four distinct settings that alias the frequency-2 model: sin column 0
    aliased = [0.0, math.pi / 2, math.pi, 3 * math.pi / 2]
    with pytest.raises(ValueError, match="degenerate"):
        fit_sinusoid(series_of(aliased, [1.0, 0.0, 1.0, 0.0]))


# ---------------------------------------------------------------------------
# visibility versus polarizer angle


def test_visibility_follows_sine_of_twice_alpha():
    config = hybrid_eraser_config()
    alphas = np.linspace(0, math.pi / 4, 9)
    for point in visibility_curve(config, alphas):
        assert point.visibility == pytest.approx(
            theoretical_visibility(point.alpha), abs=1e-9)


def test_theoretical_visibility_values():
    assert theoretical_visibility(0.0) == 0.0
    assert theoretical_visibility(math.pi / 4) == pytest.approx(1.0)
    assert theoretical_visibility(math.pi / 8) == pytest.approx(ROOT2 / 2)


@pytest.mark.parametrize("alpha,target", [
    (math.pi / 4, 0.92),   # erased-fringe contrast, conventional run
    (math.pi / 4, 0.96),   # erased-fringe contrast, delayed run
    (0.0, 0.04),           # marked-case residual, conventional run
    (0.0, 0.008),          # marked-case residual, delayed run
])
def test_leak_calibration_spans_reference_visibilities(alpha, target):
    leak = calibrate_extinction(
        lambda e: hybrid_eraser_config(alpha=alpha, extinction=e),
        target_visibility=target)
    got, _ = fitted_visibility(hybrid_eraser_config(alpha=alpha, extinction=leak))
    assert got == pytest.approx(target, abs=1e-4)


def test_calibration_brackets_target():
    vis = fitted_visibility(
        hybrid_eraser_config(alpha=math.pi / 4, extinction=0.3))[0]
    assert vis < 1.0
    leak = calibrate_extinction(
        lambda e: hybrid_eraser_config(alpha=math.pi / 4, extinction=e),
        target_visibility=0.95)
    got = fitted_visibility(hybrid_eraser_config(alpha=math.pi / 4,
                                                 extinction=leak))[0]
    assert got == pytest.approx(0.95, abs=1e-4)


# ---------------------------------------------------------------------------
# which-path knowledge


def test_marked_pair_is_fully_distinguishable():
    assert distinguishability(marked_pair(1, math.pi / 2), ell=1) == \
        pytest.approx(1.0, abs=1e-12)


def test_path_independent_marker_is_indistinguishable():
    state = joint_ket({(POL_H, 0, POL_H, 1): 1 / ROOT2,
                       (POL_H, 0, POL_H, -1): 1 / ROOT2})
    assert distinguishability(state, ell=1) == pytest.approx(0.0, abs=1e-12)


def test_partially_marked_state():
    # markers H and D at equal path weights: trace distance 1/sqrt(2)
    beta = math.pi / 4
    state = joint_ket({
        (POL_H, 0, POL_H, 1): math.cos(beta),
        (POL_H, 0, POL_H, -1): math.sin(beta) / ROOT2,
        (POL_V, 0, POL_H, -1): math.sin(beta) / ROOT2,
    })
    assert distinguishability(state, ell=1) == pytest.approx(1 / ROOT2, abs=1e-12)


def test_single_path_is_distinguishable_by_absence():
    state = joint_ket({(POL_H, 0, POL_H, 1): 1.0})
    assert distinguishability(state, ell=1) == 1.0


def test_distinguishability_rejects_stray_oam():
    state = joint_ket({(POL_H, 0, POL_H, 2): 1.0})
    with pytest.raises(ValueError, match="subspace"):
        distinguishability(state, ell=1)


def test_complementarity_records():
    assert complementarity_check(1.0, 0.0).sum_of_squares == pytest.approx(1.0)
    assert not complementarity_check(0.0, 1.0).violated
    rec = complementarity_check(0.6, 0.6)
    assert rec.sum_of_squares == pytest.approx(0.72)
    assert not rec.violated
    assert complementarity_check(0.9, 0.9).violated
    with pytest.raises(ValueError, match="outside"):
        complementarity_check(1.4, 0.0)


def test_pure_states_saturate_the_complementarity_bound():
    rng = np.random.default_rng(77)
    for _ in range(50):
        raw = rng.normal(size=4) + 1j * rng.normal(size=4)
        raw /= np.linalg.norm(raw)
        state = joint_ket({
            (POL_H, 0, POL_H, 1): raw[0],
            (POL_H, 0, POL_H, -1): raw[1],
            (POL_V, 0, POL_H, 1): raw[2],
            (POL_V, 0, POL_H, -1): raw[3],
        })
        vis = oam_fringe_visibility(state, ell=1)
        dist = distinguishability(state, ell=1)
        record = complementarity_check(vis, dist)
        assert not record.violated
        assert record.sum_of_squares == pytest.approx(1.0, abs=1e-9)


def test_fringe_visibility_of_collapsed_state():
    assert oam_fringe_visibility(marked_pair(1, math.pi / 2), ell=1) == \
        pytest.approx(0.0, abs=1e-12)
    erased = joint_ket({(POL_H, 0, POL_H, 1): 1 / ROOT2,
                        (POL_H, 0, POL_H, -1): -1j / ROOT2})
    assert oam_fringe_visibility(erased, ell=1) == pytest.approx(1.0, abs=1e-10)


# ---------------------------------------------------------------------------
# spatial patterns


@pytest.mark.parametrize("ell", [1, 2, 5, 8])
def test_azimuthal_lobe_count(ell):
    pattern = render_azimuthal_pattern(ell, 0.37, 512)
    assert count_azimuthal_lobes(pattern) == 2 * ell


def test_single_mode_ring_is_flat():
    pattern = render_azimuthal_pattern(3, 0.0, 64, weights=(1.0, 0.0))
    assert np.allclose(pattern, 1.0, atol=1e-12)


def test_azimuthal_pattern_matches_cosine():
    pattern = render_azimuthal_pattern(2, 0.5, 128)
    phi = 2 * math.pi * np.arange(128) / 128
    assert np.allclose(pattern, 1 + np.cos(4 * phi - 0.5), atol=1e-12)


def test_undersampled_grid_is_rejected():
    with pytest.raises(ValueError, match="undersampled"):
        render_azimuthal_pattern(5, 0.0, 20)


def test_two_path_full_contrast_fringes():
    x = np.linspace(0, 4 * math.pi, 256, endpoint=False)
    model = TwoPathModel(1.0, 0.0, np.exp(1j * x), np.ones_like(x))
    intensity = two_path_pattern(model)
    vis = (intensity.max() - intensity.min()) / (intensity.max() + intensity.min())
    assert vis == pytest.approx(1.0, abs=1e-12)


def test_orthogonal_markers_wash_out_fringes():
    x = np.linspace(0, 4 * math.pi, 256, endpoint=False)
    model = TwoPathModel(0.0, 0.3, np.exp(1j * x), np.ones_like(x))
    intensity = two_path_pattern(model)
    assert np.allclose(intensity, 2.0, atol=1e-12)


def test_projected_patterns_sum_to_marked_intensity():
    x = np.linspace(0, 4 * math.pi, 256, endpoint=False)
    model = TwoPathModel(0.0, 0.3, np.exp(1j * x), np.ones_like(x))
    diag = two_path_pattern(model, projection="D")
    anti = two_path_pattern(model, projection="A")
    assert np.allclose(diag + anti, two_path_pattern(model), atol=1e-12)
    # complementary fringes: one pattern is the other shifted by pi
    assert np.allclose(diag, 1 + np.cos(x - 0.3), atol=1e-12)
    assert np.allclose(anti, 1 + np.cos(x - 0.3 + math.pi), atol=1e-12)

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import norm, wasserstein_distance

from tomosense.errors import EmptySamples, GridMismatch, MultipleRootsWarning, ValidationError
from tomosense.states import build_state, mean_photon_number
from tomosense.tomography import DistributionSlice, QuadratureGrid, auto_grid, pdf_slice
from tomosense.transport import (
    SweepTable,
    crossover_json,
    equal_mean_alpha,
    equal_mean_parameter,
    find_crossover,
    sweep_csv,
    sweep_w1,
    w1_cdf,
    w1_curve,
    w1_empirical,
    w1_states,
)

from conftest import ecs_spec, ocs_spec, svs_spec

VAC_SVS_05 = 0.22199130323553978  # (1 - e^{-1/2}) / sqrt(pi)


def gaussian_slice(sigma: float, grid: QuadratureGrid) -> DistributionSlice:
    xs = grid.points()
    return DistributionSlice(grid, 0.0, norm.pdf(xs, scale=sigma), norm.cdf(xs, scale=sigma))


# ---------------------------------------------------------------------------
# w1 on slices
# ---------------------------------------------------------------------------

def test_w1_of_identical_slices_is_zero():
    sl = pdf_slice(build_state(svs_spec(0.5)), 0.0, auto_grid(build_state(svs_spec(0.5))))
    assert w1_cdf(sl, sl) == 0.0


def test_w1_grid_mismatch():
    g1, g2 = QuadratureGrid(-8, 8, 2048), QuadratureGrid(-9, 9, 2048)
    with pytest.raises(GridMismatch):
        w1_cdf(gaussian_slice(1.0, g1), gaussian_slice(1.0, g2))


@pytest.mark.parametrize("sigmas", [(0.7071, 0.4289), (1.0, 0.5), (0.3, 1.7)])
def test_w1_gaussian_scale_identity(sigmas):
    """Analytic oracle: W1 of zero-mean Gaussians is |s1 - s2| sqrt(2/pi)."""
    grid = QuadratureGrid(-14.0, 14.0, 2048)
    got = w1_cdf(gaussian_slice(sigmas[0], grid), gaussian_slice(sigmas[1], grid))
    assert got == pytest.approx(abs(sigmas[0] - sigmas[1]) * math.sqrt(2 / math.pi), abs=1e-6)


def test_w1_vacuum_vs_squeezed_analytic_value():
    got = w1_states(svs_spec(0.0), svs_spec(0.5), 0.0)
    assert got == pytest.approx(VAC_SVS_05, abs=1e-6)


def test_w1_symmetric_and_plus_minus_one_equal():
    a, b = svs_spec(0.5, 1), svs_spec(0.5, 2)
    assert w1_states(a, b, 0.3) == w1_states(b, a, 0.3)
    assert w1_states(svs_spec(0.5), svs_spec(0.5, 1), 0.0) == \
        w1_states(svs_spec(0.5), svs_spec(0.5, -1), 0.0)


def test_w1_grid_doubling_stability():
    base = w1_states(svs_spec(0.6, 1), svs_spec(0.6, 2), 0.3, n_points=2048)
    fine = w1_states(svs_spec(0.6, 1), svs_spec(0.6, 2), 0.3, n_points=4096)
    assert abs(base - fine) < 1e-7


def test_metric_axioms_on_random_state_triples():
    rng = np.random.default_rng(7)
    for _ in range(5):
        specs = []
        for _ in range(3):
            if rng.random() < 0.5:
                specs.append(svs_spec(rng.uniform(0.2, 0.8), int(rng.integers(-3, 4))))
            else:
                specs.append(ecs_spec(rng.uniform(0.5, 2.5), int(rng.integers(0, 3))))
        theta = rng.uniform(0, 2 * math.pi)
        vecs = [build_state(s) for s in specs]
        grid = auto_grid(vecs[0])
        for v in vecs[1:]:
            grid = grid.union(auto_grid(v))
        sl = [pdf_slice(v, theta, grid) for v in vecs]
        d01, d10 = w1_cdf(sl[0], sl[1]), w1_cdf(sl[1], sl[0])
        d12, d02 = w1_cdf(sl[1], sl[2]), w1_cdf(sl[0], sl[2])
        assert d01 == d10
        assert w1_cdf(sl[0], sl[0]) == 0.0
        assert d02 <= d01 + d12 + 1e-9


def test_w1_ordering_at_matched_mean_photon():
    """At equal mean photon number, more added photons give a larger W1."""
    for target in (3.2, 4.0):
        values = []
        for m in (1, 2, 3):
            r_m = equal_mean_parameter(svs_spec(m=m), target)
            values.append(w1_states(svs_spec(r_m), svs_spec(r_m, m), 0.0))
        assert values[0] < values[1] < values[2]


def test_w1_svs_vs_ecs_at_equal_mean_photon_increases():
    values = []
    for r in (0.2, 0.4, 0.6, 0.8):
        alpha = equal_mean_alpha(r)
        values.append(w1_states(svs_spec(r), ecs_spec(alpha), 0.0))
    assert all(b > a for a, b in zip(values, values[1:]))


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

def test_sweep_shapes_and_decreasing_added_curves():
    table = sweep_w1(svs_spec(), [svs_spec(m=1), svs_spec(m=2), svs_spec(m=3)],
                     (0.3, 0.8, 11), 0.0)
    assert table.parameter_name == "r"
    assert [label for label, _ in table.columns] == \
        ["svs:svs_add1", "svs:svs_add2", "svs:svs_add3"]
    for _, col in table.columns:
        assert np.all(np.diff(col) < 0)


def test_sweep_missing_cells_and_csv():
    table = sweep_w1(svs_spec(), [svs_spec(m=-2)], (0.0, 0.4, 5), 0.0)
    col = table.columns[0][1]
    assert math.isnan(col[0]) and np.all(np.isfinite(col[1:]))
    lines = sweep_csv(table).strip().splitlines()
    assert lines[0] == "param,svs:svs_sub2"
    assert lines[1].endswith(",")  # r = 0 row has an empty cell
    value = float(lines[2].split(",")[1])
    assert value == col[1]


def test_sweep_rejects_mixed_parameters():
    with pytest.raises(ValidationError):
        sweep_w1(svs_spec(), [ecs_spec()], (0.3, 0.8, 5), 0.0)


# ---------------------------------------------------------------------------
# crossovers
# ---------------------------------------------------------------------------

def test_crossover_one_vs_two_added():
    res = find_crossover(w1_curve(svs_spec(), svs_spec(m=1)),
                         w1_curve(svs_spec(), svs_spec(m=2)), (0.30, 0.60), 0.0)
    assert res.found
    assert res.location == pytest.approx(0.4407, abs=5e-3)
    assert res.residual < 1e-6
    assert res.bracket[0] <= res.location <= res.bracket[1]


def test_crossover_one_vs_three_added_location():
    # the curves meet near r = 0.549 along the x-quadrature
    res = find_crossover(w1_curve(svs_spec(), svs_spec(m=1)),
                         w1_curve(svs_spec(), svs_spec(m=3)), (0.45, 0.75), 0.0)
    assert res.found and res.residual < 1e-6
    assert res.location == pytest.approx(0.5493, abs=5e-3)


def test_no_crossover_for_subtracted_states():
    res = find_crossover(w1_curve(svs_spec(), svs_spec(m=-1)),
                         w1_curve(svs_spec(), svs_spec(m=-2)), (0.30, 0.80), 0.0)
    assert not res.found and res.location is None


def test_multiple_roots_flagged_not_fatal():
    curve_a = lambda p, theta: 1.0 + 0.5 * math.cos(4 * math.pi * p)  # noqa: E731
    curve_b = lambda p, theta: 1.0  # noqa: E731
    with pytest.warns(MultipleRootsWarning):
        res = find_crossover(curve_a, curve_b, (0.0, 1.0), 0.0)
    assert res.found and res.sign_changes > 1
    assert res.location == pytest.approx(0.125, abs=1e-3)


def test_crossover_json_record():
    res = find_crossover(w1_curve(svs_spec(), svs_spec(m=1)),
                         w1_curve(svs_spec(), svs_spec(m=2)), (0.30, 0.60), 0.0,
                         scan_points=16)
    record = json.loads(crossover_json(res))
    assert set(record) == {"found", "location", "bracket_lo", "bracket_hi",
                           "residual", "scan_points"}
    assert record["scan_points"] == 16


# ---------------------------------------------------------------------------
# equal-mean matching
# ---------------------------------------------------------------------------

def test_equal_mean_alpha_values():
    assert equal_mean_alpha(0.0) == 0.0
    assert equal_mean_alpha(0.5) == pytest.approx(0.738840959845342, abs=1e-9)
    for r in (0.2, 0.5, 0.8):
        alpha = equal_mean_alpha(r)
        nbar = mean_photon_number(build_state(ecs_spec(alpha)))
        assert nbar == pytest.approx(math.sinh(r) ** 2, abs=1e-8)


def test_equal_mean_parameter_generic():
    target = 2.3
    alpha = equal_mean_parameter(ocs_spec(), target)
    assert mean_photon_number(build_state(ocs_spec(alpha))) == pytest.approx(target, abs=1e-8)
    with pytest.raises(ValidationError):
        equal_mean_parameter(ocs_spec(), 0.5)  # odd cat mean never drops below 1


# ---------------------------------------------------------------------------
# empirical estimator
# ---------------------------------------------------------------------------

def test_w1_empirical_basics():
    a = np.array([0.0, 1.0, 2.0, 5.0])
    assert w1_empirical(a, a) == 0.0
    with pytest.raises(EmptySamples):
        w1_empirical([1.0], [1.0, 2.0])


@given(st.lists(st.integers(-1024, 1024), min_size=2, max_size=64),
       st.integers(-64, 64))
@settings(max_examples=50, deadline=None)
def test_w1_empirical_translation_exact(values, shift):
    # dyadic samples keep the addition exact, so the metric is exactly |c|
    a = np.array(values, dtype=float) / 32.0
    c = float(shift)
    assert w1_empirical(a, a + c) == abs(c)


def test_w1_empirical_unequal_counts_matches_scipy():
    rng = np.random.default_rng(3)
    a, b = rng.normal(size=501), rng.normal(loc=0.3, size=307)
    assert w1_empirical(a, b) == pytest.approx(wasserstein_distance(a, b), abs=1e-12)


def test_sweep_table_validation():
    with pytest.raises(ValidationError):
        SweepTable("r", np.array([0.2, 0.1]), [])
    with pytest.raises(ValidationError):
        SweepTable("r", np.array([0.1, 0.2]), [("bad", np.array([1.0, -2.0]))])

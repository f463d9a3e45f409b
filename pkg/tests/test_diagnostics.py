import math

import numpy as np
import pytest

from largesol.diagnostics import (
    Barrier,
    minimal_comparison_z,
    radial_blowup_check,
    sandwich_check,
    second_tangential_bound_check,
    select_r0,
    tangential_bound_check,
)
from largesol.errors import DomainError
from largesol.field2d import PolarField, continuation_2d, polar_grid, solve_annulus_2d, solve_disk
from largesol.nonlinearity import cubic_minus_linear, power, split_asymptotic
from largesol.radial import continuation, solve_truncated
from oracles import K0_cubic_minus_linear, potential_P


def test_phi_values():
    bar = Barrier(1.0, 2, 0.5)
    assert float(bar.phi(0.0)) == 0.25
    assert float(bar.phi(1.0)) == 0.0


def test_P_values():
    bar = Barrier(1.0, 3, 0.5)
    assert float(bar.P(0.5)) == pytest.approx(1.0, abs=1e-15)
    assert float(bar.P(1.0)) == 0.0
    assert float(bar.P(0.75)) == pytest.approx(1.0 / 3.0, rel=1e-14)
    r = np.linspace(0.5, 1.0, 7)
    assert np.allclose(Barrier(1.0, 2, 0.5).P(r), potential_P(r, 0.5, 1.0, 2), rtol=1e-14)


def test_barrier_needs_interior_r0():
    with pytest.raises(DomainError):
        Barrier(1.0, 2, 1.0)


@pytest.fixture(scope="module")
def cml_disk():
    nl = cubic_minus_linear(5.0)
    grid = polar_grid(1.0, 64, 32, nl=nl, k_max=1e3)
    return nl, grid, solve_disk(nl, grid, 1e3)


def _U(split, grid, k):
    sched = [10.0**j for j in range(1, 40) if 10.0**j < k] + [k]
    prof, _ = continuation(split.g_inf, grid.radial, 2, sched, stop_tol=0.0)
    return prof


def test_sandwich_cubic_minus_linear(cml_disk):
    nl, grid, f = cml_disk
    split = split_asymptotic(nl)
    rep = sandwich_check(f, _U(split, grid, 1e3), split)
    assert rep.passed
    assert rep.constants["K0"] == pytest.approx(K0_cubic_minus_linear(5.0), rel=1e-10)
    assert rep.constants["K0"] == pytest.approx(4.3033, abs=1e-4)
    # the constant √5 is a subsolution, so u stays where g = g_inf and matches U_R
    assert f.values.min() >= math.sqrt(5.0)
    assert rep.details["max_abs_u_minus_U"] <= rep.tolerances["tol_max"]


@pytest.mark.parametrize("width,inside", [(0.5, True), (-0.5, True), (1.5, False), (-1.5, False)])
def test_sandwich_band_width(cml_disk, width, inside):
    nl, grid, f = cml_disk
    split = split_asymptotic(nl)
    U = _U(split, grid, 1e3)
    K0 = split.k0(0.0)
    shifted = U.u_values + width * K0 * Barrier(1.0, 2, 0.5).phi(grid.r_nodes)
    g = PolarField.radial_lift(grid, shifted, 1e3)
    assert sandwich_check(g, U, split).passed is inside


def test_sandwich_fails_without_width(cml_disk):
    nl, grid, _ = cml_disk
    split = split_asymptotic(nl)
    U = _U(split, grid, 1e3)
    g = PolarField.radial_lift(grid, U.u_values + 0.1 * Barrier(1.0, 2, 0.5).phi(grid.r_nodes), 1e3)
    assert not sandwich_check(g, U, split, k0=0.0).passed


def test_sandwich_degenerates_for_convex_g():
    nl = power(3.0)
    grid = polar_grid(1.0, 64, 32, nl=nl, k_max=1e3)
    f = solve_disk(nl, grid, 1e3)
    split = split_asymptotic(nl, M=0.0)
    rep = sandwich_check(f, _U(split, grid, 1e3), split)
    assert rep.constants["K0"] == 0.0
    assert rep.passed
    assert rep.details["max_abs_u_minus_U"] <= rep.tolerances["tol_max"]


def test_sandwich_rejects_mismatched_levels(cml_disk):
    nl, grid, f = cml_disk
    split = split_asymptotic(nl)
    with pytest.raises(DomainError):
        sandwich_check(f, _U(split, grid, 1e2), split)


@pytest.fixture(scope="module")
def cos_annulus():
    nl = power(3.0)
    grid = polar_grid(1.0, 64, 32, r_in=0.5, nl=nl, k_max=1e4)
    data = 2.0 + np.cos(grid.theta_nodes)
    return grid, continuation_2d(nl, grid, [1e1, 1e2, 1e3, 1e4], inner_data=data)


def test_tangential_bounds_hold(cos_annulus):
    _, fields = cos_annulus
    f = fields[-1]
    rep = tangential_bound_check(f, 0.0)
    assert rep.passed
    assert rep.constants["L_star"] > 0
    assert math.isfinite(rep.constants["C_boundary"])
    assert second_tangential_bound_check(f, 0.0).passed


def test_second_bound_on_cos_data(cos_annulus):
    _, fields = cos_annulus
    rep = second_tangential_bound_check(fields[-1], 0.0)
    assert rep.passed
    # at r0 the bound is attained, so the slack is exactly zero
    assert rep.details["max_slack"] == 0.0


def test_two_sided_second_bound_fails():
    # a peaked datum makes u_θθ far more negative than positive at r0: the
    # one-sided bound holds, its two-sided version does not
    nl = power(3.0)
    grid = polar_grid(1.0, 64, 64, r_in=0.5, nl=nl, k_max=1e4)
    data = 2.0 + 0.5 * np.exp(2.0 * (np.cos(grid.theta_nodes) - 1.0))
    f = continuation_2d(nl, grid, [1e1, 1e2, 1e3, 1e4], inner_data=data)[-1]
    one = second_tangential_bound_check(f, 0.0)
    two = second_tangential_bound_check(f, 0.0, two_sided=True)
    assert one.passed and not two.passed
    assert one.details["min_u_thth"] < -one.constants["L_tilde_star"]


def test_r0_advanced_when_below_M(cos_annulus):
    _, fields = cos_annulus
    f = fields[-1]
    i0, note = select_r0(f, 5.0, r0=0.5)
    assert f.values[i0].min() >= 5.0
    assert note is not None and "advanced" in note
    rep = tangential_bound_check(f, 5.0, r0=0.5)
    assert "r0_note" in rep.details


def test_radial_field_bounds_are_trivial():
    grid = polar_grid(1.0, 64, 32, r_in=0.5)
    f = solve_annulus_2d(power(3.0), grid, 100.0, np.full(grid.n_theta, 2.0))
    assert tangential_bound_check(f, 0.0).constants["L_star"] <= 1e-9
    assert second_tangential_bound_check(f, 0.0).details["min_u_thth"] >= -1e-6


def test_tangential_needs_annulus(cml_disk):
    *_, f = cml_disk
    with pytest.raises(DomainError):
        tangential_bound_check(f, 0.0)


def test_radial_blowup_grows_for_cubic(cos_annulus):
    _, fields = cos_annulus
    rep = radial_blowup_check(fields)
    assert rep.passed
    assert all(x > 1.0 for x in rep.details["growth_ratios"])


def test_radial_blowup_saturates_for_linear():
    # Δu = u at fixed k: the derivative at the probe ring stops moving
    profiles = [solve_truncated(power(1.0), 1.0, 2, 1.0, n_r=128) for _ in range(3)]
    rep = radial_blowup_check(profiles)
    assert not rep.passed
    assert rep.details["trend_flag"] is not None


def test_radial_blowup_uniformity_for_radial_profiles():
    profiles = [solve_truncated(power(3.0), 1.0, 2, k, n_r=256) for k in (10.0, 100.0, 1000.0)]
    rep = radial_blowup_check(profiles)
    assert rep.details["uniformity_ratio"] == [0.0, 0.0, 0.0]


def test_radial_blowup_needs_three_levels():
    with pytest.raises(DomainError):
        radial_blowup_check([])


def test_minimal_comparison_below_field(cos_annulus):
    grid, fields = cos_annulus
    f = fields[-1]
    split = split_asymptotic(power(3.0), M=0.0)
    i0, _ = select_r0(f, 0.0)
    r0 = float(grid.r_nodes[i0])
    z = minimal_comparison_z(split, r0, 1.0, 2, float(f.values[i0].min()), field=f)
    assert z.info["comparison"]["passed"]
    # strict away from the boundary; next to R both sides agree to round-off
    sel = grid.r_nodes > r0 * (1 + 1e-14)
    bulk = grid.r_nodes[sel] <= 0.9
    assert np.min(f.values[sel][bulk] - z.u_values[bulk, None]) > 1e-6


def test_minimal_comparison_for_radial_field():
    grid = polar_grid(1.0, 64, 32, r_in=0.5)
    f = solve_annulus_2d(power(3.0), grid, 1e4, np.full(grid.n_theta, 2.0))
    split = split_asymptotic(power(3.0), M=0.0)
    z = minimal_comparison_z(split, 0.5, 1.0, 2, 2.0, field=f)
    assert np.max(np.abs(f.values[:, 0] - z.u_values)) <= 1e-9 * np.max(z.u_values)


def test_flux_integral_diverges():
    split = split_asymptotic(power(3.0), M=0.0)
    z = minimal_comparison_z(split, 0.5, 1.0, 2, 2.0, n_r=512)
    assert z.info["integral_growth"] >= 1e3

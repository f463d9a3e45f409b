import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from largesol.errors import DomainError
from largesol.field2d import (
    PERTURBED,
    PolarField,
    continuation_2d,
    field_residual,
    gradient_decomposition,
    polar_grid,
    probe_values,
    radial_solution,
    solve_annulus_2d,
    solve_disk,
    theta_second_difference,
)
from largesol.nonlinearity import cubic_minus_linear, power


@pytest.fixture(scope="module")
def disk():
    return polar_grid(1.0, 64, 32, nl=power(3.0), k_max=100.0)


@pytest.fixture(scope="module")
def ring():
    return polar_grid(1.0, 64, 32, r_in=0.5, nl=power(3.0), k_max=100.0)


def test_radial_lift_is_nearly_a_solution(disk):
    f = solve_disk(power(3.0), disk, 100.0)
    assert f.info["iterations"] <= 3
    assert np.max(np.abs(field_residual(power(3.0), f))) <= 1e-9 * (1.0 + 100.0**3)
    assert np.max(f.ring_range()) <= 1e-12 * 100.0


def test_perturbed_seeds_agree(disk):
    nl = cubic_minus_linear(5.0)
    a = solve_disk(nl, disk, 100.0, init=PERTURBED, seed=1)
    b = solve_disk(nl, disk, 100.0, init=PERTURBED, seed=2)
    assert np.max(np.abs(a.values - b.values)) <= 1e-8 * np.max(np.abs(a.values))


def test_constant_inner_data_reproduces_radial_solution(ring):
    nl = power(3.0)
    f = solve_annulus_2d(nl, ring, 100.0, np.full(ring.n_theta, 2.0))
    ref = radial_solution(nl, ring, 100.0, inner_value=2.0)
    assert np.max(np.abs(f.values - ref[:, None])) <= 1e-9 * np.max(ref)


@given(st.integers(1, 31))
def test_rotation_equivariance(shift):
    grid = polar_grid(1.0, 32, 32, r_in=0.5)
    th = grid.theta_nodes
    data = 2.0 + np.cos(th) + 0.3 * np.sin(3 * th)
    nl = power(3.0)
    f = solve_annulus_2d(nl, grid, 50.0, data)
    g = solve_annulus_2d(nl, grid, 50.0, np.roll(data, shift))
    assert np.max(np.abs(f.rotated(shift).values - g.values)) <= 1e-9 * np.max(np.abs(f.values))


def test_gradient_decomposition_on_quadratic(ring):
    f = PolarField.from_function(ring, lambda r, t: r**2 * np.cos(t))
    du_dr, du_tau = gradient_decomposition(f)
    rr, tt = ring.mesh()
    # three-point differences are exact in r for quadratics; in θ the centred
    # difference of cos carries the factor sin(Δθ)/Δθ
    assert np.allclose(du_dr, 2 * rr * np.cos(tt), rtol=0, atol=1e-12)
    damp = math.sin(ring.dtheta) / ring.dtheta
    assert np.allclose(du_tau, -rr * np.sin(tt) * damp, rtol=0, atol=1e-12)
    second = theta_second_difference(f)
    damp2 = (2 * math.sin(ring.dtheta / 2) / ring.dtheta) ** 2
    assert np.allclose(second, -(rr**2) * np.cos(tt) * damp2, rtol=0, atol=1e-10)


def test_gradient_decomposition_through_the_centre(disk):
    # x = r cos θ is smooth across the centre
    f = PolarField.from_function(disk, lambda r, t: r * np.cos(t))
    du_dr, _ = gradient_decomposition(f)
    _, tt = disk.mesh()
    assert np.allclose(du_dr, np.cos(tt), rtol=0, atol=1e-12)


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_gradient_decomposition_is_linear(a, b):
    grid = polar_grid(1.0, 16, 16, r_in=0.3)
    f = PolarField.from_function(grid, lambda r, t: np.exp(r) * np.sin(2 * t))
    g = PolarField.from_function(grid, lambda r, t: r**3 + np.cos(t))
    h = PolarField.from_function(grid, lambda r, t: a * np.exp(r) * np.sin(2 * t) + b * (r**3 + np.cos(t)))
    for x, y, z in zip(gradient_decomposition(f), gradient_decomposition(g), gradient_decomposition(h)):
        assert np.allclose(a * x + b * y, z, rtol=1e-12, atol=1e-12)


def test_raising_k_raises_the_solution(ring):
    nl = power(3.0)
    data = 2.0 + np.cos(ring.theta_nodes)
    fields = continuation_2d(nl, ring, [10.0, 100.0, 1000.0], inner_data=data)
    for lo, hi in zip(fields, fields[1:]):
        assert np.all(hi.values >= lo.values)


def test_probe_values_on_radial_lift(disk):
    u = radial_solution(power(3.0), disk, 100.0)
    f = PolarField.radial_lift(disk, u, 100.0)
    i = disk.n_r // 2
    assert probe_values(f, [disk.r_nodes[i]])[0] == pytest.approx(u[i], rel=1e-14)


def test_geometry_checks(disk, ring):
    with pytest.raises(DomainError):
        solve_disk(power(3.0), ring, 10.0)
    with pytest.raises(DomainError):
        solve_annulus_2d(power(3.0), disk, 10.0, np.ones(disk.n_theta))
    with pytest.raises(DomainError):
        solve_annulus_2d(power(3.0), ring, 10.0, np.ones(3))
    with pytest.raises(DomainError):
        PolarField(ring, np.zeros(ring.shape), 1.0)

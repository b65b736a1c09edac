"""Right-hand sides: trivial identities, oracles, and equivalences."""

import math

import numpy as np
import pytest

from dchsim import (
    Field,
    HelmholtzOperator,
    RhsWorkspace,
    build_grid,
    helmholtz_apply,
    kernel_convolve_direct,
    nonlocal_flux,
    rhs_n,
    rhs_v,
    rhs_vx,
    spectral_derivative,
)

from conftest import band_limited_field


@pytest.fixture
def ws2(grid20):
    return RhsWorkspace(grid20, 2.0)


def reflect(values):
    """values at -x on the node set (x_0 = -L is its own mirror)."""
    return np.concatenate(([values[0]], values[1:][::-1]))


class TestNonlocalFlux:
    def test_zero(self, grid20, ws2):
        out = nonlocal_flux(Field(np.zeros(grid20.n_points), grid20), ws2)
        assert np.abs(out.values).max() == 0.0

    def test_constant(self, grid20, ws2):
        c = 0.8
        out = nonlocal_flux(Field(np.full(grid20.n_points, c), grid20), ws2)
        assert np.abs(out.values - 2.0 * c * c).max() < 1e-13

    def test_quadrature_oracle(self):
        # P for v = exp(-x^2), d=2 equals the kernel convolution of the
        # analytic integrand 2 v^2 + 2 v_x^2.
        g = build_grid(30.0, 2048)
        ws = RhsWorkspace(g, 2.0)
        x = g.x
        v = Field(np.exp(-(x**2)), g)
        integrand = 2.0 * np.exp(-2 * x**2) + 2.0 * (-2 * x * np.exp(-(x**2))) ** 2
        oracle = kernel_convolve_direct(Field(integrand, g), 2.0).values
        assert np.abs(nonlocal_flux(v, ws).values - oracle).max() < 1e-6


class TestRhsV:
    def test_zero_and_constant(self, grid20, ws2):
        zero = rhs_v(Field(np.zeros(grid20.n_points), grid20), ws2)
        assert np.abs(zero.values).max() == 0.0
        const = rhs_v(Field(np.full(grid20.n_points, 1.2), grid20), ws2)
        assert np.abs(const.values).max() < 1e-13

    def test_even_input_gives_odd_output(self, grid20, ws2):
        v = Field(np.exp(-(grid20.x**2)), grid20)
        out = rhs_v(v, ws2).values
        assert np.abs(out + reflect(out)).max() < 1e-10

    def test_translation_equivariance(self, grid20, ws2):
        v = band_limited_field(grid20, 21)
        a = np.roll(rhs_v(v, ws2).values, 3)
        b = rhs_v(Field(np.roll(v.values, 3), grid20), ws2).values
        assert np.abs(a - b).max() < 1e-12 * max(np.abs(a).max(), 1.0)

    @pytest.mark.parametrize("d", [2.0, 4.0])
    def test_scaling_map_to_classical_equation(self, d):
        # u(y) = sqrt(d) v(sqrt(d) y) turns the d-equation into d=1:
        # rhs at parameter 1 of the mapped field equals the mapped rhs.
        g = build_grid(20.0, 1024)
        gu = build_grid(20.0 / math.sqrt(d), 1024)
        v = Field(np.exp(-(g.x**2)) * np.cos(g.x), g)
        u = Field(math.sqrt(d) * v.values, gu)  # same samples, y = x/sqrt(d)
        lhs = rhs_v(u, RhsWorkspace(gu, 1.0)).values
        rhs_mapped = math.sqrt(d) * rhs_v(v, RhsWorkspace(g, d)).values
        assert np.abs(lhs - rhs_mapped).max() < 1e-6


class TestRhsN:
    def test_zero_and_constant(self, grid20, ws2):
        zero = rhs_n(Field(np.zeros(grid20.n_points), grid20), ws2)
        assert np.abs(zero.values).max() == 0.0
        const = rhs_n(Field(np.full(grid20.n_points, 0.6), grid20), ws2)
        assert np.abs(const.values).max() < 1e-13

    def test_form_equivalence_gaussian(self, grid20, ws2):
        # (1 - d dxx) rhs_v(v) = rhs_n((1 - d dxx) v): the two forms are
        # the same equation written for different unknowns.
        op = HelmholtzOperator(grid20, 2.0)
        v = Field(np.exp(-(grid20.x**2)), grid20)
        lhs = helmholtz_apply(rhs_v(v, ws2), op).values
        rhs = rhs_n(helmholtz_apply(v, op), ws2).values
        assert np.abs(lhs - rhs).max() < 1e-8

    @pytest.mark.parametrize("seed", range(3))
    def test_form_equivalence_random(self, grid20, ws2, seed):
        op = HelmholtzOperator(grid20, 2.0)
        v = band_limited_field(grid20, seed + 30, amplitude=0.5)
        lhs = helmholtz_apply(rhs_v(v, ws2), op).values
        rhs = rhs_n(helmholtz_apply(v, op), ws2).values
        scale = max(np.abs(lhs).max(), 1e-300)
        assert np.abs(lhs - rhs).max() < 1e-8 * max(scale, 1.0)


class TestRhsVx:
    def test_zero_and_constant(self, grid20, ws2):
        zero = rhs_vx(Field(np.zeros(grid20.n_points), grid20), ws2)
        assert np.abs(zero.values).max() == 0.0
        # For constant c the convolution of c^2 is c^2, so the right side
        # collapses to c^2 - c^2 = 0.
        const = rhs_vx(Field(np.full(grid20.n_points, 1.1), grid20), ws2)
        assert np.abs(const.values).max() < 1e-13

    def test_differentiated_equation_identity(self, grid20, ws2):
        # d/dx of the v-equation: dx(rhs_v) + d v v_xx = rhs_vx.
        d = 2.0
        v = Field(np.exp(-(grid20.x**2)), grid20)
        lhs = (
            spectral_derivative(rhs_v(v, ws2), 1).values
            + d * v.values * spectral_derivative(v, 2).values
        )
        assert np.abs(lhs - rhs_vx(v, ws2).values).max() < 1e-8

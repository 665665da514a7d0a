import numpy as np
import pytest

from adimax import (NonFiniteFieldError, TriDiagSystem, enforce_pec, lincomb,
                    make_grid, sample_exact, solve_tridiagonal, stage1, stage1_residual,
                    stage2, stage2_residual, step, step_residual, zero_state)
from adimax.norms import energy_l2
from adimax.operators import diff

from conftest import grid3, grid4, max_component_diff, random_state
from oracles import adi_step_loop, dense_tridiag_solve


def test_tridiagonal_identity_when_lambda_zero():
    rhs = np.array([1.0, -2.0, 3.5])
    out = solve_tridiagonal(TriDiagSystem(0.0, rhs))
    assert np.array_equal(out, rhs)


def test_tridiagonal_zero_rhs():
    out = solve_tridiagonal(TriDiagSystem(4.2, np.zeros(9)))
    assert np.all(out == 0.0)


def test_tridiagonal_matches_dense_oracle(rng):
    for lam in (1e-6, 0.3, 2.0, 50.0):
        rhs = rng.standard_normal(16)
        got = solve_tridiagonal(TriDiagSystem(lam, rhs))
        want = dense_tridiag_solve(lam, rhs)
        assert np.max(np.abs(got - want)) <= 1e-12 * max(1.0, np.max(np.abs(want)))


def test_tridiagonal_residual_tiny(rng):
    lam = 7.5
    rhs = rng.standard_normal(33)
    u = solve_tridiagonal(TriDiagSystem(lam, rhs))
    padded = np.concatenate([[0.0], u, [0.0]])
    res = (1 + 2 * lam) * padded[1:-1] - lam * (padded[2:] + padded[:-2]) - rhs
    assert np.max(np.abs(res)) <= 1e-13 * max(1.0, np.max(np.abs(rhs)))


def test_tridiagonal_validates_input():
    with pytest.raises(ValueError):
        TriDiagSystem(-1.0, np.zeros(4))
    with pytest.raises(ValueError):
        TriDiagSystem(1.0, np.array([np.nan, 0.0]))


def test_zero_state_is_fixed_point(medium):
    g = grid4(0.3)
    s = zero_state(g)
    out = step(s, g, medium)
    assert out.max_abs() == 0.0
    assert out.time_level == 1.0


@pytest.mark.parametrize("dt", [1e-4, 0.05, 1.0])
def test_stage_residuals_on_sampled_mode(dt, medium):
    g = make_grid(8, 8, 8, dt)
    s0 = enforce_pec(sample_exact(0.0, g))
    half = stage1(s0, g, medium)
    assert stage1_residual(s0, half, g, medium) <= 1e-12
    full = stage2(half, g, medium)
    assert stage2_residual(half, full, g, medium) <= 1e-12
    assert step_residual(s0, half, full, g, medium) <= 1e-12


@pytest.mark.parametrize("dt", [1e-4, 0.05, 1.0])
def test_stage_residuals_on_random_pec_data(dt, rng, medium):
    g = make_grid(8, 8, 8, dt)
    s0 = random_state(g, rng)
    half = stage1(s0, g, medium)
    full = stage2(half, g, medium)
    assert stage1_residual(s0, half, g, medium) <= 1e-12
    assert stage2_residual(half, full, g, medium) <= 1e-12


def test_residual_detects_perturbation(rng, medium):
    g = make_grid(8, 8, 8, 0.05)
    s0 = random_state(g, rng)
    half = stage1(s0, g, medium)
    half.ex[3, 4, 2] += 1e-6
    assert stage1_residual(s0, half, g, medium) >= 1e-7


def test_residual_zero_states(medium):
    g = grid4()
    z = zero_state(g)
    assert stage1_residual(z, z, g, medium) == 0.0


def test_stage_rejects_non_finite(medium):
    g = grid3()
    s = zero_state(g)
    s.hy[1, 1, 1] = np.inf
    with pytest.raises(NonFiniteFieldError):
        stage1(s, g, medium)


def test_step_linearity(rng, medium):
    g = grid4(0.7)
    s1 = random_state(g, rng)
    s2 = random_state(g, rng)
    combo = lincomb(0.8, s1, -1.7, s2)
    direct = step(combo, g, medium)
    split = lincomb(0.8, step(s1, g, medium), -1.7, step(s2, g, medium), time_level=1.0)
    scale = max(1.0, direct.max_abs())
    assert max_component_diff(direct, split) <= 1e-13 * scale


def _assert_walls_zero(out):
    assert np.all(out.ex[:, 0, :] == 0.0) and np.all(out.ex[:, -1, :] == 0.0)
    assert np.all(out.ex[:, :, 0] == 0.0) and np.all(out.ex[:, :, -1] == 0.0)
    assert np.all(out.ey[0, :, :] == 0.0) and np.all(out.ey[-1, :, :] == 0.0)
    assert np.all(out.ey[:, :, 0] == 0.0) and np.all(out.ey[:, :, -1] == 0.0)
    assert np.all(out.ez[0, :, :] == 0.0) and np.all(out.ez[-1, :, :] == 0.0)
    assert np.all(out.ez[:, 0, :] == 0.0) and np.all(out.ez[:, -1, :] == 0.0)


def test_wall_entries_bitwise_zero_after_each_stage(rng, medium):
    g = make_grid(5, 4, 3, 0.6)
    half = stage1(random_state(g, rng), g, medium)
    _assert_walls_zero(half)
    assert half.time_level == pytest.approx(0.5)
    full = stage2(half, g, medium)
    _assert_walls_zero(full)


def test_wall_normal_h_is_frozen(rng, medium):
    g = grid4(0.4)
    s = random_state(g, rng)
    out = step(s, g, medium)
    assert np.array_equal(out.hx[0, :, :], s.hx[0, :, :])
    assert np.array_equal(out.hx[-1, :, :], s.hx[-1, :, :])
    assert np.array_equal(out.hy[:, 0, :], s.hy[:, 0, :])
    assert np.array_equal(out.hz[:, :, -1], s.hz[:, :, -1])


@pytest.mark.parametrize("cells", [(3, 3, 3), (4, 4, 4), (3, 4, 5)])
def test_step_matches_dense_loop_oracle(cells, rng, medium):
    g = make_grid(*cells, 0.45)
    s = random_state(g, rng)
    got = step(s, g, medium)
    want = adi_step_loop(s, g, medium)
    scale = max(1.0, want.max_abs())
    assert max_component_diff(got, want) <= 1e-12 * scale


def test_half_level_energy_balance(rng, medium):
    """After stage one, the half-level directional energy equals the whole-level
    one up to the two explicit wall-plane correction sums."""
    g = make_grid(5, 6, 7, 0.4)
    nx, ny, nz = g.cells
    dx = g.dx
    for s0 in (random_state(g, rng), enforce_pec(sample_exact(0.0, g))):
        half = stage1(s0, g, medium)

        def vol_terms(state, half_level):
            d0 = lambda a: diff(a, 0, g)
            d1 = lambda a: diff(a, 1, g)
            d2 = lambda a: diff(a, 2, g)
            eps, mu = medium.eps, medium.mu
            q = g.dt ** 2 / (4 * eps * mu)
            e = eps * (np.sum(d0(state.ex)[:, 1:ny, 1:nz] ** 2)
                       + np.sum(d0(state.ey)[1:nx - 1, :, 1:nz] ** 2)
                       + np.sum(d0(state.ez)[1:nx - 1, 1:ny, :] ** 2))
            h = mu * (np.sum(d0(state.hx)[1:nx - 1, :, :] ** 2)
                      + np.sum(d0(state.hy)[:, 1:ny, :] ** 2)
                      + np.sum(d0(state.hz)[:, :, 1:nz] ** 2))
            if half_level:
                p = mu * (np.sum(d0(d1(state.hz))[:, :, 1:nz] ** 2)
                          + np.sum(d0(d2(state.hx))[1:nx - 1, :, :] ** 2)
                          + np.sum(d0(d0(state.hy))[:, 1:ny, :] ** 2))
                p += eps * (np.sum(d0(d2(state.ey))[1:nx - 1, :, :] ** 2)
                            + np.sum(d0(d0(state.ez))[:, 1:ny, :] ** 2)
                            + np.sum(d0(d1(state.ex))[:, :, 1:nz] ** 2))
            else:
                p = mu * (np.sum(d0(d2(state.hy))[:, 1:ny, :] ** 2)
                          + np.sum(d0(d0(state.hz))[:, :, 1:nz] ** 2)
                          + np.sum(d0(d1(state.hx))[1:nx - 1, :, :] ** 2))
                p += eps * (np.sum(d0(d1(state.ez))[1:nx - 1, :, :] ** 2)
                            + np.sum(d0(d2(state.ex))[:, 1:ny, :] ** 2)
                            + np.sum(d0(d0(state.ey))[:, :, 1:nz] ** 2))
            return g.dv * (e + h + q * p)

        lhs = vol_terms(half, half_level=True)
        dxhy_half = diff(half.hy, 0, g)
        plane_half = sum(
            float(np.sum(half.ez[ip, 1:ny, :] * dxhy_half[ip - 1, 1:ny, :]))
            for ip in (1, nx - 1))
        dxhz_zero = diff(s0.hz, 0, g)
        plane_zero = sum(
            float(np.sum(s0.ey[ip, :, 1:nz] * dxhz_zero[ip - 1, :, 1:nz]))
            for ip in (1, nx - 1))
        rhs = (vol_terms(s0, half_level=False)
               - g.dt * (g.dy * g.dz / dx) * plane_half
               + g.dt * (g.dy * g.dz / dx) * plane_zero)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


def test_nonunit_medium_residual_and_conservation(rng):
    from adimax import Medium
    med = Medium(eps=2.5, mu=0.4)
    g = make_grid(6, 6, 6, 0.3)
    s = random_state(g, rng)
    half = stage1(s, g, med)
    full = stage2(half, g, med)
    assert stage1_residual(s, half, g, med) <= 1e-12
    assert stage2_residual(half, full, g, med) <= 1e-12
    q0 = energy_l2(s, med, g)
    assert abs(energy_l2(full, med, g) - q0) <= 1e-12 * q0
    from adimax.norms import energy_h1
    for axis in "xyz":
        p0 = energy_h1(s, axis, med, g)
        assert abs(energy_h1(full, axis, med, g) - p0) <= 1e-12 * p0


def test_medium_validation():
    from adimax import Medium
    with pytest.raises(ValueError):
        Medium(eps=0.0)
    with pytest.raises(ValueError):
        Medium(mu=-2.0)


def test_identity_functionals_invariant_along_desk_run(medium):
    # 100 steps at Courant sqrt(3) on 20^3
    from adimax.norms import energy_h1
    g = make_grid(20, 20, 20, 0.05)
    s = enforce_pec(sample_exact(0.0, g))
    q0 = energy_l2(s, medium, g)
    p0 = energy_h1(s, "x", medium, g)
    cur = s
    for _ in range(100):
        cur = step(cur, g, medium)
    assert abs(energy_l2(cur, medium, g) - q0) / q0 <= 1e-11
    assert abs(energy_h1(cur, "x", medium, g) - p0) / p0 <= 1e-11
    assert cur.time_level == pytest.approx(100.0)

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chermnykh.errors import NegativeFactor, NonPositiveInput, ParameterOutOfRange, SingularityAtPrimary
from chermnykh.model import (
    BeltProfile,
    PhaseState,
    RadiationSource,
    belt_potential_planar,
    build_system,
    classical,
    effective_potential,
    eom_rhs,
    jacobi_constant,
    mass_reduction_factor,
    omega_grid,
    potential_gradient,
    potential_hessian,
)
from oracles import fd_gradient, fd_hessian, omega_ref

SQ3 = math.sqrt(3.0)


def ref_for(p):
    return lambda x, y: omega_ref(x, y, p.mu, p.q1, p.A2, p.Mb, p.T, p.n)


# ------------------------------------------------------------ radiation


def test_mass_reduction_no_radiation():
    assert mass_reduction_factor(0.3, 2.0, 0.0) == 1.0


def test_mass_reduction_cancellation():
    assert mass_reduction_factor(5.6e-5, 1.0, 1.0) == pytest.approx(0.0, abs=1e-15)


def test_mass_reduction_arithmetic():
    assert mass_reduction_factor(5.6e-4, 1.0, 1.0) == pytest.approx(0.9, abs=1e-15)


def test_mass_reduction_errors():
    with pytest.raises(NonPositiveInput):
        mass_reduction_factor(0.0, 1.0, 1.0)
    with pytest.raises(NegativeFactor):
        mass_reduction_factor(1e-5, 1.0, 1.0)
    assert mass_reduction_factor(1e-5, 1.0, 1.0, clamp=True) == 0.0


def test_radiation_source_from_particle():
    src = RadiationSource.from_particle(5.6e-4, 1.0, 1.0)
    assert src.q1 == pytest.approx(0.9)
    assert src.epsilon == pytest.approx(0.1)
    with pytest.raises(ParameterOutOfRange):
        RadiationSource(1.2)


# ------------------------------------------------------------ system


def test_build_classical_mu_001():
    p = build_system(0.01)
    assert p.n == 1.0
    assert p.rc == pytest.approx(math.sqrt(0.99 + 0.0001), abs=1e-15)
    assert p.rc == pytest.approx(0.995038, abs=1e-6)


def test_build_oblate_mean_motion():
    p = build_system(0.025, A2=0.01)
    assert p.n ** 2 == pytest.approx(1.015, abs=1e-14)


def test_build_belt_override():
    p = build_system(0.01, Mb=0.1, rc_override=1.0)
    assert p.n ** 2 == pytest.approx(1.2, abs=1e-14)
    assert p.n == pytest.approx(1.095445, abs=1e-6)
    assert p.rc_overridden


def test_belt_profile_T_is_sum():
    b = BeltProfile(1.0, 0.3, 0.7)
    assert b.T == 0.3 + 0.7


@pytest.mark.parametrize("kw", [dict(mu=0.0), dict(mu=0.6), dict(mu=0.1, q1=-0.1), dict(mu=0.1, A2=-1.0)])
def test_build_rejects(kw):
    mu = kw.pop("mu")
    with pytest.raises(ParameterOutOfRange):
        build_system(mu, **kw)


def test_with_mu_keeps_override():
    p = build_system(0.01, Mb=0.1, core_b=0.01, rc_override=0.9999)
    p2 = p.with_mu(0.02)
    assert p2.rc == 0.9999 and p2.mu == 0.02 and p2.n == p.n
    q = build_system(0.01, q1=0.5)
    assert q.with_mu(0.02).rc == pytest.approx(math.sqrt(0.98 * 0.5 ** (2 / 3) + 0.0004))


# ------------------------------------------------------------ belt potential


def test_belt_potential_examples():
    assert belt_potential_planar(3.0, BeltProfile(0.0, 0.0, 0.0)) == 0.0
    assert belt_potential_planar(0.0, BeltProfile(1.0, 0.5, 0.5)) == pytest.approx(-1.0)
    assert belt_potential_planar(SQ3, BeltProfile(2.0, 1.0, 0.0)) == pytest.approx(-1.0)
    with pytest.raises(SingularityAtPrimary):
        belt_potential_planar(0.0, BeltProfile(1.0, 0.0, 0.0))


# ------------------------------------------------------------ potential


@pytest.mark.parametrize("mu", [0.0001, 0.01, 0.025, 0.3])
def test_omega_at_classical_L4(mu):
    p = classical(mu)
    assert effective_potential(0.5 - mu, SQ3 / 2, p) == pytest.approx((3 - mu * (1 - mu)) / 2, abs=1e-14)


def test_omega_value_mu_0025():
    assert effective_potential(0.475, SQ3 / 2, classical(0.025)) == pytest.approx(1.4878125, abs=1e-14)


def test_belt_raises_omega():
    p0 = build_system(0.025)
    pb = build_system(0.025, Mb=0.1, core_b=0.01, rc_override=p0.rc)
    x, y = 0.475, SQ3 / 2
    # n changes with the belt, so compare with the independent term sum
    assert effective_potential(x, y, pb) == pytest.approx(omega_ref(x, y, 0.025, Mb=0.1, T=0.01, n=pb.n), rel=1e-14)
    diff = effective_potential(x, y, pb) - effective_potential(x, y, p0)
    centrifugal = 0.5 * (pb.n ** 2 - 1) * (x * x + y * y)
    assert diff - centrifugal == pytest.approx(0.1 / math.sqrt(x * x + y * y + 1e-4), rel=1e-12)


def test_singularity_guard():
    p = classical(0.1)
    with pytest.raises(SingularityAtPrimary):
        effective_potential(-0.1, 0.0, p)
    with pytest.raises(SingularityAtPrimary):
        potential_gradient(0.9, 0.0, p)
    # q1 = 0 removes the bigger primary's term entirely
    assert math.isfinite(effective_potential(-0.1, 0.0, build_system(0.1, q1=0.0)))


def test_omega_grid_matches_scalar_and_masks():
    p = build_system(0.02, q1=0.8, A2=0.01, Mb=0.05, core_b=0.02)
    xs = np.array([0.3, -0.02, 0.98])
    ys = np.array([0.4, 0.0, 0.0])
    g = omega_grid(xs, ys, p)
    assert g[0] == pytest.approx(effective_potential(0.3, 0.4, p), rel=1e-15)
    assert math.isnan(g[1]) and math.isnan(g[2])


def test_gradient_fd_classical_point():
    p = classical(0.1)
    g = potential_gradient(0.5, 0.5, p)
    fd = fd_gradient(ref_for(p), 0.5, 0.5)
    assert g == pytest.approx(fd, rel=1e-6)


def test_gradient_on_axis_y_component_zero():
    p = build_system(0.2, q1=0.7, A2=0.05, Mb=0.3, core_b=0.1)
    for x in np.linspace(-0.15, 0.75, 7):
        assert potential_gradient(x, 0.0, p)[1] == 0.0


@pytest.mark.parametrize("mu", [0.01, 0.025, 0.2])
def test_hessian_classical_L4(mu):
    hxx, hxy, hyy = potential_hessian(0.5 - mu, SQ3 / 2, classical(mu))
    assert hxx == pytest.approx(0.75, abs=1e-12)
    assert hyy == pytest.approx(2.25, abs=1e-12)
    assert hxy == pytest.approx(3 * SQ3 / 4 * (1 - 2 * mu), abs=1e-12)
    assert hxx + hyy == pytest.approx(3.0, abs=1e-12)
    fd = fd_hessian(ref_for(classical(mu)), 0.5 - mu, SQ3 / 2)
    assert (hxx, hxy, hyy) == pytest.approx(fd, rel=1e-5)


def test_hessian_mu_half_symmetry():
    assert potential_hessian(0.0, SQ3 / 2, classical(0.5))[1] == pytest.approx(0.0, abs=1e-15)


# ------------------------------------------------------------ Jacobi / EOM


def test_jacobi_at_rest():
    assert jacobi_constant(PhaseState(0.475, SQ3 / 2), classical(0.025)) == pytest.approx(2.975625, abs=1e-14)


def test_jacobi_zero_at_escape_speed():
    p = build_system(0.05, q1=0.9, A2=0.01)
    om = effective_potential(0.3, -0.7, p)
    v = math.sqrt(2 * om)
    s = PhaseState(0.3, -0.7, v * 0.6, v * 0.8)
    assert jacobi_constant(s, p) == pytest.approx(0.0, abs=1e-13)


def test_eom_examples():
    p = classical(0.025)
    l4 = (0.475, SQ3 / 2)
    acc = eom_rhs(PhaseState(*l4), p)
    assert acc[2] == pytest.approx(0.0, abs=1e-14) and acc[3] == pytest.approx(0.0, abs=1e-14)
    s = PhaseState(0.2, 0.3)
    assert eom_rhs(s, p)[2:] == pytest.approx(potential_gradient(0.2, 0.3, p), abs=0)
    moving = eom_rhs(PhaseState(*l4, 0.0, 1.0), p)
    assert moving[2] == pytest.approx(2 * p.n, abs=1e-14)


# ------------------------------------------------------------ properties

params = st.builds(
    build_system,
    mu=st.floats(1e-4, 0.5),
    q1=st.floats(0.0, 1.0),
    A2=st.floats(0.0, 0.05),
    Mb=st.floats(0.0, 0.5),
    flatness_a=st.floats(0.0, 0.1),
    core_b=st.floats(0.01, 0.1),
)
coords = st.floats(-2.0, 2.0)


def _clear(p, x, y, margin=0.05):
    """Away from both primaries and from the belt core (where the scale is T)."""
    return (
        math.hypot(x + p.mu, y) > margin
        and math.hypot(x + p.mu - 1, y) > margin
        and math.sqrt(x * x + y * y + p.T ** 2) > margin
    )


@given(params, coords, coords)
def test_matches_independent_sum(p, x, y):
    if not _clear(p, x, y):
        return
    assert effective_potential(x, y, p) == pytest.approx(ref_for(p)(x, y), rel=1e-13)


@given(params, coords, coords)
def test_mirror_symmetry(p, x, y):
    if not _clear(p, x, y):
        return
    assert effective_potential(x, y, p) == effective_potential(x, -y, p)
    gx, gy = potential_gradient(x, y, p)
    mx, my = potential_gradient(x, -y, p)
    assert gx == mx and gy == -my


@given(params, coords, coords)
def test_hessian_symmetric_and_fd(p, x, y):
    if not _clear(p, x, y, 0.1):
        return
    h = potential_hessian(x, y, p)
    fd = fd_hessian(ref_for(p), x, y)
    scale = max(1.0, max(abs(v) for v in h))
    assert all(abs(a - b) < 1e-5 * scale for a, b in zip(h, fd))


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(0.5, 2.0))
def test_momentum_involution(x, y, vx, vy, n):
    s = PhaseState(x, y, vx, vy)
    back = PhaseState.from_momenta(x, y, *s.momenta(n), n)
    assert back.vx == pytest.approx(vx, abs=1e-12) and back.vy == pytest.approx(vy, abs=1e-12)


@given(params, coords, coords, st.floats(-1, 1), st.floats(-1, 1))
def test_jacobi_mirror_invariant(p, x, y, vx, vy):
    if not _clear(p, x, y):
        return
    s = PhaseState(x, y, vx, vy)
    assert jacobi_constant(s, p) == jacobi_constant(s.mirrored(), p)


@given(st.floats(1e-4, 0.5), coords, coords)
def test_classical_reduction(mu, x, y):
    p = classical(mu)
    assert p.n == 1.0
    if not _clear(p, x, y):
        return
    r1 = math.hypot(x + mu, y)
    r2 = math.hypot(x + mu - 1, y)
    textbook = (x * x + y * y) / 2 + (1 - mu) / r1 + mu / r2
    assert effective_potential(x, y, p) == pytest.approx(textbook, rel=1e-14)

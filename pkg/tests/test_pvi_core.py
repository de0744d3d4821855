import cmath

import numpy as np
import pytest

from pvisym import symmetric as S
from pvisym.errors import (
    PoleEncountered,
    SingularConfiguration,
    SingularTime,
    WrongParameterStratum,
)
from pvisym.pvi_core import (
    OMEGA,
    ComplexPath,
    PhaseState,
    PviParams,
    hamiltonian,
    integrate,
    params_from_classical,
    pvi_residual,
    riccati_closed_form_sigma1,
    riccati_closed_form_sigma2sigma1,
    riccati_correction_sigma2sigma1,
    riccati_vector_field,
    trajectory_jet,
    vector_field,
)
from pvisym.specfun import hyp2f1

P1 = PviParams.sigma1(0.13 + 0.05j, 0.31 - 0.02j, 0.17 + 0.03j)


def _close(a, b, tol=1e-12):
    return abs(complex(a) - complex(b)) < tol


def test_affine_relation_enforced():
    with pytest.raises(ValueError):
        PviParams(0.1, 0.2, 0.3, 0.4, 0.5)


@pytest.mark.parametrize(
    "classical, expected",
    [
        ((0.5, 0, 0, 0.5), (0, 1, 0, 0, 0)),
        ((0, -0.5, 0.5, 0), (1, 0, -1, 1, 1)),
    ],
)
def test_params_from_classical(classical, expected):
    p = params_from_classical(*classical)
    assert all(_close(a, b) for a, b in zip(p.as_tuple(), expected))


def test_classical_round_trip():
    rng = np.random.default_rng(3)
    a0, a1, a3, a4 = 0.1 + 0.4 * rng.random(4) + 0.05j * rng.random(4)
    p = PviParams.solve_alpha2(a0, a1, a3, a4)
    q = params_from_classical(*p.classical())
    assert all(_close(a, b) for a, b in zip(p.as_tuple(), q.as_tuple()))


def test_vector_field_at_center():
    dy, dz = vector_field(P1, PhaseState(0.5, 0, 0.5))
    assert _close(dy, 1 - P1.alpha0)
    assert _close(dz, 4 * P1.alpha2 * (P1.alpha1 + P1.alpha2))


def test_vector_field_trivial_z():
    p = PviParams(0.3, 0, 0, 0.2, 0.5)
    for y, t in [(0.3, 0.7), (2 + 1j, -0.4j)]:
        assert vector_field(p, PhaseState(y, 0, t))[1] == 0
        assert hamiltonian(p, PhaseState(y, 0, t)) == 0


@pytest.mark.parametrize("t", [0, 1])
def test_singular_time(t):
    with pytest.raises(SingularTime):
        vector_field(P1, PhaseState(0.3, 0.1, t))
    with pytest.raises(SingularTime):
        hamiltonian(P1, PhaseState(0.3, 0.1, t))


def test_hamiltonian_vanishes_at_center():
    assert abs(hamiltonian(P1, PhaseState(0.5, 0, 0.5))) < 1e-15


def test_symplectic_consistency():
    rng = np.random.default_rng(11)
    p = PviParams.solve_alpha2(*(0.1 + 0.5 * rng.random(4) + 0.1j * rng.random(4)))
    h = 1e-6
    for _ in range(100):
        y, z, t = rng.normal(size=3) + 1j * rng.normal(size=3)
        s = PhaseState(y, z, t)
        dh_dz = (hamiltonian(p, PhaseState(y, z + h, t)) - hamiltonian(p, PhaseState(y, z - h, t))) / (2 * h)
        dh_dy = (hamiltonian(p, PhaseState(y + h, z, t)) - hamiltonian(p, PhaseState(y - h, z, t))) / (2 * h)
        dy, dz = vector_field(p, s)
        scale = max(1.0, abs(dy), abs(dz))
        assert abs(dy - dh_dz) < 1e-6 * scale
        assert abs(dz + dh_dy) < 1e-6 * scale


def test_residual_on_series_jet():
    ser = S.sigma1_series(P1, "S2-1", 12)
    s = 0.01
    y = ser.y
    jet = y(s), y.deriv()(s), y.deriv().deriv()(s)
    assert abs(pvi_residual(P1, 0.51, *jet)) < 1e-9


@pytest.mark.parametrize("y", [0, 1, 0.7])
def test_residual_singular_configuration(y):
    with pytest.raises(SingularConfiguration):
        pvi_residual(P1, 0.7, y, 1, 0)


def test_riccati_jet_sits_on_excluded_locus():
    # the Riccati solutions have y = t identically, where the scalar equation
    # is not defined; they are checked against the Hamiltonian system instead
    p = PviParams.sigma2sigma1(0, 0.23)
    s = riccati_closed_form_sigma2sigma1(p, -(OMEGA**2) + 0.1)
    with pytest.raises(SingularConfiguration):
        pvi_residual(p, s.t, s.y, 1, 0)


def test_zero_length_path():
    s0 = PhaseState(0.5, 0, 0.5)
    assert integrate(P1, s0, ComplexPath((0.5,))) == [s0]


def test_path_start_must_match():
    with pytest.raises(ValueError):
        integrate(P1, PhaseState(0.5, 0, 0.5), ComplexPath((0.4, 0.3)))


def test_path_clearance():
    with pytest.raises(ValueError):
        ComplexPath((0.5, 1.5))
    with pytest.raises(ValueError):
        ComplexPath((-0.5j, 0.0005 + 0.5j))
    ComplexPath((0.5, 0.5 + 1j, 1.5 + 1j))


def test_forward_backward():
    s0 = PhaseState(0.5, 0, 0.5)
    out = integrate(P1, s0, ComplexPath((0.5, 0.4)))
    back = integrate(P1, out[-1], ComplexPath((0.4, 0.5)))[-1]
    assert abs(back.y - s0.y) < 1e-8 and abs(back.z - s0.z) < 1e-8


def test_reverse_complex_path():
    s0 = PhaseState(0.5, 0, 0.5)
    path = ComplexPath((0.5, 0.5 + 0.2j, 0.3 + 0.2j, 0.35))
    fwd = integrate(P1, s0, path)
    back = integrate(P1, fwd[-1], path.reversed())[-1]
    assert abs(back.y - 0.5) < 1e-10 and abs(back.z) < 1e-10


def test_series_matches_integrator():
    out = integrate(P1, PhaseState(0.5, 0, 0.5), ComplexPath((0.5, 0.45, 0.3)))
    ref = S.evaluate(S.sigma1_series(P1, "S2-1", 12), 0.45)
    assert abs(out[1].y - ref.y) < 1e-7 and abs(out[1].z - ref.z) < 1e-7


def test_residual_on_trajectory():
    out = integrate(P1, PhaseState(0.5, 0, 0.5), ComplexPath((0.5, 0.45, 0.4, 0.35)))
    for s in out[1:-1]:
        assert abs(pvi_residual(P1, s.t, *trajectory_jet(P1, s))) < 1e-11


def test_pole_encountered():
    start = S.evaluate(S.sigma1_series(P1, "S2-3", 12), 0.56)
    with pytest.raises(PoleEncountered) as info:
        integrate(P1, start, ComplexPath((0.56, 0.44)))
    assert abs(info.value.t_star - 0.5) < 1e-3


def test_integrate_into_fixed_singularity():
    with pytest.raises(ValueError):
        ComplexPath((0.5, 0.0))


# Riccati solutions

R1 = PviParams.sigma1(0, 0.31 + 0.05j, 0.17 - 0.02j)
R2 = PviParams.sigma2sigma1(0, 0.23 + 0.04j)


def test_riccati_requires_alpha0_zero():
    with pytest.raises(WrongParameterStratum):
        riccati_vector_field(P1, 0.1, 0.3)
    with pytest.raises(WrongParameterStratum):
        riccati_closed_form_sigma1(P1, 0.6)
    with pytest.raises(WrongParameterStratum):
        riccati_closed_form_sigma2sigma1(R1, 0.6)


def test_riccati_vector_field_constant_term():
    t = 0.3 + 0.2j
    assert _close(riccati_vector_field(R1, 0, t), -(R1.alpha1 + R1.alpha2) * R1.alpha2 / (t * (t - 1)))
    p = PviParams.solve_alpha2(0, 0, 0.5, 0.5)
    assert riccati_vector_field(p, 0, t) == 0


def _dz(fn, p, t, h=1e-3):
    f = lambda x: fn(p, x).z
    return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h)


def _fd_residual(fn, p, t):
    dz = _dz(fn, p, t)
    s = fn(p, t)
    return abs(dz - riccati_vector_field(p, s.z, t))


def test_riccati_sigma1():
    assert abs(riccati_closed_form_sigma1(R1, 0.5).z) < 1e-15
    assert _fd_residual(riccati_closed_form_sigma1, R1, 0.52) < 1e-8
    # log-derivative of the directly summed function
    a, b, h, t = R1.alpha2 / 2, (R1.alpha1 + R1.alpha2) / 2, 1e-5, 0.6
    f = lambda x: cmath.log(hyp2f1(a, b, 0.5, 4 * (x - 0.5) ** 2))
    assert abs(riccati_closed_form_sigma1(R1, t).z - (f(t + h) - f(t - h)) / (2 * h)) < 1e-7
    # slope at the centre
    tau = 1e-4
    slope = riccati_closed_form_sigma1(R1, 0.5 + tau).z / tau
    assert abs(slope - 4 * R1.alpha2 * (R1.alpha1 + R1.alpha2)) < 1e-6


def test_riccati_sigma2sigma1():
    c = -(OMEGA**2)
    assert _close(riccati_closed_form_sigma2sigma1(R2, c).z, (2 * OMEGA + 1) / 3 * R2.alpha2, 1e-10)
    assert _fd_residual(riccati_closed_form_sigma2sigma1, R2, c + 0.05) < 1e-8


def test_riccati_correction_at_alpha1_zero():
    t = 0.3 - 0.7j
    ref = t * (1 - t) * (t + OMEGA**2) / (2 * t * (t - 1) * (t * t - t + 1))
    assert _close(riccati_correction_sigma2sigma1(0, t), ref, 1e-14)


@pytest.mark.parametrize(
    "fn, p, t",
    [(riccati_closed_form_sigma1, R1, 0.47 + 0.03j), (riccati_closed_form_sigma2sigma1, R2, -(OMEGA**2) + 0.04j)],
)
def test_riccati_solves_hamiltonian_system(fn, p, t):
    s = fn(p, t)
    dz = _dz(fn, p, t)
    dy, dz_field = vector_field(p, s)
    assert abs(dy - 1) < 1e-12
    assert abs(dz - dz_field) < 1e-7

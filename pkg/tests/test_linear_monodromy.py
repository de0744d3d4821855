import cmath
import math

import numpy as np
import pytest

from pvisym import linear_monodromy as LM
from pvisym import symmetric as S
from pvisym.errors import (
    DegenerateParameters,
    GaugeMismatch,
    PoleTooClose,
    SingularPoint,
    WrongParameterStratum,
)
from pvisym.pvi_core import OMEGA, ComplexPath, PhaseState, PviParams, integrate
from pvisym.specfun import hyp2f1

P1 = PviParams.sigma1(0.13 + 0.05j, 0.31 - 0.02j, 0.17 + 0.03j)
P2 = PviParams.sigma2sigma1(0.12 + 0.03j, 0.21 - 0.04j)
GENERIC = PviParams.solve_alpha2(0.13 + 0.05j, 0.31, 0.17 - 0.02j, 0.22)
STATE = PhaseState(0.3 + 0.2j, 0.4 - 0.1j, 0.6 + 0.1j)


def _e(x):
    return cmath.exp(2j * math.pi * x)


def _cauchy(f, x, k, r=1e-2, m=32):
    """k-th derivative of an analytic f at x from m samples on a circle."""
    nodes = r * np.exp(2j * np.pi * np.arange(m) / m)
    vals = np.array([f(x + u) for u in nodes])
    return math.factorial(k) * np.mean(vals * nodes ** (-k))


def _residue(f, c, r=1e-3):
    return _cauchy(lambda x: (x - c) * f(x), c, 0, r)


@pytest.mark.parametrize(
    "point, expected",
    [(0, 1 - GENERIC.alpha4), (1, 1 - GENERIC.alpha3), (STATE.t, 1 - GENERIC.alpha0), (STATE.y, -1)],
)
def test_p_residues(point, expected):
    p = lambda x: LM.coefficients(GENERIC, STATE, x)[0]
    assert abs(_residue(p, point) - expected) < 1e-10


def test_exponents_at_infinity():
    # psi ~ x**-rho with rho(rho + 1) - p_inf rho + q_inf = 0, where
    # p ~ p_inf / x and q ~ q_inf / x**2
    x = 1e7
    p, q = LM.coefficients(GENERIC, STATE, x)
    s, prod = x * p - 1, x * x * q
    a1, a2 = GENERIC.alpha1, GENERIC.alpha2
    assert abs(s - (2 * a2 + a1)) < 1e-5
    assert abs(prod - a2 * (a1 + a2)) < 1e-5


def test_coefficients_singular_point():
    for x in (0, 1, STATE.t, STATE.y):
        with pytest.raises(SingularPoint):
            LM.coefficients(GENERIC, STATE, x)


def test_deformation_trivial():
    s = PhaseState(0.6, 0.3, 0.6)
    assert LM.deformation_coefficients(GENERIC, s, 0.3 + 0.1j)[0] == 0
    assert LM.deformation_coefficients(GENERIC, STATE, 0)[0] == 0
    with pytest.raises(SingularPoint):
        LM.deformation_coefficients(GENERIC, STATE, STATE.y)


def _flow_state(s, h):
    if h == 0:
        return s
    return integrate(GENERIC, s, ComplexPath((s.t, s.t + h), min_clearance=1e-6))[-1]


@pytest.mark.parametrize("x", [0.2 - 0.3j, -0.5 + 0.4j, 1.7 + 0.2j])
def test_zero_curvature(x):
    s = STATE
    P = lambda u: LM.coefficients(GENERIC, s, u)[0]
    Q = lambda u: LM.coefficients(GENERIC, s, u)[1]
    A = lambda u: LM.deformation_coefficients(GENERIC, s, u)[0]
    B = lambda u: LM.deformation_coefficients(GENERIC, s, u)[1]
    p, q, a, b = P(x), Q(x), A(x), B(x)
    p1, q1 = _cauchy(P, x, 1), _cauchy(Q, x, 1)
    a1, a2 = _cauchy(A, x, 1), _cauchy(A, x, 2)
    b1, b2 = _cauchy(B, x, 1), _cauchy(B, x, 2)
    # L(a psi' + b psi) reduced modulo psi'' = -p psi' - q psi
    c1 = a2 + 2 * a1 * (-p) + a * (-p1 + p * p - q) + 2 * b1 - b * p + p * a1 + p * a * (-p) + p * b + q * a
    c0 = 2 * a1 * (-q) + a * (p * q - q1) + b2 - b * q + p * a * (-q) + p * b1 + q * b
    h = 1e-3
    states = [_flow_state(s, k * h) for k in (-2, -1, 1, 2)]
    d = lambda f: (f(states[0]) - 8 * f(states[1]) + 8 * f(states[2]) - f(states[3])) / (12 * h)
    pt = d(lambda st: LM.coefficients(GENERIC, st, x)[0])
    qt = d(lambda st: LM.coefficients(GENERIC, st, x)[1])
    assert abs(pt + c1) < 1e-6
    assert abs(qt + c0) < 1e-6


# reductions


def test_heun_sigma1_structure():
    ode = LM.heun_sigma1(P1)
    a0, a1, a2, a3, _ = P1.as_tuple()
    p = lambda x: ode.coefficients(x)[0]
    for c, ref in [(0, 1 - a3), (1, 1 - a3), (0.5, -a0)]:
        assert abs(_residue(p, c) - ref) < 1e-10
    x = 0.3 + 0.2j
    assert abs(ode.coefficients(x)[1] - (a1 + a2) * a2 / (x * (x - 1))) < 1e-14
    with pytest.raises(WrongParameterStratum):
        LM.heun_sigma1(GENERIC)


def test_heun_sigma1_limit():
    t = 0.5 + 1e-6
    s = S.evaluate(S.sigma1_series(P1, "S2-1", 12), t)
    x = 0.3 + 0.2j
    lim = LM.heun_sigma1(P1).coefficients(x)
    sub = LM.coefficients(P1, s, x)
    assert abs(lim[0] - sub[0]) < 1e-4 and abs(lim[1] - sub[1]) < 1e-4


def test_heun_sigma2sigma1_structure():
    ode = LM.heun_sigma2sigma1(P2)
    p = lambda x: ode.coefficients(x)[0]
    assert abs(_residue(p, -(OMEGA**2)) + P2.alpha0) < 1e-10
    with pytest.raises(WrongParameterStratum):
        LM.heun_sigma2sigma1(P1)


def test_heun_sigma2sigma1_limit():
    c = -(OMEGA**2)
    t = c + 1e-6
    s = S.evaluate(S.sigma2sigma1_series(P2, "S3-2", 12), t)
    x = 0.3 + 0.2j
    lim = LM.heun_sigma2sigma1(P2).coefficients(x)
    sub = LM.coefficients(P2, s, x)
    assert abs(lim[0] - sub[0]) < 1e-4 and abs(lim[1] - sub[1]) < 1e-4


def test_reduction_sigma1_values():
    red = LM.hypergeometric_reduction_sigma1(PviParams(0.1, 0.2, 0.2, 0.15, 0.15))
    assert np.allclose((red.a, red.b, red.c), (0.1, 0.2, 0.85))


def test_reduction_sigma2sigma1_values():
    p = PviParams.sigma2sigma1(0.1, (1 - 0.1 - 0.4) / 3)
    assert abs(p.alpha2 - 0.2) < 1e-15
    red = LM.hypergeometric_reduction_sigma2sigma1(p)
    assert np.allclose((red.a, red.b, red.c), (0.2 / 3, 1.3 / 3, 2 / 3))
    assert abs(red.twist + 0.2) < 1e-15


def test_xi_correspondence():
    w = OMEGA
    assert abs(LM.xi_sigma2sigma1(0) - 1) < 1e-15
    assert abs(LM.xi_sigma2sigma1(1) - w * w) < 1e-15
    assert abs(LM.xi_sigma2sigma1(1e12) - w) < 1e-11
    assert abs(LM.x_from_xi(LM.xi_sigma2sigma1(0.3 + 0.4j)) - (0.3 + 0.4j)) < 1e-14
    with pytest.raises(ZeroDivisionError):
        LM.xi_sigma2sigma1(-(w**2))


def _ode_residual(ode, f, x):
    return ode.residual(f(x), _cauchy(f, x, 1, 1e-3), _cauchy(f, x, 2, 1e-3), x)


XS = [0.1 + 0.05j * k for k in range(1, 11)] + [0.35 - 0.03j * k for k in range(1, 11)]


def test_pullback_solutions_sigma1():
    ode = LM.heun_sigma1(P1)
    red = LM.hypergeometric_reduction_sigma1(P1)
    for x in XS:
        f1 = lambda u: red.solutions(u)[0]
        f2 = lambda u: red.solutions(u)[1]
        assert abs(_ode_residual(ode, f1, x)) < 1e-9
        assert abs(_ode_residual(ode, f2, x)) < 1e-9


def test_second_solution_sigma1_displayed_form():
    ode = LM.heun_sigma1(P1)
    a1, a2, a3 = P1.alpha1, P1.alpha2, P1.alpha3
    f = lambda x: (4 * x * (1 - x)) ** a3 * hyp2f1(a2 / 2 + a3, (a1 + a2) / 2 + a3, 1 + a3, 4 * x * (1 - x))
    for x in XS[:5]:
        assert abs(_ode_residual(ode, f, x)) < 1e-9


def test_pullback_solutions_sigma2sigma1():
    ode = LM.heun_sigma2sigma1(P2)
    red = LM.hypergeometric_reduction_sigma2sigma1(P2)
    for x in XS:
        f = lambda u: red.solutions(u)[0]
        assert abs(_ode_residual(ode, f, x)) < 1e-9


# exact monodromy


def test_exact_sigma1_traces():
    rep = LM.exact_monodromy_sigma1(P1)
    a0, a1, a2, a3, _ = P1.as_tuple()
    m = rep.matrices
    assert abs(np.trace(m["0"]) - (1 + _e(a3))) < 1e-12
    assert abs(np.trace(m["inf"]) - (_e(a2) + _e(a1 + a2))) < 1e-12
    assert rep.ring_defect() < 1e-12


def test_exact_sigma1_near_resonance():
    p = PviParams.sigma1(0.13, 0.31, 1e-7)
    m0 = LM.exact_monodromy_sigma1(p).matrices["0"]
    assert abs(np.trace(m0) - 2) < 1e-5
    assert abs(np.linalg.det(m0) - 1) < 1e-5


@pytest.mark.parametrize(
    "fn, p",
    [
        (LM.exact_monodromy_sigma1, PviParams.sigma1(0.13, 0.31, 0)),
        (LM.exact_monodromy_sigma1, PviParams.sigma1(0.13, 0, 0.2)),
        (LM.exact_monodromy_sigma2sigma1, PviParams.sigma2sigma1(0.13, 0)),
        (LM.exact_monodromy_sigma2sigma1, PviParams.sigma2sigma1(2, 0.2)),
    ],
)
def test_exact_resonant_rejected(fn, p):
    with pytest.raises(DegenerateParameters):
        fn(p)


def test_exact_sigma2sigma1_traces():
    rep = LM.exact_monodromy_sigma2sigma1(P2)
    a0 = P2.alpha0
    assert abs(np.trace(rep.matrices["t"]) - (1 + _e(1 + a0))) < 1e-12
    assert rep.ring_defect() < 1e-12
    # the 1/3 exponent at eta = 0 gives the eigenvalue exp(2 pi i / 3)
    red = LM.hypergeometric_reduction_sigma2sigma1(P2)
    rep = LM.numerical_monodromy(
        LM.hypergeometric_ode(red.a, red.b, red.c), LM.standard_loops({"0": 0j, "1": 1 + 0j}, base=-0.3)
    )
    eig = np.linalg.eigvals(rep.matrices["0"])
    assert min(abs(eig - _e(1 / 3))) < 1e-9 and min(abs(eig - 1)) < 1e-9


def test_printed_sigma1_disagrees_only_in_flagged_entries():
    flags = [d for d in LM.sigma1_discrepancies(P1) if d["flagged"]]
    assert sorted((d["matrix"], d["entry"]) for d in flags) == [("G0", (1, 1)), ("Gh", (1, 0))]


def test_hypergeometric_local_monodromy():
    a, b, c = 0.21 + 0.05j, -0.13, 0.77
    ode = LM.hypergeometric_ode(a, b, c)
    ls = LM.standard_loops({"0": 0j, "1": 1 + 0j}, base=-0.3)
    rep = LM.numerical_monodromy(ode, ls)
    assert abs(np.trace(rep.matrices["0"]) - (1 + _e(1 - c))) < 1e-9
    assert abs(np.trace(rep.matrices["inf"]) - (_e(a) + _e(b))) < 1e-9
    assert rep.ring_defect() < 1e-9


def test_pole_too_close():
    ode = LM.hypergeometric_ode(0.2, 0.3, 0.7)
    lp = LM.lollipop(-0.3, [], 0, 1e-4, "tiny")
    with pytest.raises(PoleTooClose):
        LM.numerical_monodromy(ode, {"0": lp})


def test_sl2_normalize():
    rep = LM.sl2_normalize(P1, LM.exact_monodromy_sigma1(P1))
    for m in rep.matrices.values():
        assert abs(np.linalg.det(m) - 1) < 1e-10
    assert rep.ring_defect() < 1e-10
    a0, a3 = P1.alpha0, P1.alpha3
    assert abs(np.trace(rep.matrices["0"]) - 2 * cmath.cos(math.pi * a3)) < 1e-12
    assert abs(np.trace(rep.matrices["t"]) - 2 * cmath.cos(math.pi * (a0 + 1))) < 1e-12
    with pytest.raises(GaugeMismatch):
        LM.sl2_normalize(P1, rep)


# numerical transport


@pytest.fixture(scope="module")
def num_sigma1():
    return LM.numerical_monodromy_sigma1(P1)


@pytest.fixture(scope="module")
def num_sigma2sigma1():
    return LM.numerical_monodromy_sigma2sigma1(P2)


def test_numeric_vs_exact_sigma1(num_sigma1):
    assert LM.compare_reps(num_sigma1, LM.exact_monodromy_sigma1(P1)) < 1e-7
    assert num_sigma1.ring_defect() < 1e-8


def test_numeric_vs_exact_sigma2sigma1(num_sigma2sigma1):
    assert LM.compare_reps(num_sigma2sigma1, LM.exact_monodromy_sigma2sigma1(P2)) < 1e-7
    assert num_sigma2sigma1.ring_defect() < 1e-8


def test_printed_sigma1_fails_against_transport(num_sigma1):
    assert LM.compare_reps(num_sigma1, LM.exact_monodromy_sigma1(P1, variant="printed")) > 1e-3


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(5))
def test_numeric_vs_exact_random(seed):
    rng = np.random.default_rng(100 + seed)
    re = rng.uniform(0.05, 0.35, 3) * rng.choice([-1, 1], 3)
    im = rng.uniform(-0.05, 0.05, 3)
    a = re + 1j * im
    p1 = PviParams.sigma1(*a)
    assert LM.compare_reps(LM.numerical_monodromy_sigma1(p1), LM.exact_monodromy_sigma1(p1)) < 1e-7
    p2 = PviParams.sigma2sigma1(a[0], a[1])
    assert LM.compare_reps(LM.numerical_monodromy_sigma2sigma1(p2), LM.exact_monodromy_sigma2sigma1(p2)) < 1e-7


@pytest.mark.slow
def test_covering_relations():
    assert max(LM.sigma1_covering_defects(P1).values()) < 1e-7
    assert max(LM.sigma2sigma1_covering_defects(P2).values()) < 1e-7


def test_apparent_singularity_trivial():
    ode = LM.linear_ode(GENERIC, STATE)
    lp = LM.lollipop(STATE.y + 0.2, [], STATE.y, 0.05, "apparent")
    m = LM.transport(ode, lp.polyline)
    assert np.max(np.abs(m - np.eye(2))) < 1e-7


@pytest.mark.slow
def test_basepoint_independence():
    s = PhaseState(0.5, 0, 0.5)
    r1 = LM.five_point_monodromy(P1, s, base=-0.25)
    r2 = LM.five_point_monodromy(P1, s, base=-0.4)
    assert np.max(np.abs(LM.trace_vector(r1) - LM.trace_vector(r2))) < 1e-8


@pytest.mark.slow
def test_isomonodromy():
    assert LM.isomonodromy_check(P1).drift < 1e-6

"""Acceptance criteria, one test each.

Every test prints a single ``criterion N: PASS|FAIL`` line (shown even when
output capture is on) before asserting.
"""
import numpy as np
import pytest

from pvisym import backlund, fricke, symmetric
from pvisym import linear_monodromy as lm
from pvisym.cli import Check, random_params, riccati_checks, suite_specfun
from pvisym.pvi_core import PhaseState, PviParams

SEED = 2024


def report(capsys, n: int, title: str, checks: list[Check]):
    failed = [c for c in checks if not c.passed]
    worst = max(checks, key=lambda c: c.value / c.threshold if c.kind == "<" else c.threshold / max(c.value, 1e-300))
    status = "PASS" if not failed else "FAIL"
    with capsys.disabled():
        print(f"\ncriterion {n}: {status} {title} ({len(checks)} checks; tightest {worst.name} = {worst.value:.3g} {worst.kind} {worst.threshold:g})")
    assert not failed, "; ".join(f"{c.name} = {c.value:.3g}" for c in failed)


def test_criterion_1_fricke_residuals(capsys):
    rng = np.random.default_rng(SEED)
    checks = []
    for fam, branches, point, residual in (
        ("sigma1", fricke.SIGMA1_TRACE_BRANCHES, fricke.sigma1_trace_point, fricke.fricke_residual),
        ("sigma2sigma1", fricke.SIGMA2SIGMA1_TRACE_BRANCHES, fricke.sigma2sigma1_trace_point, fricke.fricke_residual_alt),
    ):
        draws = [random_params(rng, fam) for _ in range(50)]
        for b in branches:
            worst = max(abs(residual(point(p, b))) for p in draws)
            checks.append(Check("fricke", f"{b} residual", worst, 1e-10))
    report(capsys, 1, "closed-form trace points lie on the cubic surface", checks)


def test_criterion_2_exact_vs_numeric_monodromy(capsys):
    rng = np.random.default_rng(SEED)
    checks = []
    for fam, exact, numeric in (
        ("sigma1", lm.exact_monodromy_sigma1, lm.numerical_monodromy_sigma1),
        ("sigma2sigma1", lm.exact_monodromy_sigma2sigma1, lm.numerical_monodromy_sigma2sigma1),
    ):
        for i in range(5):
            p = random_params(rng, fam)
            ex = lm.sl2_normalize(p, exact(p))
            nu = lm.sl2_normalize(p, numeric(p))
            checks.append(Check("monodromy", f"{fam}[{i}] traces", lm.compare_reps(ex, nu), 1e-7))
            checks.append(Check("monodromy", f"{fam}[{i}] ring", nu.ring_defect(), 1e-8))
            if fam == "sigma1":
                flagged = {f"{d['matrix']}{d['entry']}" for d in lm.sigma1_discrepancies(p) if d["flagged"]}
                expected = {"G0(1, 1)", "Gh(1, 0)"}
                checks.append(Check("monodromy", f"{fam}[{i}] isolated entries {sorted(flagged)}",
                                    0.0 if flagged == expected else 1.0, 0.5))
    report(capsys, 2, "exact monodromy matches numerical transport", checks)


def test_criterion_3_sigma1_discriminant(capsys):
    rng = np.random.default_rng(SEED)
    worst_disc = worst_fac = 0.0
    for _ in range(50):
        p = random_params(rng, "sigma1")
        a = (p.alpha0, p.alpha1, p.alpha3)
        rep = fricke.discriminant_check(*fricke.sigma1_abc(*a), a)
        worst_disc = max(worst_disc, rep.max_discriminant)
        worst_fac = max(worst_fac, rep.coefficient_mismatch)
    checks = [
        Check("fricke", "discriminant at the four X values", worst_disc, 1e-10),
        Check("fricke", "monic factorization mismatch", worst_fac, 1e-9),
    ]
    report(capsys, 3, "sigma1 discriminant factors through the branch X values", checks)


def test_criterion_4_sigma2sigma1_cubic(capsys):
    rng = np.random.default_rng(SEED)
    worst_fac = worst_sum = 0.0
    for _ in range(50):
        p = random_params(rng, "sigma2sigma1")
        rep = fricke.cubic_check(*fricke.sigma2sigma1_ab(p.alpha0, p.alpha1), (p.alpha0, p.alpha1))
        worst_fac = max(worst_fac, rep.coefficient_mismatch)
        worst_sum = max(worst_sum, abs(rep.root_sum + 3))
    checks = [
        Check("fricke", "cubic coefficient mismatch", worst_fac, 1e-9),
        Check("fricke", "|X1+X2+X3+3|", worst_sum, 1e-9),
    ]
    report(capsys, 4, "sigma2sigma1 cubic factors through the branch X values", checks)


def test_criterion_5_series_correctness(capsys):
    rng = np.random.default_rng(SEED)
    p1, p2 = random_params(rng, "sigma1"), random_params(rng, "sigma2sigma1")
    N = 12
    checks = []
    for b in symmetric.ALL_BRANCHES:
        p = p1 if b in symmetric.SIGMA1_BRANCHES else p2
        ser = symmetric.symmetric_series(p, b, N)
        fine = symmetric.refine(ser)
        e = symmetric.decay_exponent(lambda r: symmetric.system_residual(fine, r), 0.02, 0.04)
        checks.append(Check("series", f"{b} decay exponent", e, N - 2, ">="))
        checks.append(Check("series", f"{b} symmetry residual", symmetric.symmetry_residual(ser, p, 0.05), 1e-10))
    report(capsys, 5, "series residual decay and symmetry equation", checks)


def test_criterion_6_parity(capsys):
    rng = np.random.default_rng(SEED)
    p1, p2 = random_params(rng, "sigma1"), random_params(rng, "sigma2sigma1")
    checks = []
    for b in symmetric.ALL_BRANCHES:
        p = p1 if b in symmetric.SIGMA1_BRANCHES else p2
        fine = symmetric.refine(symmetric.symmetric_series(p, b, 12))
        checks.append(Check("series", f"{b} excluded coefficients", symmetric.parity_defect(fine), 1e-12))
    report(capsys, 6, "parity and mod-3 grading of frame coefficients", checks)


def test_criterion_7_backlund(capsys):
    rng = np.random.default_rng(SEED)
    worst_inv = worst_aff = 0.0
    for _ in range(100):
        v = rng.normal(size=4) * 0.4 + 1j * rng.normal(size=4) * 0.2
        p = PviParams.solve_alpha2(*v)
        s = PhaseState(*(rng.normal(size=3) * 0.5 + 1j * rng.normal(size=3) * 0.5))
        scale = max(1.0, abs(s.y), abs(s.z), abs(s.t))
        for g in ("s0", "s1", "s2", "s3", "s4", "sigma1", "sigma2"):
            q, s2 = backlund.apply_word([g, g], p, s)
            d = max(abs(s2.y - s.y), abs(s2.z - s.z), abs(s2.t - s.t),
                    float(np.max(np.abs(np.subtract(q.as_tuple(), p.as_tuple())))))
            worst_inv = max(worst_inv, d / scale)
        for g in backlund.GENERATORS:
            worst_aff = max(worst_aff, abs(backlund.apply_to_params(g, p).affine_defect()))
    checks = [
        Check("backlund", "involutions", worst_inv, 1e-12),
        Check("backlund", "affine relation", worst_aff, 1e-12),
    ]
    for kind in ("sigma1", "sigma2sigma1"):
        p = random_params(rng, kind)
        for g, arrows in symmetric.INTERCHANGE[kind].items():
            for src in arrows:
                tgt, d = symmetric.interchange_defect(g, p, src)
                checks.append(Check("backlund", f"{g}: {src} -> {tgt}", d, 1e-10))
    report(capsys, 7, "Backlund involutions, affine relation, branch interchange", checks)


@pytest.mark.slow
def test_criterion_8_isomonodromy(capsys):
    p = random_params(np.random.default_rng(SEED), "sigma1")
    rep = lm.isomonodromy_check(p, t_end=0.35)
    report(capsys, 8, "trace coordinates constant along S2-1 from t=1/2 to 0.35",
           [Check("isomonodromy", "trace drift", rep.drift, 1e-6)])


def test_criterion_9_riccati(capsys):
    report(capsys, 9, "Riccati solutions: equations and series agreement",
           riccati_checks(np.random.default_rng(SEED), order=10))


def test_criterion_10_special_functions(capsys):
    report(capsys, 10, "Gamma identities and 2F1 equation residual", suite_specfun(SEED))

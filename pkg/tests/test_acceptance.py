"""Acceptance gate: one check per criterion at its stated tolerance.

Each test records a PASS/FAIL line in RESULTS; conftest prints them at the
end of the run.
"""

import time

import numpy as np
import pytest

from gospace.flow import closure_dim_estimate, orbit_trajectory, planarity_residual
from gospace.goverify import Verdict, cross_validate, go_check, natural_reductivity_residual
from gospace.homspace import (
    CATALOG,
    SUPPORTED_ROWS,
    FiberOperator,
    Lambda,
    Normal,
    build_space,
    hamiltonian,
)
from gospace.liealg import build_algebra, invariance_residual, jacobi_residual
from gospace.poisson import (
    build_family,
    centrality_test,
    commutativity_residual,
    completeness_check,
    lie_poisson_bracket,
)
from gospace.structure import complexity_on_submodule, generic_dims

RESULTS = {}
LAMBDAS = (0.3, 0.5, 2.0, 5.0)
AUX = ("sphere", "so-un", "so-group")


def record(key, ok, detail):
    RESULTS[key] = (bool(ok), detail)
    print(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def test_c01_sp_pair():
    out = []
    ok = True
    for n in (1, 2):
        t0 = time.perf_counter()
        rep = generic_dims(build_space("row9", {"n": n}))
        dt = time.perf_counter() - t0
        got = (rep.ddim, rep.dind, rep.complexity)
        ok &= got == (4, 2, 1) and dt < 10 and rep.consistent
        out.append(f"n={n} {got} {dt * 1e3:.0f} ms")
    record("1", ok, "; ".join(out))


def test_c02_su_pair():
    out, ok = [], True
    for n in (2, 3):
        rep = generic_dims(build_space("row5", {"n": n}))
        got = (rep.ddim, rep.dind, rep.complexity)
        ok &= got == (2, 2, 0)
        out.append(f"n={n} {got}")
    record("2", ok, "; ".join(out))


def test_c03_sp_u1_pair():
    out, ok = [], True
    for n in (1, 2):
        c = generic_dims(build_space("row8", {"n": n})).complexity
        ok &= c == 0
        out.append(f"n={n} c={c}")
    record("3", ok, "; ".join(out))


def test_c04_so_un():
    out, ok = [], True
    for n in (2, 3):
        sp = build_space("so-un", {"n": n})
        m = complexity_on_submodule(sp, "m")
        v = complexity_on_submodule(sp, "v")
        ok &= (m.ddim, m.dind, m.complexity) == (n, n, 0) and v.complexity == 1
        out.append(f"n={n} m:{(m.ddim, m.dind, m.complexity)} v:c={v.complexity}")
    record("4", ok, "; ".join(out))


def test_c05_table1():
    t0 = time.perf_counter()
    ok, worst, bad = True, 0.0, []
    for cid in SUPPORTED_ROWS:
        sp = build_space(cid)
        verdicts = set()
        for lam in LAMBDAS:
            cert = go_check(sp, Lambda(lam))
            verdicts.add(cert.verdict)
            worst = max(worst, cert.residuals.max())
            if cert.verdict is not Verdict.GO or cert.residuals.max() >= 1e-8:
                bad.append(f"{cid}@{lam}")
        if len(verdicts) != 1:
            bad.append(f"{cid}: verdicts differ across lambda")
    dt = time.perf_counter() - t0
    ok = not bad and dt < 300
    record("5", ok, f"{len(SUPPORTED_ROWS)} rows x {len(LAMBDAS)} lambdas, max residual {worst:.2e}, "
                    f"{dt:.2f}s" + (f", failing {bad}" if bad else ""))


def test_c06_three_criteria_agree():
    total, agree, indet = 0, 0, 0
    for cid in SUPPORTED_ROWS:
        sp = build_space(cid)
        for lam in LAMBDAS:
            cv = cross_validate(sp, Lambda(lam), n_samples=8)
            total += 1
            agree += cv.agree
            indet += Verdict.INDETERMINATE in cv.verdicts.values()
            assert len(cv.geodesic) == len(cv.centrality) == len(cv.gordon) == 8
    record("6", agree == total and indet == 0,
           f"{agree}/{total} (row, lambda) pairs agree across 3 criteria, {indet} indeterminate")


def test_c07_normal_baseline():
    bad, worst_F, worst_nr = [], 0.0, 0.0
    for cid in list(SUPPORTED_ROWS) + list(AUX):
        sp = build_space(cid)
        cert = go_check(sp, Normal())
        F = max(np.linalg.norm(s.solver_output) for s in cert.samples)
        nr = natural_reductivity_residual(sp, Normal())
        worst_F, worst_nr = max(worst_F, F), max(worst_nr, nr)
        if cert.verdict is not Verdict.GO or cert.residuals.max() >= 1e-12 or F >= 1e-12 or nr >= 1e-9:
            bad.append(cid)
    record("7", not bad, f"{len(SUPPORTED_ROWS) + len(AUX)} entries, max |F| {worst_F:.1e}, "
                         f"max NR residual {worst_nr:.1e}" + (f", failing {bad}" if bad else ""))


def test_c08_negative_control():
    from test_goverify import dense_geodesic

    sp = build_space("row9", {"n": 1})
    metric = FiberOperator.diag([1, 2, 3], 1.0)
    rng = np.random.default_rng(1)
    floor = min(dense_geodesic(sp, metric, rng.normal(size=sp.dim_v)) for _ in range(1000))
    cert = go_check(sp, metric)
    above = int(np.sum(cert.residuals > 1e-3))
    central = centrality_test(hamiltonian(sp, metric).h_A, sp)
    ok = cert.verdict is Verdict.NOT_GO and above >= 7 and not central and floor > 1e-3
    record("8", ok, f"verdict {cert.verdict.value}, {above}/8 samples > 1e-3, "
                    f"dense-scan floor {floor:.2e}, h_A central: {central}")


def test_c09_poisson():
    rng = np.random.default_rng(9)
    A = np.diag([1.0, 2.0, 3.0])
    families = [
        (build_space("row9"), ["h0", "delta", ("q_A", A), ("traces", 2)]),
        (build_space("row5"), ["h0", ("m_traces_l_linear", 2)]),
        (build_space("so-un"), ["h0", ("m_traces_l_linear", 2)]),
        (build_space("row10"), ["h0", ("m_traces_l_linear", 2)]),
        (build_space("row11"), ["h0", ("m_traces_l_linear", 2)]),
        (build_space("row1"), ["h0", "delta", ("traces", 2)]),
    ]
    h0_worst, fd_worst = 0.0, 0.0
    for sp, recipe in families:
        fam = build_family(sp, recipe)
        h0 = fam.members[0]
        for _ in range(8):
            x = sp.random_vector(rng)
            for f in fam.members:
                h0_worst = max(h0_worst, abs(lie_poisson_bracket(h0, f, x)))
                fd_worst = max(fd_worst, f.gradient_error(x))
    so_un = build_space("so-un", {"n": 2})
    traces = build_family(so_un, [("traces", 2)], domain="m")
    pp = commutativity_residual(traces).residual
    for f in traces.members:
        for _ in range(4):
            fd_worst = max(fd_worst, f.gradient_error(so_un.random_vector(rng, "m")))
    row9 = build_space("row9", {"n": 1})
    rep = completeness_check(row9, build_family(row9, ["h0", "delta", ("q_A", A)]))
    ok = (h0_worst < 1e-10 and pp < 1e-8 and rep.commutativity < 1e-8 and rep.complete
          and rep.ddim_B == 3 == rep.target and fd_worst < 1e-6)
    record("9", ok, f"|{{h0,f}}| {h0_worst:.1e}, |{{p_i,p_j}}| {pp:.1e}, row9 family "
                    f"{rep.commutativity:.1e} ddim_B={rep.ddim_B} target={rep.target}, "
                    f"FD error {fd_worst:.1e}")


def test_c10_structure_identities():
    bad = []
    for cid in list(SUPPORTED_ROWS) + list(AUX):
        sp = build_space(cid)
        for sub in ("v", "m") if sp.dim_l and sp.dim_m else ("v",):
            rep = generic_dims(sp, 8, seed=0, submodule=sub)
            if not rep.consistent or rep.dim_jx != rep.ddim or rep.dim_ker_lambda != rep.dind:
                bad.append(f"{cid}/{sub}")
    record("10", not bad, f"{len(SUPPORTED_ROWS) + len(AUX)} entries" + (f", failing {bad}" if bad else ""))


# -- criterion 11, split into its four clauses

@pytest.fixture(scope="module")
def s7_runs():
    sp = build_space("row9", {"n": 1})
    rng = np.random.default_rng(11)
    runs = []
    for _ in range(50):
        X = sp.random_vector(rng)
        traj = orbit_trajectory(sp, Lambda(2.0), X / np.linalg.norm(X), t_max=200.0, n_steps=4096)
        runs.append((traj.norm_error(), closure_dim_estimate(sp, traj.Z).dim, planarity_residual(traj)))
    return runs


def test_c11a_great_circle():
    sp = build_space("sphere", {"n": 4})
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(5):
        X = sp.random_vector(rng)
        worst = max(worst, planarity_residual(orbit_trajectory(sp, Normal(), X / np.linalg.norm(X))))
    record("11a", worst < 1e-8, f"(SO(5), SO(4)) great-circle planarity {worst:.1e}")


def test_c11b_unit_norm(s7_runs):
    worst = max(r[0] for r in s7_runs)
    record("11b", worst < 1e-9, f"S^7 lambda=2 unit-norm error {worst:.1e} over t in [0, 200]")


def test_c11c_closure_dim(s7_runs):
    dims = np.array([r[1] for r in s7_runs])
    frac = float(np.mean(dims == 2))
    record("11c", frac >= 0.9, f"S^7 lambda=2 closure_dim = 2 for {frac:.0%} of 50 X "
                               f"(counts by dim {dict(zip(*map(np.ndarray.tolist, np.unique(dims, return_counts=True))))})")


def test_c11d_planarity(s7_runs):
    pl = np.array([r[2] for r in s7_runs])
    record("11d", pl.min() > 1e-2, f"S^7 lambda=2 planarity residual min {pl.min():.1e}, max {pl.max():.1e}")


def test_c12_algebra_axioms():
    rng = np.random.default_rng(12)
    worst_j, worst_i, count = 0.0, 0.0, 0
    algebras = ([("so", n) for n in range(2, 31)] + [("su", n) for n in range(2, 16)]
                + [("u", n) for n in range(1, 16)] + [("sp", n) for n in range(1, 8)])
    for fam, n in algebras:
        g = build_algebra(fam, n)
        for _ in range(3):
            x, y, z = g.random(rng, 3)
            worst_j = max(worst_j, jacobi_residual(g, x, y, z))
            worst_i = max(worst_i, invariance_residual(g, x, y, z))
        count += 1
    for cid in list(SUPPORTED_ROWS) + list(AUX):
        assert build_space(cid).g.ambient_dim <= 30
    record("12", worst_j < 1e-10 and worst_i < 1e-10,
           f"{count} algebras up to ambient 30, Jacobi {worst_j:.1e}, invariance {worst_i:.1e}")

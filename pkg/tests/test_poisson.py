import itertools

import numpy as np
import pytest

from gospace.homspace import FiberOperator, Lambda, Normal, build_space, hamiltonian
from gospace.poisson import (
    NonCommutingFamilyError,
    build_family,
    centrality_test,
    commutativity_residual,
    completeness_check,
    family_rank,
    lie_poisson_bracket,
    trace_power,
)

A = np.diag([1.0, 2.0, 3.0])


def levi_civita():
    eps = np.zeros((3, 3, 3))
    for p in itertools.permutations(range(3)):
        eps[p] = np.linalg.det(np.eye(3)[list(p)])
    return eps


def test_delta_qA_so3_expansion():
    # -<x, x cross Ax> as a cubic in x: every symmetrized coefficient vanishes
    eps = levi_civita()
    for B in (A, np.array([[1.0, 0.4, 0.0], [0.4, 2.0, -0.3], [0.0, -0.3, 0.5]])):
        T = -np.einsum("ijm,mk->ijk", eps, B)
        sym = sum(np.transpose(T, p) for p in itertools.permutations(range(3)))
        assert np.max(np.abs(sym)) == 0.0


def test_row9_l_is_so3():
    sp = build_space("row9")
    C = sp.structure_constants[sp.l, sp.l][..., sp.l]
    c = C[0, 1, 2]
    assert abs(c) > 0
    np.testing.assert_allclose(C, c * levi_civita(), atol=1e-14)


def test_delta_qA_bracket_row9(rng):
    sp = build_space("row9")
    fam = build_family(sp, ["delta", ("q_A", A)])
    for _ in range(10):
        x = sp.random_vector(rng)
        assert abs(lie_poisson_bracket(*fam.members, x)) < 1e-12


def test_antisymmetry(rng):
    sp = build_space("row5")
    fam = build_family(sp, [("traces", 2), "delta"])
    x = sp.random_vector(rng)
    f, g = fam.members[0], fam.members[2]
    assert lie_poisson_bracket(f, f, x) == 0.0
    assert lie_poisson_bracket(f, g, x) == pytest.approx(-lie_poisson_bracket(g, f, x))


@pytest.mark.parametrize("cid,recipe", [
    ("row9", ["h0", "delta", ("q_A", A)]),
    ("row5", ["h0", ("m_traces_l_linear", 2)]),
    ("so-un", ["h0", ("m_traces_l_linear", 2)]),
    ("row9", ["h0", ("traces", 3)]),
    ("row1", ["h0", "delta", ("traces", 2)]),
])
def test_h0_commutes_with_everything(cid, recipe, rng):
    sp = build_space(cid)
    fam = build_family(sp, recipe)
    h0 = fam.members[0]
    for _ in range(8):
        x = sp.random_vector(rng)
        for f in fam.members[1:]:
            assert abs(lie_poisson_bracket(h0, f, x)) < 1e-10


def test_traces_commute_on_ex4_m():
    sp = build_space("so-un", {"n": 2})
    fam = build_family(sp, [("traces", 2)], domain="m")
    assert fam.labels == ["tr(x^2)", "tr(x^4)"]
    assert commutativity_residual(fam).residual < 1e-8
    rep = completeness_check(sp, fam)
    assert (rep.ddim_B, rep.target, rep.complete) == (2, 2, True)


@pytest.mark.parametrize("n", [2, 3])
def test_trace_count_equals_dind(n):
    sp = build_space("so-un", {"n": n})
    fam = build_family(sp, [("traces", n)], domain="m")
    assert family_rank(fam) == n


def test_traces_invariant_under_k(rng):
    sp = build_space("so-un", {"n": 2})
    for f in build_family(sp, [("traces", 2)], domain="m").members:
        x = sp.random_vector(rng, "m")
        assert f.invariance_residual(x, acting="k") < 1e-12


def test_row9_family_complete():
    sp = build_space("row9")
    fam = build_family(sp, ["h0", "delta", ("q_A", A)])
    assert len(fam) == 3
    rep = completeness_check(sp, fam)
    assert rep.commutativity < 1e-8
    assert (rep.ddim_B, rep.target, rep.complete) == (3, 3, True)


def test_row5_linear_on_l():
    sp = build_space("row5")
    assert len(build_family(sp, ["linear_on_l"])) == 1
    fam = build_family(sp, ["h0"])
    rep = completeness_check(sp, fam)
    assert (rep.ddim_B, rep.target, rep.complete) == (1, 2, False)


def test_linear_on_l_row9_noncommuting(rng):
    sp = build_space("row9")
    fam = build_family(sp, ["linear_on_l"])
    eta, zeta = fam.members[0], fam.members[1]
    # put x_l along [eta, zeta]
    x = sp.random_vector(rng, "m")
    x[sp.l] = sp.bracket(eta.meta["eta"], zeta.meta["eta"])[sp.l]
    expected = -x @ sp.bracket(eta.meta["eta"], zeta.meta["eta"])
    val = lie_poisson_bracket(eta, zeta, x)
    assert val == pytest.approx(expected)
    assert abs(val) > 0.1
    with pytest.raises(NonCommutingFamilyError):
        completeness_check(sp, fam)


@pytest.mark.parametrize("cid,recipe,domain", [
    ("row9", ["h0", "delta", ("q_A", A), "linear_on_l"], "v"),
    ("row5", ["h0", ("m_traces_l_linear", 2), ("traces", 3)], "v"),
    ("so-un", [("traces", 3)], "m"),
    ("row7", ["h0", "delta", ("hamiltonian", Lambda(0.3))], "v"),
])
def test_gradients_match_fd(cid, recipe, domain, rng):
    sp = build_space(cid)
    for f in build_family(sp, recipe, domain).members:
        for _ in range(3):
            x = sp.random_vector(rng, domain)
            assert f.gradient_error(x) < 1e-6, f.label


def test_trace_gradient_sign(rng):
    sp = build_space("row1")
    f = trace_power(sp, 2)
    x = sp.random_vector(rng)
    # tr(x^2) = -|x|^2 under the trace form, so the gradient is -2x
    np.testing.assert_allclose(f.gradient(x), -2 * x, atol=1e-12)


def test_recipe_errors():
    with pytest.raises(ValueError):
        build_family(build_space("sphere"), ["delta"])
    with pytest.raises(ValueError):
        build_family(build_space("row9"), ["bogus"])
    with pytest.raises(ValueError):
        build_family(build_space("row9"), [("q_A", np.eye(2))])
    with pytest.raises(ValueError):
        build_family(build_space("row9"), ["delta"], domain="m")


def test_centrality():
    sp = build_space("row9")
    assert centrality_test(hamiltonian(sp, Normal()).h_0, sp)
    assert centrality_test(hamiltonian(sp, Lambda(3.0)).h_A, sp)
    assert centrality_test(hamiltonian(sp, Lambda(3.0)).delta, sp)
    assert not centrality_test(hamiltonian(sp, FiberOperator.diag([1, 2, 3])).h_A, sp)
    for f in build_family(sp, [("traces", 3)]).members:
        assert centrality_test(f, sp)


def test_centrality_space_mismatch():
    with pytest.raises(ValueError):
        centrality_test(hamiltonian(build_space("row9"), Normal()).h_0, build_space("row5"))


@pytest.mark.parametrize("cid,metric", [
    ("row9", Lambda(2.0)), ("row9", FiberOperator.diag([1, 2, 3])), ("row5", Lambda(0.5)),
    ("so-un", Lambda(3.0)), ("so-un", Normal()), ("row1", Lambda(0.3)),
])
def test_tri_consistency(cid, metric):
    from gospace.goverify import Verdict, cross_validate

    sp = build_space(cid)
    cv = cross_validate(sp, metric)
    central = centrality_test(hamiltonian(sp, metric).h_A, sp)
    assert central == (cv.verdicts["centrality"] is Verdict.GO)
    assert central == (cv.verdicts["geodesic_lemma"] is Verdict.GO)

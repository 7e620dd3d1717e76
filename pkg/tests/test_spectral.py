"""Tests for the certification engine: ordered sweep matrices, the averaged
update, eigenvalue and multiplicity checks, block-order rate comparison, and
non-uniqueness witnesses."""

import numpy as np
import pytest

import coupled_splitting as cs
from gen import spectral_instance, two_block_instance, violating_instance


def _arr(*vals):
    return np.asarray(vals, dtype=float)


def pair_instance(H, A=((1.0, 1.0),), b=(0.0,), g=(0.0, 0.0)):
    return cs.ProblemInstance(
        blocks=cs.BlockStructure(dims=(1, 1), m=len(b)),
        H=np.asarray(H, dtype=float), g=np.asarray(g, dtype=float),
        A=np.asarray(A, dtype=float), b=np.asarray(b, dtype=float),
    )


def three_by_three_instance():
    A = np.array([[1.0, 1.0, 1.0], [1.0, 1.0, 2.0], [1.0, 2.0, 2.0]])
    return cs.ProblemInstance(
        blocks=cs.BlockStructure(dims=(1, 1, 1), m=3),
        H=np.zeros((3, 3)), g=np.zeros(3), A=A, b=_arr(1.0, 2.0, 3.0),
    )


# -- ordered sweep matrices ---------------------------------------------------


def test_perm_matrices_hand_example():
    inst = pair_instance(2.0 * np.eye(2))
    pm = cs.build_perm_matrices(inst, beta=1.0, sigma=(0, 1))
    assert np.array_equal(pm.L_sigma, np.array([[3.0, 0.0], [1.0, 3.0]]))
    assert np.array_equal(pm.R_sigma, np.array([[0.0, -1.0], [0.0, 0.0]]))
    assert np.array_equal(pm.Lbar[2, :], _arr(1.0, 1.0, 1.0))
    assert np.array_equal(pm.Rbar[:, 2], _arr(1.0, 1.0, 1.0))
    # Lbar @ M_sigma = Rbar by construction
    assert np.allclose(pm.Lbar @ pm.M_sigma, pm.Rbar, atol=1e-14)


def test_reversing_the_order_transposes_the_factor():
    rng = np.random.default_rng(11)
    inst = spectral_instance(rng, n_choices=(3,), d_max=3)
    for sigma in [(0, 1, 2), (2, 0, 1), (1, 2, 0)]:
        fwd = cs.build_perm_matrices(inst, 1.0, sigma)
        rev = cs.build_perm_matrices(inst, 1.0, sigma[::-1])
        assert np.allclose(fwd.L_sigma.T, rev.L_sigma, atol=1e-14)


def test_perm_matrices_input_errors():
    inst = pair_instance(np.eye(2))
    with pytest.raises(cs.UsageError):
        cs.build_perm_matrices(inst, 1.0, (0, 0))
    with pytest.raises(cs.UsageError):
        cs.build_perm_matrices(inst, -1.0, (0, 1))
    singular = pair_instance(np.zeros((2, 2)), A=((1.0, 0.0),))
    with pytest.raises(cs.ConditionError, match="block 1"):
        cs.build_perm_matrices(singular, 1.0, (0, 1))


def test_update_matrix_agrees_with_one_sweep():
    """The order-sigma matrix reproduces actual sweep iterates: the sweep is
    affine, so differences of iterates transform by M_sigma exactly."""
    rng = np.random.default_rng(12)
    inst = spectral_instance(rng, n_choices=(3,), d_max=2)
    d, m = inst.blocks.d, inst.blocks.m
    sigma = (2, 0, 1)
    pm = cs.build_perm_matrices(inst, 1.0, sigma)
    cfg = cs.SolverConfig(variant="admm_cyclic_n", beta=1.0, gamma=1.0)
    za, zb = rng.standard_normal(d + m), rng.standard_normal(d + m)
    outs = []
    for z in (za, zb):
        st = cs.IterateState.start(inst, x0=z[:d], mu0=z[d:])
        nxt = cs.rp_sweep(inst, cfg, st, sigma)
        outs.append(np.concatenate([nxt.x, nxt.mu]))
    lhs = outs[0] - outs[1]
    rhs = pm.M_sigma @ (za - zb)
    assert np.linalg.norm(lhs - rhs) <= 1e-10 * (1.0 + np.linalg.norm(rhs))


# -- averaged update ----------------------------------------------------------


def test_averaged_inverse_hand_example():
    inst = pair_instance(2.0 * np.eye(2))
    report = cs.build_Q_M(inst, beta=1.0)
    assert np.allclose(report.Q, np.array([[1 / 3, -1 / 18], [-1 / 18, 1 / 3]]), atol=1e-15)
    assert np.allclose(np.sort(report.eig_QS), _arr(7 / 9, 10 / 9), atol=1e-12)
    assert report.q_min_eig > 0
    assert report.consistency_defect <= 1e-13


def test_averaged_update_fully_coupled_singular_case():
    inst = pair_instance(np.zeros((2, 2)))
    report = cs.analyze_instance(inst, beta=1.0)
    assert np.allclose(report.Q, np.array([[1.0, -0.5], [-0.5, 1.0]]), atol=1e-15)
    eig = np.sort_complex(report.eig_M)
    assert np.allclose(eig, _arr(0.0, 0.0, 1.0), atol=1e-12)
    assert report.am_one == report.gm_one == 1
    assert report.eig_one_count == 1
    assert report.verdicts["lemma_3_1"] is True
    assert report.verdicts["lemma_3_3"] is True
    assert report.verdicts["lemma_3_4"] is True
    assert report.verdicts["lemma_3_5"] is True
    assert report.verdicts["am_matches_spectrum"] is True
    assert report.verdicts["prop_3_1"] is None  # zero diagonal blocks


def test_averaged_update_powers_stabilize_to_projector():
    """M^k converges; the limit has rank equal to the multiplicity of the
    unit eigenvalue."""
    inst = pair_instance(np.zeros((2, 2)))
    report = cs.build_Q_M(inst, beta=1.0)
    P = np.linalg.matrix_power(report.M, 60)
    P_next = report.M @ P
    assert np.max(np.abs(P_next - P)) <= 1e-12
    assert np.linalg.matrix_rank(P, tol=1e-10) == report.am_one
    assert np.max(np.abs(P @ P - P)) <= 1e-12


def test_enumeration_guard():
    n = 9
    inst = cs.ProblemInstance(
        blocks=cs.BlockStructure(dims=(1,) * n, m=1),
        H=np.eye(n), g=np.zeros(n), A=np.ones((1, n)), b=_arr(1.0),
    )
    with pytest.raises(cs.EnumerationLimitError):
        cs.build_Q_M(inst, 1.0)


def test_rank_identity_hand_example():
    inst = pair_instance(np.zeros((2, 2)))
    assert cs.rank_identity_check(inst, 1.0)
    inst2 = pair_instance(2.0 * np.eye(2))
    assert cs.rank_identity_check(inst2, 1.0)


def test_verdict_checks_flag_fabricated_failures():
    inst = pair_instance(2.0 * np.eye(2))
    report = cs.build_Q_M(inst, beta=1.0)
    assert cs.check_eig_QS(report)
    report.eig_QS = _arr(0.5, 4.0 / 3.0)
    assert not cs.check_eig_QS(report)
    report.eig_QS = _arr(-1e-9, 0.5)
    assert not cs.check_eig_QS(report)
    report.eig_QS = _arr(0.5, 1.0)
    report.q_min_eig = 0.0
    assert not cs.check_eig_QS(report)

    report2 = cs.build_Q_M(inst, beta=1.0)
    ok, _ = cs.check_M_spectrum(report2)
    assert ok
    report2.eig_M = np.array([1.0 + 0.0j, 1.0j])
    ok, _ = cs.check_M_spectrum(report2)
    assert not ok
    assert report2.verdicts["lemma_3_4"] is False
    report2.am_one, report2.gm_one = 2, 1
    _, mult_ok = cs.check_M_spectrum(report2)
    assert not mult_ok


def test_analyze_batch_of_random_instances():
    rng = np.random.default_rng(13)
    betas = (0.1, 1.0, 10.0)
    for trial in range(30):
        inst = spectral_instance(rng)
        report = cs.analyze_instance(inst, beta=betas[trial % 3])
        v = report.verdicts
        assert v["lemma_3_1"] and v["lemma_3_3"] and v["lemma_3_4"] and v["lemma_3_5"]
        assert v["am_matches_spectrum"]
        assert report.q_min_eig > 0
        assert report.consistency_defect <= 1e-11


def test_prop_verdict_present_for_pd_two_block():
    rng = np.random.default_rng(14)
    inst = two_block_instance(rng, kinds=("zero",))
    report = cs.analyze_instance(inst, beta=1.0)
    assert report.verdicts["prop_3_1"] is True


def test_report_json_round_trip(tmp_path):
    rng = np.random.default_rng(15)
    inst = spectral_instance(rng, n_choices=(3,))
    report = cs.analyze_instance(inst, beta=0.1)
    path = tmp_path / "report.json"
    cs.save_report(report, path)
    back = cs.load_report(path)
    assert back.verdicts == report.verdicts
    assert np.array_equal(back.Q, report.Q)
    assert np.array_equal(back.M, report.M)
    assert np.array_equal(back.eig_QS, report.eig_QS)
    assert np.array_equal(back.eig_M, report.eig_M)
    assert (back.rank_S, back.rank_penalized_gram, back.rank_stationarity_block) == (
        report.rank_S, report.rank_penalized_gram, report.rank_stationarity_block)
    assert (back.am_one, back.gm_one, back.eig_one_count) == (
        report.am_one, report.gm_one, report.eig_one_count)
    assert back.rho_M == report.rho_M
    assert back.beta == report.beta


# -- fixed-order update and the contrast instance -----------------------------


def test_cyclic_update_matrix_linearity_oracle():
    inst = three_by_three_instance()
    M, rho = cs.cyclic_update_matrix(inst, beta=1.0, gamma=1.0)
    cfg = cs.SolverConfig(variant="admm_cyclic_n", beta=1.0, gamma=1.0)
    rng = np.random.default_rng(16)
    za, zb = rng.standard_normal(6), rng.standard_normal(6)
    outs = []
    for z in (za, zb):
        st = cs.admm_cyclic_n_step(inst, cfg, cs.IterateState.start(inst, x0=z[:3], mu0=z[3:]))
        outs.append(np.concatenate([st.x, st.mu]))
    assert np.allclose(outs[0] - outs[1], M @ (za - zb), atol=1e-10)
    assert rho > 1.0


def test_contrast_cyclic_diverges_averaged_contracts():
    inst = three_by_three_instance()
    _, rho_cyc = cs.cyclic_update_matrix(inst, beta=1.0)
    report = cs.analyze_instance(inst, beta=1.0)
    assert rho_cyc > 1.0
    assert report.verdicts["lemma_3_4"] and report.verdicts["lemma_3_5"]
    et = cs.run_expected_iteration(inst, 1.0, tol=1e-12)
    assert et.status == "converged"


def test_cyclic_update_matrix_guards():
    inst = three_by_three_instance()
    with pytest.raises(cs.UsageError):
        cs.cyclic_update_matrix(inst, beta=1.0, gamma=cs.GAMMA_SUP)
    with pytest.raises(cs.UsageError):
        cs.cyclic_update_matrix(inst, beta=1.0, gamma=0.0)
    nonsmooth = cs.ProblemInstance(
        blocks=cs.BlockStructure(dims=(1, 1), m=1),
        H=np.eye(2), g=np.zeros(2), A=np.array([[1.0, 1.0]]), b=_arr(1.0),
        theta=(cs.ProxFn.l1(1.0), cs.ProxFn.zero()),
    )
    with pytest.raises(cs.UsageError):
        cs.cyclic_update_matrix(nonsmooth, beta=1.0)


# -- block-order rate comparison ----------------------------------------------


def test_bcd_rates_normalized_hand_values():
    H = np.array([[1.0, 0.5], [0.5, 1.0]])
    cmp = cs.bcd_rate_matrices(H, d1=1)
    assert abs(cmp.rho1 - 0.25) <= 1e-12
    assert abs(cmp.rho2 - 0.25) <= 1e-12
    assert abs(cmp.rho3 - 0.375) <= 1e-12
    assert abs(cmp.sigma1 - 0.25) <= 1e-12
    assert abs(cmp.rho3_closed_form - 0.375) <= 1e-12

    edge = cs.bcd_rate_matrices(np.array([[1.0, 1.0], [1.0, 1.0]]), d1=1)
    assert abs(edge.sigma1 - 1.0) <= 1e-12
    assert abs(edge.rho3 - 1.0) <= 1e-12
    assert abs(edge.rho3_closed_form - 1.0) <= 1e-12


def test_bcd_rates_random_psd_property():
    rng = np.random.default_rng(17)
    for _ in range(10):
        d1 = int(rng.integers(1, 4))
        d2 = int(rng.integers(1, 4))
        d = d1 + d2
        W = rng.standard_normal((d, d + 1))
        H = W @ W.T / d + np.diag(rng.uniform(0.2, 1.0, size=d))
        cmp = cs.bcd_rate_matrices(H, d1)
        assert abs(cmp.rho1 - cmp.rho2) <= 1e-10
        assert cmp.rho3 >= cmp.rho1 - 1e-10
        assert cmp.sigma1 is None
        assert cmp.rho3_closed_form is None


def test_bcd_rates_input_errors():
    with pytest.raises(cs.StructuralError):
        cs.bcd_rate_matrices(np.ones((2, 3)), 1)
    with pytest.raises(cs.StructuralError):
        cs.bcd_rate_matrices(np.array([[1.0, 0.2], [0.3, 1.0]]), 1)
    with pytest.raises(cs.UsageError):
        cs.bcd_rate_matrices(np.eye(2), 0)
    with pytest.raises(cs.ConditionError, match="leading"):
        cs.bcd_rate_matrices(np.diag([0.0, 1.0]), 1)


# -- witnesses and oscillation ------------------------------------------------


def witness_instance():
    return cs.ProblemInstance(
        blocks=cs.BlockStructure(dims=(1, 1), m=1),
        H=np.diag([0.0, 1.0]), g=np.zeros(2),
        A=np.array([[0.0, 1.0]]), b=_arr(1.0),
    )


def test_witness_found_on_degenerate_instance():
    cert = cs.divergence_witness(witness_instance(), beta=1.0)
    assert cert is not None
    assert abs(abs(cert.ybar[0]) - 1.0) <= 1e-12
    assert abs(cert.ybar[1]) <= 1e-12
    assert cert.min_eigenvalue <= 1e-10
    assert max(cert.checks.values()) <= 1e-10
    doc = cert.to_dict()
    assert set(doc) == {"ybar", "min_eigenvalue", "beta", "checks"}


def test_witness_absent_when_curvature_definite():
    rng = np.random.default_rng(18)
    inst = two_block_instance(rng, kinds=("zero",))
    assert cs.divergence_witness(inst, beta=1.0) is None


def test_witness_on_planted_violations():
    rng = np.random.default_rng(19)
    for _ in range(5):
        inst, ybar = violating_instance(rng)
        cert = cs.divergence_witness(inst, beta=1.0)
        assert cert is not None
        # found direction matches the planted one up to sign
        align = abs(float(cert.ybar @ ybar))
        assert align >= 1.0 - 1e-8


def test_witness_guards():
    inst = three_by_three_instance()
    with pytest.raises(cs.UsageError):
        cs.divergence_witness(inst, beta=1.0)
    with pytest.raises(cs.UsageError):
        cs.divergence_witness(witness_instance(), beta=0.0)


def test_oscillation_two_legitimate_trajectories():
    inst = witness_instance()
    cfg = cs.SolverConfig(variant="admm_cyclic_n", beta=1.0, gamma=1.0)
    cert = cs.divergence_witness(inst, beta=1.0)
    res = cs.oscillation_demo(inst, cfg, cert.ybar, k_max=12)
    assert res.max_optimality_defect <= 1e-10
    assert res.gap_persists
    # the baseline settles; the perturbed path keeps stepping by the witness
    base_tail = res.baseline.iterates if res.baseline.iterates else None
    xs_gap = np.linalg.norm(res.perturbed.x - res.baseline.x)
    assert xs_gap >= 0.5 or base_tail is None
    assert res.perturbed.status != "converged"


def test_oscillation_rejects_invalid_witness():
    inst = witness_instance()
    cfg = cs.SolverConfig(variant="admm_cyclic_n", beta=1.0, gamma=1.0)
    with pytest.raises(cs.CertificateError):
        cs.oscillation_demo(inst, cfg, _arr(0.0, 1.0), k_max=6)
    with pytest.raises(cs.UsageError):
        cs.oscillation_demo(inst, cfg, _arr(1.0, 0.0), k_max=1)
    nonsmooth = cs.ProblemInstance(
        blocks=cs.BlockStructure(dims=(1, 1), m=1),
        H=np.diag([0.0, 1.0]), g=np.zeros(2), A=np.array([[0.0, 1.0]]), b=_arr(1.0),
        theta=(cs.ProxFn.l1(1.0), cs.ProxFn.zero()),
    )
    with pytest.raises(cs.UsageError):
        cs.oscillation_demo(nonsmooth, cfg, _arr(1.0, 0.0), k_max=6)

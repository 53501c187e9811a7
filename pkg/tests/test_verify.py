import json
import math

import numpy as np
import pytest

from structneg import measures, qstate, verify
from structneg.errors import ParameterOutOfRange


def assert_report_ok(rep, trials):
    assert rep.trials == trials
    assert 0 <= rep.violations <= rep.trials or not rep.hard
    assert rep.violations == 0, rep
    if rep.worst_margin is not None:
        assert rep.worst_margin >= -rep.config["tolerance"]


# ---------------------------------------------------------------- hard suites


@pytest.mark.parametrize("d", [2, 3])
def test_separable_zero(d):
    assert_report_ok(verify.suite_separable_zero(d, 150, seed=1), 150)


def test_separable_zero_pure_product():
    s = qstate.random_separable(3, 1, 4, pure_locals=True)
    assert measures.structured_negativity(s) == 0.0


@pytest.mark.parametrize("d", [2, 3, 4])
def test_lu_invariance(d):
    assert_report_ok(verify.suite_lu_invariance(d, 80, seed=2), 80)


def test_lu_identity_and_diagonal_phases():
    s = qstate.werner(0.8)
    assert measures.structured_negativity(qstate.local_conjugate(s, np.eye(2), np.eye(2))) == \
        measures.structured_negativity(s)
    u = np.diag([1.0, 1j])
    v = np.array([[0, 1], [1, 0]]) @ np.diag([np.exp(0.3j), np.exp(-1.1j)])
    assert measures.structured_negativity(qstate.local_conjugate(s, u, v)) == pytest.approx(0.7, abs=1e-9)


@pytest.mark.parametrize("d", [2, 3])
def test_convexity(d):
    assert_report_ok(verify.suite_convexity(d, 80, seed=3), 80)


def test_convexity_examples():
    s = qstate.rho_a(0.9)
    mix = qstate.mixture([s, s], [0.4, 0.6])
    assert measures.structured_negativity(mix) == pytest.approx(measures.structured_negativity(s), abs=1e-12)
    bell_mix = qstate.mixture([qstate.max_entangled(2), qstate.werner(0.0)], [0.5, 0.5])
    ns = measures.structured_negativity(bell_mix)
    assert ns == pytest.approx(0.25, abs=1e-12)
    assert ns <= 0.5 * measures.structured_negativity(qstate.max_entangled(2))


@pytest.mark.parametrize("d", [2, 3, 4])
def test_lemma1(d):
    assert_report_ok(verify.suite_lemma1_linearity(d, 80, seed=4), 80)


def test_lemma1_werner_closure():
    mix = qstate.mixture([qstate.werner(1.0), qstate.werner(0.0)], [0.5, 0.5])
    np.testing.assert_allclose(measures.spa_pt(mix).rho, measures.spa_pt(qstate.werner(0.5)).rho, atol=1e-15)


@pytest.mark.parametrize("n", [4, 9])
def test_weyl_suite(n):
    assert_report_ok(verify.suite_weyl(n, 100, seed=5), 100)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_two_path(d):
    assert_report_ok(verify.suite_two_path(d, 100, seed=6), 100)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_result1(d):
    rep = verify.check_result1(d, 100, seed=7)
    assert_report_ok(rep, 100)
    assert rep.details["q_above_bound"] == 0
    if d == 2:
        assert rep.details["equality_count"] == 100


def test_result1_anchor_points():
    q, n, ns, q_slack, d_slack = verify._result1_margins(qstate.max_entangled(3))
    assert (q, n, ns) == (3, pytest.approx(1.0), pytest.approx(1.0))
    assert q_slack == pytest.approx(0.0, abs=1e-12)
    q, n, ns, q_slack, d_slack = verify._result1_margins(qstate.rho_a(1.0))
    assert q == 2
    assert ns >= 3 * 2 / (2 * q) * n
    assert q_slack >= 0 and d_slack >= 0


def test_conjecture_d2_is_hard_and_passes():
    rep = verify.check_conjecture(2, 200, seed=8)
    assert rep.hard
    assert_report_ok(rep, 200)
    assert set(rep.details["buckets"]) == {"1"}


def test_conjecture_d3_reports():
    rep = verify.check_conjecture(3, 150, seed=9)
    assert not rep.hard and rep.passed
    anchors = rep.details["anchors"]
    assert anchors["max_entangled"]["q"] == 3
    assert anchors["max_entangled"]["abs_diff"] <= 1e-9
    assert anchors["rho_alpha_4.5"]["q"] == 3
    assert anchors["rho_alpha_4.5"]["abs_diff"] <= 1e-9
    total = sum(b["count"] for b in rep.details["buckets"].values())
    assert total == 150 - rep.details["npt_draw_failures"]
    json.dumps(rep.to_dict())


# ---------------------------------------------------------------- LOCC


def test_locc_unitary_padding_is_lu_invariant():
    s = qstate.random_density(2, 3, 10)
    u = qstate.random_local_unitary(2, 11)
    rec = verify.locc_trial(s, qstate.KrausSet((u, np.zeros((2, 2)))))
    assert rec.skipped_branches == 1
    assert rec.ns_avg_after_normalized == pytest.approx(rec.ns_before, abs=1e-9)


def test_locc_projective_on_singlet():
    proj = qstate.KrausSet((np.diag([1.0, 0.0]), np.diag([0.0, 1.0])))
    rec = verify.locc_trial(qstate.werner(1.0), proj)
    assert rec.p_i == pytest.approx([0.5, 0.5])
    assert rec.ns_before == pytest.approx(1.0)
    assert rec.ns_avg_after_normalized == 0.0
    assert rec.ns_avg_after_unnormalized == 0.0


def test_locc_suite_deterministic():
    recs1, rep1 = verify.suite_locc(2, 60, 2, seed=12)
    recs2, rep2 = verify.suite_locc(2, 60, 2, seed=12)
    assert rep1 == rep2
    assert [r.ns_before for r in recs1] == [r.ns_before for r in recs2]
    assert not rep1.hard and rep1.passed
    for r in recs1:
        assert sum(r.p_i) == pytest.approx(1.0, abs=1e-8)
    assert set(rep1.details) >= {"normalized", "unnormalized", "skipped_branches"}


def test_locc_rejects_bad_arguments():
    with pytest.raises(ParameterOutOfRange):
        verify.suite_locc(4, 1, 2, 0)
    with pytest.raises(ParameterOutOfRange):
        verify.suite_locc(2, 1, 5, 0)


# ---------------------------------------------------------------- closed forms


def test_closed_forms_flags():
    rep = verify.check_closed_forms(points=15)
    forms = rep.details["forms"]
    for name in ("werner.negativity", "werner.structured_negativity", "mems.high.negativity",
                 "mems.low.structured_negativity", "rho_a.structured_negativity",
                 "rho_alpha.negativity.sign_corrected", "rho_alpha.structured_negativity.sign_corrected"):
        assert forms[name]["matches"], name
    for name in ("rho_alpha.negativity.as_printed", "rho_alpha.structured_negativity.as_printed",
                 "rho_a.negativity.as_printed", "rho_a.negativity.linear_a"):
        assert not forms[name]["matches"], name
    assert not rep.hard


# ---------------------------------------------------------------- driver


def test_run_all_deterministic_and_parallel_safe():
    cfg = verify.VerifyConfig(dims=(2, 3), trials=25, closed_form_points=5)
    a = verify.run_all(cfg, seed=3)
    b = verify.run_all(cfg, seed=3)
    c = verify.run_all(verify.VerifyConfig(dims=(2, 3), trials=25, closed_form_points=5, workers=4), seed=3)
    assert [r.to_dict() for r in a] == [r.to_dict() for r in b] == [r.to_dict() for r in c]
    assert all(r.passed for r in a)
    names = {r.suite_name for r in a}
    assert names == set(verify.ALL_SUITES)


def test_run_all_zero_trials():
    reports = verify.run_all(verify.VerifyConfig(dims=(2,), trials=0), seed=0)
    assert reports
    for r in reports:
        assert r.trials == 0 and r.violations == 0 and r.worst_margin is None


def test_run_all_rejects_unknown():
    with pytest.raises(ParameterOutOfRange):
        verify.run_all(verify.VerifyConfig(suites=("nope",)))
    with pytest.raises(ParameterOutOfRange):
        verify.run_all(verify.VerifyConfig(dims=(5,)))


def test_failed_verdict_counts_as_violation():
    rep = verify._summarize("x", 2, [0.0, -math.inf], 1e-9, 0, {})
    assert rep.violations == 1 and not rep.passed

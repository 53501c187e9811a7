"""Randomized and closed-form checks of structured negativity's properties.

Every suite returns a :class:`VerifyReport`. Trials are independent: trial
``t`` of a suite draws from ``default_rng([seed, suite_id, d, t])``, so the
outcome does not depend on execution order and ``workers > 1`` reproduces
the sequential result exactly.

Hard suites (``hard=True``) encode properties that must hold; reporting
suites collect evidence (LOCC conventions, the q-coincidence conjecture for
d >= 3, the reference closed forms) and never gate success.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import matcore, measures, qstate
from .errors import ParameterOutOfRange
from .qstate import BipartiteState

SUITE_IDS = {
    "separable_zero": 1,
    "lu_invariance": 2,
    "convexity": 3,
    "lemma1": 4,
    "locc": 5,
    "result1": 6,
    "conjecture": 7,
    "weyl": 8,
    "two_path": 9,
}
HARD_SUITES = ("separable_zero", "lu_invariance", "convexity", "lemma1", "weyl", "result1", "two_path", "conjecture")
REPORTING_SUITES = ("locc", "closed_forms")
ALL_SUITES = HARD_SUITES + REPORTING_SUITES

SUITE_DIMS = (2, 3, 4)
LOCC_DIMS = (2, 3)
NPT_DRAW_CAP = 100
ZERO_PROB = 1e-12

TOL_SEPARABLE = 1e-9
TOL_LU = 1e-8
TOL_CONVEX = 1e-8
TOL_LEMMA1 = 1e-10
TOL_LOCC = 1e-8
TOL_RESULT1 = 1e-9
TOL_TWO_PATH = 1e-9
TOL_COINCIDE = 1e-9


@dataclass
class VerifyReport:
    suite_name: str
    trials: int
    violations: int
    worst_margin: float | None
    seed: int
    config: dict
    hard: bool = True
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.hard or self.violations == 0

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["passed"] = self.passed
        return doc


@dataclass
class LoccTrialRecord:
    d: int
    m: int
    ns_before: float
    ns_avg_after_normalized: float
    ns_avg_after_unnormalized: float
    p_i: list
    skipped_branches: int = 0


# --------------------------------------------------------------------------
# plumbing
# --------------------------------------------------------------------------

def trial_rng(seed: int, suite: str, d: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, SUITE_IDS[suite], d, trial])


def _map_trials(fn, trials: int, workers: int = 1) -> list:
    if workers <= 1 or trials <= 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(trials)))


def _check_dim(d: int, allowed=SUITE_DIMS):
    if d not in allowed:
        raise ParameterOutOfRange(f"d must be one of {allowed}, got {d}")


def random_state(d: int, rng) -> BipartiteState:
    """Induced-measure state with a rank drawn uniformly from 1..d^2."""
    rank = int(rng.integers(1, d * d + 1))
    return qstate.random_density(d, rank, rng)


def random_npt_state(d: int, rng, cap: int = NPT_DRAW_CAP) -> BipartiteState | None:
    """Draw until the state is NPT (q >= 1); ``None`` after ``cap`` failures."""
    for _ in range(cap):
        s = random_state(d, rng)
        if measures.q_count(s) >= 1:
            return s
    return None


def _summarize(name, trials, slacks, tol, seed, config, hard=True, details=None) -> VerifyReport:
    slacks = np.asarray(slacks, dtype=float)
    violations = int(np.count_nonzero(slacks < -tol))
    worst = float(slacks.min()) if slacks.size else None
    config = dict(config, tolerance=tol)
    return VerifyReport(name, trials, violations, worst, seed, config, hard, details or {})


# --------------------------------------------------------------------------
# monotone axioms
# --------------------------------------------------------------------------

def suite_separable_zero(d: int, trials: int, seed: int, workers: int = 1) -> VerifyReport:
    """Structured negativity vanishes and the SPA test passes on separable states."""
    _check_dim(d)

    def one(t):
        rng = trial_rng(seed, "separable_zero", d, t)
        n_terms = int(rng.integers(1, d * d + 2))
        s = qstate.random_separable(d, n_terms, rng, pure_locals=bool(rng.integers(0, 2)))
        ns = measures.structured_negativity(s)
        gap = measures.lambda_min_spa(s) - measures.spa_threshold(d)
        ok = ns == 0.0 and measures.is_separable_spa(s)
        # a failed verdict must count even if the numeric slack is tiny
        return min(-ns, gap) if ok else -math.inf

    slacks = _map_trials(one, trials, workers)
    return _summarize("separable_zero", trials, slacks, TOL_SEPARABLE, seed, {"d": d})


def suite_lu_invariance(d: int, trials: int, seed: int, workers: int = 1) -> VerifyReport:
    """N and N_S are unchanged by ``(U_A x U_B) rho (U_A x U_B)^dagger``."""
    _check_dim(d)

    def one(t):
        rng = trial_rng(seed, "lu_invariance", d, t)
        s = random_state(d, rng)
        u_a = qstate.haar_unitary(d, rng)
        u_b = qstate.haar_unitary(d, rng)
        s2 = qstate.local_conjugate(s, u_a, u_b)
        dn = abs(measures.negativity(s) - measures.negativity(s2))
        dns = abs(measures.structured_negativity(s) - measures.structured_negativity(s2))
        return -max(dn, dns)

    slacks = _map_trials(one, trials, workers)
    return _summarize("lu_invariance", trials, slacks, TOL_LU, seed, {"d": d})


def suite_convexity(d: int, trials: int, seed: int, workers: int = 1) -> VerifyReport:
    """``N_S(sum p_k rho_k) <= sum p_k N_S(rho_k)`` for 2 or 3 NPT components."""
    _check_dim(d)

    def one(t):
        rng = trial_rng(seed, "convexity", d, t)
        k = int(rng.integers(2, 4))
        states = []
        for _ in range(k):
            s = random_npt_state(d, rng)
            states.append(s if s is not None else random_state(d, rng))
        p = rng.dirichlet(np.ones(k))
        mixed = qstate.mixture(states, p)
        rhs = sum(pk * measures.structured_negativity(s) for pk, s in zip(p, states))
        return rhs - measures.structured_negativity(mixed)

    slacks = _map_trials(one, trials, workers)
    return _summarize("convexity", trials, slacks, TOL_CONVEX, seed, {"d": d})


def suite_lemma1_linearity(d: int, trials: int, seed: int, workers: int = 1) -> VerifyReport:
    """SPA-PT of a mixture equals the mixture of SPA-PTs, elementwise to 1e-10."""
    _check_dim(d)

    def one(t):
        rng = trial_rng(seed, "lemma1", d, t)
        k = int(rng.integers(1, 4))
        states = [random_state(d, rng) for _ in range(k)]
        p = rng.dirichlet(np.ones(k))
        lhs = measures.spa_pt_matrix(qstate.mixture(states, p).rho, d)
        rhs = sum(pk * measures.spa_pt_matrix(s.rho, d) for pk, s in zip(p, states))
        return -float(np.max(np.abs(lhs - rhs)))

    slacks = _map_trials(one, trials, workers)
    return _summarize("lemma1", trials, slacks, TOL_LEMMA1, seed, {"d": d})


def suite_weyl(n: int, trials: int, seed: int, workers: int = 1) -> VerifyReport:
    """Weyl's inequality over every valid ``(k, j)`` for random Hermitian pairs of size n."""

    def one(t):
        rng = np.random.default_rng([seed, SUITE_IDS["weyl"], n, t])
        g1 = qstate.ginibre((n, n), rng)
        g2 = qstate.ginibre((n, n), rng)
        a = 0.5 * (g1 + g1.conj().T)
        b = 0.5 * (g2 + g2.conj().T)
        return float(np.nanmin(matcore.weyl_margins(a, b)))

    slacks = _map_trials(one, trials, workers)
    return _summarize("weyl", trials, slacks, matcore.WEYL_SLACK, seed, {"n": n})


def suite_two_path(d: int, trials: int, seed: int, workers: int = 1) -> VerifyReport:
    """The SPA-PT route and the ``d * max(0, -lambda_min(PT))`` route agree to 1e-9."""
    _check_dim(d)

    def one(t):
        rng = trial_rng(seed, "two_path", d, t)
        via_spa, via_pt = measures.structured_negativity_paths(random_state(d, rng))
        return -abs(via_spa - via_pt)

    slacks = _map_trials(one, trials, workers)
    return _summarize("two_path", trials, slacks, TOL_TWO_PATH, seed, {"d": d})


# --------------------------------------------------------------------------
# LOCC
# --------------------------------------------------------------------------

def locc_trial(s: BipartiteState, kraus: qstate.KrausSet) -> LoccTrialRecord:
    """Average N_S over the branches ``(K_i x I) rho (K_i x I)^dagger``.

    The normalized convention weighs ``N_S(branch / p_i)`` by ``p_i``; the
    unnormalized one weighs ``N_S(branch)`` itself. Branches with
    ``p_i < 1e-12`` are dropped and counted.
    """
    d = s.d
    eye = np.eye(d)
    probs, avg_norm, avg_unnorm, skipped = [], 0.0, 0.0, 0
    for k in kraus.operators:
        op = np.kron(k, eye)
        branch = op @ s.rho @ op.conj().T
        p = float(np.trace(branch).real)
        probs.append(p)
        if p < ZERO_PROB:
            skipped += 1
            continue
        avg_norm += p * measures.structured_negativity_of_matrix(branch / p, d)
        avg_unnorm += p * measures.structured_negativity_of_matrix(branch, d)
    return LoccTrialRecord(
        d=d,
        m=kraus.count,
        ns_before=measures.structured_negativity(s),
        ns_avg_after_normalized=avg_norm,
        ns_avg_after_unnormalized=avg_unnorm,
        p_i=probs,
        skipped_branches=skipped,
    )


def suite_locc(d: int, trials: int, m: int, seed: int, workers: int = 1):
    """Evidence on whether N_S decreases on average under one-sided local operations.

    Returns the per-trial records and a non-gating report. ``violations``
    counts the normalized convention; both conventions are in ``details``.
    """
    _check_dim(d, LOCC_DIMS)
    if m not in (2, 3, 4):
        raise ParameterOutOfRange(f"m must be 2, 3 or 4, got {m}")

    def one(t):
        rng = trial_rng(seed, "locc", d, t)
        s = random_npt_state(d, rng)
        if s is None:
            return None
        return locc_trial(s, qstate.random_kraus_set(d, m, rng))

    results = _map_trials(one, trials, workers)
    records = [r for r in results if r is not None]
    slack_n = [r.ns_before - r.ns_avg_after_normalized for r in records]
    slack_u = [r.ns_before - r.ns_avg_after_unnormalized for r in records]
    details = {
        "npt_draw_failures": trials - len(records),
        "skipped_branches": sum(r.skipped_branches for r in records),
        "normalized": {
            "violations": int(sum(x < -TOL_LOCC for x in slack_n)),
            "worst_margin": min(slack_n) if slack_n else None,
        },
        "unnormalized": {
            "violations": int(sum(x < -TOL_LOCC for x in slack_u)),
            "worst_margin": min(slack_u) if slack_u else None,
        },
    }
    report = _summarize("locc", trials, slack_n, TOL_LOCC, seed, {"d": d, "m": m}, hard=False, details=details)
    return records, report


# --------------------------------------------------------------------------
# negativity vs structured negativity
# --------------------------------------------------------------------------

def _result1_margins(s: BipartiteState):
    d = s.d
    eigs = measures.pt_spectrum(s)
    q = int(np.count_nonzero(eigs < -measures.NEGATIVE_EIG_TOL))
    n = measures.negativity(s)
    ns = measures.structured_negativity(s)
    q_slack = 2.0 * q / (d * (d - 1)) * ns - n if q >= 1 else math.inf
    d_slack = 2.0 * (1.0 - 1.0 / d) * ns - n
    return q, n, ns, q_slack, d_slack


def check_result1(d: int, trials: int, seed: int, workers: int = 1) -> VerifyReport:
    """``N <= 2q/(d(d-1)) N_S`` and ``N <= 2(1 - 1/d) N_S`` on random NPT states."""
    _check_dim(d)

    def one(t):
        s = random_npt_state(d, trial_rng(seed, "result1", d, t))
        return None if s is None else _result1_margins(s)

    rows = [r for r in _map_trials(one, trials, workers) if r is not None]
    q_slacks = [r[3] for r in rows]
    d_slacks = [r[4] for r in rows]
    slacks = [min(a, b) for a, b in zip(q_slacks, d_slacks)]
    details = {
        "npt_draw_failures": trials - len(rows),
        "worst_q_margin": min(q_slacks) if q_slacks else None,
        "worst_dimension_margin": min(d_slacks) if d_slacks else None,
        "q_above_bound": int(sum(r[0] > (d - 1) ** 2 for r in rows)),
        "equality_count": int(sum(abs(r[1] - r[2]) <= TOL_COINCIDE for r in rows)),
    }
    report = _summarize("result1", trials, slacks, TOL_RESULT1, seed, {"d": d}, details=details)
    report.violations += details["q_above_bound"]
    return report


def _negative_spread(eigs) -> float:
    neg = -eigs[eigs < -measures.NEGATIVE_EIG_TOL]
    return float(neg.max() - neg.min()) if neg.size else 0.0


def check_conjecture(d: int, trials: int, seed: int, workers: int = 1) -> VerifyReport:
    """Bucket random NPT states by q and compare N with N_S in each bucket.

    For d = 2 every NPT state must have q = 1 and ``|N - N_S| <= 1e-9``;
    that case is a hard check. For d >= 3 the report only counts, in the
    ``q = d(d-1)/2`` bucket, states where the two measures differ, together
    with the spread of the negative eigenvalues.
    """
    _check_dim(d)
    target_q = d * (d - 1) // 2

    def one(t):
        s = random_npt_state(d, trial_rng(seed, "conjecture", d, t))
        if s is None:
            return None
        eigs = measures.pt_spectrum(s)
        q = int(np.count_nonzero(eigs < -measures.NEGATIVE_EIG_TOL))
        diff = abs(measures.negativity(s) - measures.structured_negativity(s))
        return q, diff, _negative_spread(eigs)

    rows = [r for r in _map_trials(one, trials, workers) if r is not None]
    buckets = {}
    for q, diff, spread in rows:
        b = buckets.setdefault(q, {"count": 0, "diffs": [], "spreads": [], "coincident": 0})
        b["count"] += 1
        b["diffs"].append(diff)
        b["spreads"].append(spread)
        b["coincident"] += diff <= TOL_COINCIDE
    summary = {}
    for q in sorted(buckets):
        b = buckets[q]
        diffs = np.array(b["diffs"])
        spreads = np.array(b["spreads"])
        summary[str(q)] = {
            "count": b["count"],
            "coincident": int(b["coincident"]),
            "max_abs_diff": float(diffs.max()),
            "mean_abs_diff": float(diffs.mean()),
            "min_abs_diff": float(diffs.min()),
            "max_negative_spread": float(spreads.max()),
            "min_negative_spread": float(spreads.min()),
        }

    anchors = {}
    me = qstate.max_entangled(d)
    anchors["max_entangled"] = {
        "q": measures.q_count(me),
        "abs_diff": abs(measures.negativity(me) - measures.structured_negativity(me)),
    }
    if d == 3:
        ra = qstate.rho_alpha(4.5)
        anchors["rho_alpha_4.5"] = {
            "q": measures.q_count(ra),
            "abs_diff": abs(measures.negativity(ra) - measures.structured_negativity(ra)),
            "negative_spread": _negative_spread(measures.pt_spectrum(ra)),
        }

    target = [r for r in rows if r[0] == target_q]
    counterexamples = sum(diff > TOL_COINCIDE for _, diff, _ in target)
    details = {
        "target_q": target_q,
        "npt_draw_failures": trials - len(rows),
        "buckets": summary,
        "target_bucket_counterexamples": int(counterexamples),
        # coincidence in the target bucket happens exactly when the spread vanishes
        "target_bucket_equal_spread": int(sum(sp <= TOL_COINCIDE for _, _, sp in target)),
        "anchors": anchors,
    }
    if d == 2:
        slacks = [(-diff if q == 1 else -math.inf) for q, diff, _ in rows]
        return _summarize("conjecture", trials, slacks, TOL_COINCIDE, seed, {"d": d}, details=details)
    slacks = [-diff for q, diff, _ in target]
    report = _summarize("conjecture", trials, slacks, TOL_COINCIDE, seed, {"d": d}, hard=False, details=details)
    return report


# --------------------------------------------------------------------------
# reference closed forms
# --------------------------------------------------------------------------

def _mems_root(c):
    return math.sqrt(1.0 - 2.0 * c + 2.0 * c * c)


def _alpha_root(al):
    return math.sqrt(41.0 - 20.0 * al + 4.0 * al * al)


# (name, family, measure, lo, hi, include_hi, formula)
CLOSED_FORMS = (
    ("werner.negativity", "werner", "negativity", 1 / 3, 1.0, True, lambda f: (3 * f - 1) / 2),
    ("werner.structured_negativity", "werner", "structured_negativity", 1 / 3, 1.0, True,
     lambda f: 18 * (2 / 9 + (f - 3) / 12)),
    ("werner.lambda_min_spa", "werner", "lambda_min_spa", 0.0, 1.0, True, lambda f: (3 - f) / 12),
    ("mems.high.negativity", "mems", "negativity", 2 / 3, 1.0, True, lambda c: -1 + c + _mems_root(c)),
    ("mems.high.structured_negativity", "mems", "structured_negativity", 2 / 3, 1.0, True,
     lambda c: 18 * (2 / 9 + (-5 + c + _mems_root(c)) / 18)),
    ("mems.low.negativity", "mems", "negativity", 0.0, 2 / 3, False,
     lambda c: (-1 + math.sqrt(1 + 9 * c * c)) / 3),
    ("mems.low.structured_negativity", "mems", "structured_negativity", 0.0, 2 / 3, False,
     lambda c: 18 * (2 / 9 + (-13 + math.sqrt(1 + 9 * c * c)) / 54)),
    ("rho_a.structured_negativity", "rho_a", "structured_negativity", 1 / math.sqrt(2), 1.0, True,
     lambda a: 84 * (3 / 28 - (7 + 3 * a * a) / (14 * (5 + 2 * a * a)))),
    ("rho_a.negativity.as_printed", "rho_a", "negativity", 1 / math.sqrt(2), 1.0, True,
     lambda a: (1 - (1 - 2 * math.sqrt(a)) - (1 + a * a - math.sqrt(5 - 2 * a * a + a**4))) / (5 + 2 * a * a)),
    ("rho_a.negativity.linear_a", "rho_a", "negativity", 1 / math.sqrt(2), 1.0, True,
     lambda a: (1 - (1 - 2 * a) - (1 + a * a - math.sqrt(5 - 2 * a * a + a**4))) / (5 + 2 * a * a)),
    ("rho_alpha.negativity.as_printed", "rho_alpha", "negativity", 4.0, 5.0, True,
     lambda al: -(-5 + _alpha_root(al)) / 14),
    ("rho_alpha.negativity.sign_corrected", "rho_alpha", "negativity", 4.0, 5.0, True,
     lambda al: (_alpha_root(al) - 5) / 14),
    ("rho_alpha.structured_negativity.as_printed", "rho_alpha", "structured_negativity", 4.0, 5.0, True,
     lambda al: 84 * (3 / 28 - (-131 + _alpha_root(al)) / 1176)),
    ("rho_alpha.structured_negativity.sign_corrected", "rho_alpha", "structured_negativity", 4.0, 5.0, True,
     lambda al: 84 * (3 / 28 - (131 - _alpha_root(al)) / 1176)),
)

CLOSED_FORM_TOL = 1e-9


def closed_form_grid(lo: float, hi: float, points: int, include_hi: bool = True) -> np.ndarray:
    return np.linspace(lo, hi, points, endpoint=include_hi)


def check_closed_forms(points: int = 50, seed: int = 0) -> VerifyReport:
    """Compare each reference closed form with the eigensolver over its range.

    ``violations`` counts mismatching forms; the suite is informational
    because some reference forms carry sign errors.
    """
    results = {}
    slacks = []
    for name, family, measure, lo, hi, inc, fn in CLOSED_FORMS:
        grid = closed_form_grid(lo, hi, points, inc)
        dev = 0.0
        for x in grid:
            rep = measures.measure_report(qstate.family_state(family, float(x)))
            dev = max(dev, abs(getattr(rep, measure) - fn(float(x))))
        matches = dev <= CLOSED_FORM_TOL
        if len(grid):
            slacks.append(-dev)
        results[name] = {"max_abs_dev": dev, "matches": bool(matches), "range": [lo, hi]}
    report = _summarize("closed_forms", points, slacks, CLOSED_FORM_TOL, seed, {"points": points},
                        hard=False, details={"forms": results})
    return report


# --------------------------------------------------------------------------
# driver
# --------------------------------------------------------------------------

@dataclass
class VerifyConfig:
    dims: tuple = (2, 3)
    trials: int = 200
    locc_m: int = 2
    suites: tuple = ALL_SUITES
    workers: int = 1
    closed_form_points: int = 50


def run_all(config: VerifyConfig | None = None, seed: int = 0) -> list[VerifyReport]:
    """Run the selected suites for every dimension in ``config.dims``.

    Suites share ``seed``; their random streams differ through the suite id
    in the per-trial seed.
    """
    cfg = config or VerifyConfig()
    unknown = set(cfg.suites) - set(ALL_SUITES)
    if unknown:
        raise ParameterOutOfRange(f"unknown suites: {sorted(unknown)}")
    for d in cfg.dims:
        _check_dim(d)
    t, w = cfg.trials, cfg.workers
    reports = []
    per_dim = (
        ("separable_zero", suite_separable_zero),
        ("lu_invariance", suite_lu_invariance),
        ("convexity", suite_convexity),
        ("lemma1", suite_lemma1_linearity),
        ("two_path", suite_two_path),
        ("result1", check_result1),
        ("conjecture", check_conjecture),
    )
    for d in cfg.dims:
        for name, fn in per_dim:
            if name in cfg.suites:
                reports.append(fn(d, t, seed, workers=w))
        if "weyl" in cfg.suites:
            reports.append(suite_weyl(d * d, t, seed, workers=w))
        if "locc" in cfg.suites and d in LOCC_DIMS:
            reports.append(suite_locc(d, t, cfg.locc_m, seed, workers=w)[1])
    if "closed_forms" in cfg.suites:
        points = cfg.closed_form_points if t > 0 else 0
        reports.append(check_closed_forms(points, seed))
    return reports

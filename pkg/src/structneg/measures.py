"""Entanglement quantifiers for d x d states.

Structured negativity is built on the structural physical approximation of
the partial transpose (SPA-PT),

    spa(rho) = d/(d^3+1) I + 1/(d^3+1) rho^{T_B},

whose smallest eigenvalue drops below ``d/(d^3+1)`` exactly when rho is
NPT. The measure rescales that gap by ``K = d(d^3+1)``. Because the identity
shifts every eigenvalue equally, the same number is ``d * max(0, -lambda_min(rho^{T_B}))``;
both routes are computed by :func:`structured_negativity_paths`.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import matcore
from .errors import DimensionMismatch, NotNormalized
from .qstate import BipartiteState, partial_transpose, realign

ZERO_CLAMP = 1e-9
NEGATIVE_EIG_TOL = 1e-9
SEPARABILITY_TOL = 1e-9
NORM_TOL = 1e-9

SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])


def spa_threshold(d: int) -> float:
    return d / (d**3 + 1)


def _clamp(x: float) -> float:
    return 0.0 if abs(x) <= ZERO_CLAMP else float(x)


def pt_spectrum(s: BipartiteState) -> np.ndarray:
    return matcore.eigvals_hermitian(partial_transpose(s.rho, s.d))


def negativity_from_spectrum(eigs, d: int) -> float:
    return _clamp(2.0 / (d - 1) * -np.sum(eigs[eigs < 0]))


def negativity(s: BipartiteState) -> float:
    """Negativity ``(||rho^{T_B}||_1 - 1) / (d - 1)``.

    Computed from the trace norm; the negative-eigenvalue form is
    :func:`negativity_from_spectrum`. Values within 1e-9 of zero are
    reported as exactly 0.
    """
    tn = matcore.trace_norm(partial_transpose(s.rho, s.d))
    return _clamp((tn - 1.0) / (s.d - 1))


def q_count(s: BipartiteState) -> int:
    """Number of partial-transpose eigenvalues below -1e-9."""
    return int(np.count_nonzero(pt_spectrum(s) < -NEGATIVE_EIG_TOL))


def spa_pt_matrix(rho, d: int) -> np.ndarray:
    """SPA-PT of an arbitrary (possibly unnormalized) ``d^2 x d^2`` operator."""
    c = 1.0 / (d**3 + 1)
    return d * c * np.eye(d * d) + c * partial_transpose(rho, d)


def spa_pt(s: BipartiteState) -> BipartiteState:
    return BipartiteState(s.d, spa_pt_matrix(s.rho, s.d))


def lambda_min_spa(s: BipartiteState) -> float:
    return float(matcore.eigvals_hermitian(spa_pt_matrix(s.rho, s.d))[0])


def is_separable_spa(s: BipartiteState) -> bool:
    return lambda_min_spa(s) >= spa_threshold(s.d) - SEPARABILITY_TOL


def structured_negativity_of_matrix(rho, d: int) -> float:
    """``K * max(d/(d^3+1) - lambda_min(spa), 0)`` for any Hermitian operator.

    Accepts unnormalized operators, which the LOCC checks need.
    """
    lam = matcore.eigvals_hermitian(spa_pt_matrix(rho, d))[0]
    k = d * (d**3 + 1)
    return _clamp(k * max(spa_threshold(d) - lam, 0.0))


def structured_negativity(s: BipartiteState) -> float:
    return structured_negativity_of_matrix(s.rho, s.d)


def structured_negativity_paths(s: BipartiteState) -> tuple[float, float]:
    """Structured negativity via the SPA-PT spectrum and via the bare PT spectrum."""
    via_spa = structured_negativity(s)
    via_pt = _clamp(s.d * max(0.0, -pt_spectrum(s)[0]))
    return via_spa, via_pt


def _reduced_purity(psi, d: int) -> float:
    psi = np.asarray(psi, dtype=np.complex128).ravel()
    if psi.size != d * d:
        raise DimensionMismatch(f"state vector has length {psi.size}, expected {d * d}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > NORM_TOL:
        raise NotNormalized(f"||psi|| = {norm:.12g}")
    m = psi.reshape(d, d)
    rho_a = m @ m.conj().T
    return float(np.real(np.trace(rho_a @ rho_a)))


def concurrence_pure_2q(psi) -> float:
    """``sqrt(2 (1 - tr rho_A^2))`` for a normalized two-qubit vector."""
    return math.sqrt(max(0.0, 2.0 * (1.0 - _reduced_purity(psi, 2))))


def concurrence_pure_general(psi, nu_a: float = 1.0, nu_b: float = 1.0) -> float:
    """Generalized pure-state concurrence ``sqrt(2 nu_a nu_b (1 - tr rho_A^2))``.

    ``psi`` must have length ``d**2``. With the default ``nu_a = nu_b = 1``
    the d = 2 value equals :func:`concurrence_pure_2q`.
    """
    psi = np.asarray(psi, dtype=np.complex128).ravel()
    d = math.isqrt(psi.size)
    if d * d != psi.size or d < 2:
        raise DimensionMismatch(f"length {psi.size} is not d^2 for an integer d >= 2")
    return math.sqrt(max(0.0, 2.0 * nu_a * nu_b * (1.0 - _reduced_purity(psi, d))))


def _factor(rho) -> np.ndarray:
    """``Psi`` with ``rho = Psi Psi^dagger``, dropping numerically-zero eigenvalues."""
    w, v = matcore.eigh_hermitian(rho)
    keep = w > 16 * np.finfo(float).eps * max(w[-1], 0.0)
    return v[:, keep] * np.sqrt(w[keep])


def concurrence_wootters(s: BipartiteState, conjugate: bool = True) -> float:
    """Wootters concurrence of a two-qubit state.

    With ``rho = Psi Psi^dagger``, the square roots of the eigenvalues of
    ``rho (Y x Y) conj(rho) (Y x Y)`` are the singular values of
    ``Psi^dagger (Y x Y) conj(Psi)``. Working with the factor avoids taking
    square roots of round-off-sized eigenvalues. ``conjugate=False`` drops
    the complex conjugation in the spin flip, for comparison only.
    """
    if s.d != 2:
        raise DimensionMismatch(f"Wootters concurrence needs d = 2, got d = {s.d}")
    yy = np.kron(SIGMA_Y, SIGMA_Y).real
    psi = _factor(s.rho)
    tau = psi.conj().T @ yy @ (psi.conj() if conjugate else psi)
    r = np.zeros(4)
    sv = matcore.singular_values(tau)
    r[: sv.size] = sv
    return max(0.0, float(r[0] - r[1] - r[2] - r[3]))


def concurrence_lower_bound(s: BipartiteState) -> float:
    """Albeverio-type bound ``sqrt(2/(d(d-1))) (max(||rho^{T_B}||_1, ||R(rho)||_1) - 1)``, clamped at 0."""
    d = s.d
    tn_pt = matcore.trace_norm(partial_transpose(s.rho, d))
    tn_r = matcore.trace_norm(realign(s.rho, d))
    return max(0.0, math.sqrt(2.0 / (d * (d - 1))) * (max(tn_pt, tn_r) - 1.0))


@dataclass(frozen=True)
class MeasureReport:
    d: int
    negativity: float
    structured_negativity: float
    c_lb: float
    q_count: int
    lambda_min_pt: float
    lambda_min_spa: float
    spa_threshold: float
    separable_by_spa: bool

    def to_dict(self) -> dict:
        return asdict(self)

    def check(self, tol: float = 1e-9) -> list[str]:
        """Names of violated report invariants (empty when consistent)."""
        bad = []
        if self.separable_by_spa != (self.lambda_min_spa >= self.spa_threshold - tol):
            bad.append("separable_by_spa")
        # the separability tolerance acts on lambda, N_S scales it by K
        k = self.d * (self.d**3 + 1)
        if self.separable_by_spa and self.structured_negativity > k * tol:
            bad.append("structured_negativity_zero")
        if not self.separable_by_spa and self.structured_negativity <= 0.0:
            bad.append("structured_negativity_zero")
        if self.negativity > 2.0 * (1.0 - 1.0 / self.d) * self.structured_negativity + tol:
            bad.append("result1")
        if min(self.negativity, self.structured_negativity, self.c_lb) < 0 or self.q_count < 0:
            bad.append("nonnegative")
        return bad


def measure_report(s: BipartiteState) -> MeasureReport:
    d = s.d
    pt = partial_transpose(s.rho, d)
    pt_eigs = matcore.eigvals_hermitian(pt)
    lam_spa = float(matcore.eigvals_hermitian(spa_pt_matrix(s.rho, d))[0])
    k = d * (d**3 + 1)
    threshold = spa_threshold(d)
    return MeasureReport(
        d=d,
        negativity=negativity(s),
        structured_negativity=_clamp(k * max(threshold - lam_spa, 0.0)),
        c_lb=concurrence_lower_bound(s),
        q_count=int(np.count_nonzero(pt_eigs < -NEGATIVE_EIG_TOL)),
        lambda_min_pt=float(pt_eigs[0]),
        lambda_min_spa=lam_spa,
        spa_threshold=threshold,
        separable_by_spa=bool(lam_spa >= threshold - SEPARABILITY_TOL),
    )

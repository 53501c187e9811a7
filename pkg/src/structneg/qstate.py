"""Bipartite density operators on d x d systems.

Basis ordering is row-major with subsystem A first: ``|ij>`` has index
``i*d + j``. This module holds the validated state type, the partial
transpose and realignment rearrangements, the example families, random
generators, and the JSON state-file format.

Random generators take ``seed`` as anything ``numpy.random.default_rng``
accepts (an int, a sequence of ints, a ``SeedSequence`` or a ``Generator``).
An int or int sequence makes the draw a pure function of the seed; passing
a ``Generator`` continues that stream.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import matcore
from .errors import ParameterOutOfRange, StateValidationError

STATE_TOL = 1e-8
PSD_TOL = 1e-10
KRAUS_TOL = 1e-8
MAX_LOCAL_DIM = 8

FAMILIES = ("werner", "mems", "rho_a", "rho_alpha", "max_entangled")

# legal parameter interval per family
FAMILY_RANGES = {
    "werner": (0.0, 1.0),
    "mems": (0.0, 1.0),
    "rho_a": (1.0 / math.sqrt(2.0), 1.0),
    "rho_alpha": (2.0, 5.0),
}

FAMILY_PARAMETER = {"werner": "F", "mems": "C", "rho_a": "a", "rho_alpha": "alpha"}


def validate_density(rho, d: int) -> np.ndarray:
    """Return ``rho`` as a complex array after checking density invariants.

    Raises ``StateValidationError`` naming the first failed invariant.
    """
    if not isinstance(d, (int, np.integer)) or d < 2 or d > MAX_LOCAL_DIM:
        raise StateValidationError("dimension", f"local dimension must be in [2, {MAX_LOCAL_DIM}], got {d}")
    try:
        arr = np.asarray(rho, dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise StateValidationError("shape", str(exc)) from exc
    n = d * d
    if arr.shape != (n, n):
        raise StateValidationError("shape", f"expected {n}x{n}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise StateValidationError("finite", "matrix has NaN or Inf entries")
    herr = matcore.hermiticity_error(arr)
    if herr > STATE_TOL:
        raise StateValidationError("hermitian", f"max|rho - rho^dagger| = {herr:.3e}")
    tr = np.trace(arr).real
    if abs(tr - 1.0) > STATE_TOL:
        raise StateValidationError("trace", f"trace = {tr:.12g}, expected 1")
    lmin = matcore.eigvals_hermitian(arr)[0]
    if lmin < -PSD_TOL * n:
        raise StateValidationError("psd", f"minimum eigenvalue {lmin:.3e} is negative")
    return arr


@dataclass(frozen=True, eq=False)
class BipartiteState:
    """A density operator on a d x d bipartite system.

    Construction validates the operator: Hermitian and unit trace within
    1e-8, and minimum eigenvalue no lower than ``-1e-10 * d**2``.
    """

    d: int
    rho: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = validate_density(self.rho, self.d)
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "rho", arr)

    @property
    def dim(self) -> int:
        return self.d * self.d


# --------------------------------------------------------------------------
# rearrangements
# --------------------------------------------------------------------------

def partial_transpose(rho, d: int) -> np.ndarray:
    """Transpose subsystem B of a ``d**2 x d**2`` matrix.

    Output entry ``(i*d + j, k*d + l)`` is input entry ``(i*d + l, k*d + j)``.
    No validation, so it applies to unnormalized operators too.
    """
    m = np.asarray(rho, dtype=np.complex128)
    return m.reshape(d, d, d, d).transpose(0, 3, 2, 1).reshape(d * d, d * d)


def partial_transpose_b(s: BipartiteState) -> np.ndarray:
    return partial_transpose(s.rho, s.d)


def realign(rho, d: int) -> np.ndarray:
    """Realignment: output ``(i*d + j, k*d + l)`` is input ``(i*d + k, j*d + l)``."""
    m = np.asarray(rho, dtype=np.complex128)
    return m.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d * d, d * d)


def unrealign(r, d: int) -> np.ndarray:
    """Inverse of :func:`realign`."""
    # the index permutation (0, 2, 1, 3) is its own inverse
    return realign(r, d)


def realignment(s: BipartiteState) -> np.ndarray:
    return realign(s.rho, s.d)


def reduced_state_a(rho, d: int) -> np.ndarray:
    """Partial trace over subsystem B."""
    m = np.asarray(rho, dtype=np.complex128).reshape(d, d, d, d)
    return np.einsum("ijkj->ik", m)


# --------------------------------------------------------------------------
# example families
# --------------------------------------------------------------------------

def _check_range(name: str, value: float, lo: float, hi: float, slack: float = 1e-12):
    if not (lo - slack <= value <= hi + slack):
        raise ParameterOutOfRange(f"{name} = {value!r} outside [{lo:.12g}, {hi:.12g}]")


def _ket(d: int, *pairs) -> np.ndarray:
    """Unnormalized vector ``sum coeff |i j>`` from ``(i, j, coeff)`` triples."""
    v = np.zeros(d * d, dtype=np.complex128)
    for i, j, c in pairs:
        v[i * d + j] += c
    return v


def _proj(v) -> np.ndarray:
    return np.outer(v, v.conj())


def singlet() -> np.ndarray:
    """State vector ``(|01> - |10>)/sqrt(2)``."""
    return _ket(2, (0, 1, 1.0), (1, 0, -1.0)) / math.sqrt(2.0)


def werner(F: float) -> BipartiteState:
    """Two-qubit Werner state ``F |psi-><psi-| + (1-F) I/4``, ``0 <= F <= 1``."""
    _check_range("F", F, 0.0, 1.0)
    rho = F * _proj(singlet()) + (1.0 - F) * np.eye(4) / 4.0
    return BipartiteState(2, rho)


def mems_h(C: float) -> float:
    return C / 2.0 if C >= 2.0 / 3.0 else 1.0 / 3.0


def mems(C: float) -> BipartiteState:
    """Munro maximally entangled mixed state with concurrence ``C``.

    ``h(C) = C/2`` for ``C >= 2/3`` and ``1/3`` below; the coherence ``C/2``
    sits between ``|00>`` and ``|11>``.
    """
    _check_range("C", C, 0.0, 1.0)
    h = mems_h(C)
    rho = np.zeros((4, 4), dtype=np.complex128)
    rho[0, 0] = rho[3, 3] = h
    rho[1, 1] = 1.0 - 2.0 * h
    rho[0, 3] = rho[3, 0] = C / 2.0
    return BipartiteState(2, rho)


def rho_a(a: float) -> BipartiteState:
    """Two-qutrit state ``sum_i |psi_i><psi_i| / (5 + 2a^2)``, ``1/sqrt2 <= a <= 1``.

    The vectors are left unnormalized: ``|01> - a|10>``, ``|02> - a|20>`` and
    ``|00> + |11> + |22>``, which is what makes the prefactor give unit trace.
    """
    _check_range("a", a, 1.0 / math.sqrt(2.0), 1.0)
    psis = (
        _ket(3, (0, 1, 1.0), (1, 0, -a)),
        _ket(3, (0, 2, 1.0), (2, 0, -a)),
        _ket(3, (0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0)),
    )
    rho = sum(_proj(p) for p in psis) / (5.0 + 2.0 * a * a)
    return BipartiteState(3, rho)


def rho_alpha(alpha: float) -> BipartiteState:
    """Horodecki two-qutrit state ``2/7 P+ + alpha/7 sigma+ + (5-alpha)/7 sigma-``."""
    _check_range("alpha", alpha, 2.0, 5.0)
    psi_plus = _ket(3, (0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0)) / math.sqrt(3.0)
    sigma_plus = sum(_proj(_ket(3, (i, j, 1.0))) for i, j in ((0, 1), (1, 2), (2, 0))) / 3.0
    sigma_minus = sum(_proj(_ket(3, (i, j, 1.0))) for i, j in ((1, 0), (2, 1), (0, 2))) / 3.0
    rho = (2.0 / 7.0) * _proj(psi_plus) + (alpha / 7.0) * sigma_plus + ((5.0 - alpha) / 7.0) * sigma_minus
    return BipartiteState(3, rho)


def max_entangled_vector(d: int) -> np.ndarray:
    return _ket(d, *((i, i, 1.0) for i in range(d))) / math.sqrt(d)


def max_entangled(d: int) -> BipartiteState:
    """Projector onto ``(1/sqrt d) sum_i |ii>``, ``2 <= d <= 8``."""
    if not isinstance(d, (int, np.integer)) or not 2 <= d <= MAX_LOCAL_DIM:
        raise ParameterOutOfRange(f"d = {d!r} outside [2, {MAX_LOCAL_DIM}]")
    return BipartiteState(int(d), _proj(max_entangled_vector(d)))


def family_state(family: str, param: float | None = None, d: int = 2) -> BipartiteState:
    """Build a named family member; ``d`` is only read for ``max_entangled``."""
    if family == "werner":
        return werner(param)
    if family == "mems":
        return mems(param)
    if family == "rho_a":
        return rho_a(param)
    if family == "rho_alpha":
        return rho_alpha(param)
    if family == "max_entangled":
        return max_entangled(d)
    raise ParameterOutOfRange(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")


# --------------------------------------------------------------------------
# random objects
# --------------------------------------------------------------------------

def ginibre(shape, rng) -> np.ndarray:
    """Matrix of independent standard complex Gaussians (unit variance)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def _random_density_matrix(n: int, rank: int, rng) -> np.ndarray:
    g = ginibre((n, rank), rng)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_density(d: int, rank: int, seed) -> BipartiteState:
    """Induced-measure random state: ``G G^dagger / tr(G G^dagger)``, G of shape ``d^2 x rank``."""
    if not 1 <= rank <= d * d:
        raise ParameterOutOfRange(f"rank must be in [1, {d * d}], got {rank}")
    rng = np.random.default_rng(seed)
    return BipartiteState(d, _random_density_matrix(d * d, rank, rng))


def random_separable(d: int, n_terms: int, seed, pure_locals: bool = False) -> BipartiteState:
    """Random convex mixture of ``n_terms`` product states.

    Local factors are full-rank induced-measure states, or random pure states
    when ``pure_locals`` is set; weights are uniform on the simplex.
    """
    if n_terms < 1:
        raise ParameterOutOfRange(f"n_terms must be >= 1, got {n_terms}")
    rng = np.random.default_rng(seed)
    local_rank = 1 if pure_locals else d
    weights = rng.dirichlet(np.ones(n_terms))
    rho = np.zeros((d * d, d * d), dtype=np.complex128)
    for p in weights:
        rho_a_k = _random_density_matrix(d, local_rank, rng)
        rho_b_k = _random_density_matrix(d, local_rank, rng)
        rho += p * np.kron(rho_a_k, rho_b_k)
    return BipartiteState(d, rho)


def haar_unitary(n: int, rng) -> np.ndarray:
    """Haar unitary from the QR decomposition of a Ginibre matrix.

    The phases of ``diag(R)`` are folded into ``Q`` so the result is Haar
    distributed rather than biased by the QR sign convention.
    """
    q, r = np.linalg.qr(ginibre((n, n), rng))
    diag = r.diagonal()
    return q * (diag / np.abs(diag))


def random_local_unitary(d: int, seed) -> np.ndarray:
    return haar_unitary(d, np.random.default_rng(seed))


@dataclass(frozen=True, eq=False)
class KrausSet:
    """Kraus operators of a local operation; validated for completeness."""

    operators: tuple

    def __post_init__(self):
        ops = tuple(matcore.as_matrix(k) for k in self.operators)
        if len(ops) < 2:
            raise StateValidationError("count", f"need at least 2 Kraus operators, got {len(ops)}")
        d = ops[0].shape[0]
        if any(k.shape != (d, d) for k in ops):
            raise StateValidationError("shape", "Kraus operators must all be d x d")
        resid = self.completeness_residual_of(ops)
        if resid > KRAUS_TOL:
            raise StateValidationError("completeness", f"max|sum K^dagger K - I| = {resid:.3e}")
        object.__setattr__(self, "operators", ops)

    @staticmethod
    def completeness_residual_of(ops) -> float:
        d = ops[0].shape[0]
        total = sum(k.conj().T @ k for k in ops)
        return float(np.max(np.abs(total - np.eye(d))))

    @property
    def count(self) -> int:
        return len(self.operators)

    @property
    def d(self) -> int:
        return self.operators[0].shape[0]

    def completeness_residual(self) -> float:
        return self.completeness_residual_of(self.operators)


def random_kraus_set(d: int, m: int, seed) -> KrausSet:
    """Random ``m``-outcome operation built from the first d columns of a Haar unitary on ``m*d``."""
    if m < 2:
        raise ParameterOutOfRange(f"m must be >= 2, got {m}")
    u = haar_unitary(m * d, np.random.default_rng(seed))
    iso = u[:, :d]
    return KrausSet(tuple(iso[i * d:(i + 1) * d, :].copy() for i in range(m)))


def local_conjugate(s: BipartiteState, u_a, u_b) -> BipartiteState:
    u = np.kron(u_a, u_b)
    return BipartiteState(s.d, u @ s.rho @ u.conj().T)


def mixture(states, weights) -> BipartiteState:
    weights = np.asarray(weights, dtype=float)
    d = states[0].d
    rho = sum(w * s.rho for w, s in zip(weights, states))
    return BipartiteState(d, rho)


# --------------------------------------------------------------------------
# state file format
# --------------------------------------------------------------------------

def state_to_dict(s: BipartiteState) -> dict:
    return {
        "d": s.d,
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in s.rho],
    }


def state_from_dict(doc) -> BipartiteState:
    if not isinstance(doc, dict) or "d" not in doc or "matrix" not in doc:
        raise StateValidationError("format", "state document needs fields 'd' and 'matrix'")
    d = doc["d"]
    if isinstance(d, bool) or not isinstance(d, int):
        raise StateValidationError("dimension", f"'d' must be an integer, got {d!r}")
    try:
        arr = np.array([[complex(re, im) for re, im in row] for row in doc["matrix"]], dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise StateValidationError("format", f"matrix entries must be [re, im] pairs ({exc})") from exc
    return BipartiteState(d, arr)


def save_state(s: BipartiteState, path) -> None:
    # json writes floats with repr, which round-trips doubles exactly
    Path(path).write_text(json.dumps(state_to_dict(s)) + "\n", encoding="utf-8")


def load_state(path) -> BipartiteState:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise StateValidationError("format", f"not valid JSON: {exc}") from exc
    return state_from_dict(doc)

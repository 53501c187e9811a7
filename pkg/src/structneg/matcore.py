"""Dense complex matrix helpers and Hermitian spectral routines.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``; every
function here is pure and never mutates its arguments. Dimensions are small
(at most 64), so the emphasis is on reproducibility rather than speed.

Two Hermitian eigensolvers are available: LAPACK (``numpy.linalg.eigh``, the
default) and a cyclic complex Jacobi scheme written in numpy. They share no
code, so each can serve as an oracle for the other.
"""

from __future__ import annotations

import numpy as np

from .errors import IndexOutOfRange, NoConvergence, NonHermitianInput

HERMITIAN_TOL = 1e-8
MAX_SWEEPS = 100
MAX_DIM = 64
WEYL_SLACK = 1e-10


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` to a finite 2-D complex128 array."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def adjoint(m) -> np.ndarray:
    return as_matrix(m).conj().T.copy()


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def hermiticity_error(m) -> float:
    """Largest elementwise deviation ``max|m - m^dagger|``."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        return np.inf
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def _checked_hermitian(m, tol: float) -> np.ndarray:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise NonHermitianInput(f"matrix is not square: {m.shape}")
    err = hermiticity_error(m)
    if err > tol:
        raise NonHermitianInput(f"max|m - m^dagger| = {err:.3e} exceeds {tol:.1e}")
    return 0.5 * (m + m.conj().T)


def jacobi_eigh(m, max_sweeps: int = MAX_SWEEPS):
    """Cyclic Jacobi diagonalization of a complex Hermitian matrix.

    Each rotation first strips the phase of the pivot ``a[p, q]`` and then
    applies the classical real Jacobi rotation, so the 2x2 update is the
    unitary ``[[c, s], [-s e^{-i phi}, c e^{-i phi}]]``.

    Parameters
    ----------
    m : array_like
        Hermitian matrix. Only the Hermitian part is used.
    max_sweeps : int
        Number of full cyclic sweeps allowed before giving up.

    Returns
    -------
    w : ndarray
        Eigenvalues in ascending order.
    v : ndarray
        Unitary matrix whose columns are the matching eigenvectors.

    Raises
    ------
    NoConvergence
        If the off-diagonal mass is still above threshold after
        ``max_sweeps`` sweeps.
    """
    a = np.array(m, dtype=np.complex128)
    a = 0.5 * (a + a.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    scale = np.linalg.norm(a)
    if n < 2 or scale == 0.0:
        w = a.diagonal().real.copy()
        order = np.argsort(w, kind="stable")
        return w[order], v[:, order]

    # off-diagonal Frobenius mass at which the diagonal is accurate to ~eps
    threshold = np.finfo(float).eps * scale
    iu = np.triu_indices(n, 1)
    for _ in range(max_sweeps):
        off = np.sqrt(2.0 * np.sum(np.abs(a[iu]) ** 2))
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = rot.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ rot
    else:
        off = np.sqrt(2.0 * np.sum(np.abs(a[iu]) ** 2))
        if off > threshold:
            raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps (off={off:.3e})")

    w = a.diagonal().real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def eigh_hermitian(m, tol: float = HERMITIAN_TOL, method: str = "lapack"):
    """Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.

    The input must satisfy ``max|m - m^dagger| <= tol``; it is then replaced
    by its Hermitian part before solving. ``method`` is ``"lapack"`` or
    ``"jacobi"``.
    """
    h = _checked_hermitian(m, tol)
    if h.shape[0] > MAX_DIM:
        raise ValueError(f"dimension {h.shape[0]} exceeds {MAX_DIM}")
    if method == "jacobi":
        return jacobi_eigh(h)
    if method != "lapack":
        raise ValueError(f"unknown eigensolver method {method!r}")
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return w, v


def eigvals_hermitian(m, tol: float = HERMITIAN_TOL, method: str = "lapack") -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, sorted ascending.

    Raises ``NonHermitianInput`` when the symmetry check fails and
    ``NoConvergence`` when the solver gives up.
    """
    h = _checked_hermitian(m, tol)
    if h.shape[0] > MAX_DIM:
        raise ValueError(f"dimension {h.shape[0]} exceeds {MAX_DIM}")
    if method == "jacobi":
        return jacobi_eigh(h)[0]
    if method != "lapack":
        raise ValueError(f"unknown eigensolver method {method!r}")
    try:
        return np.linalg.eigvalsh(h)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc


def singular_values(m) -> np.ndarray:
    """Singular values of a square matrix, sorted descending."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix is not square: {m.shape}")
    try:
        s = np.linalg.svd(m, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return np.sort(s)[::-1]


def trace_norm(m) -> float:
    return float(np.sum(singular_values(m)))


def weyl_margins(a, b, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Slack of every valid Weyl inequality for the pair ``(a, b)``.

    Entry ``[k-1, j]`` holds ``lambda_{k+j}(a) + lambda_{n-j}(b) - lambda_k(a+b)``
    (1-based, ascending eigenvalues) for ``k >= 1, j >= 0, k+j <= n``; invalid
    cells are ``nan``.
    """
    la = eigvals_hermitian(a, tol)
    lb = eigvals_hermitian(b, tol)
    lab = eigvals_hermitian(as_matrix(a) + as_matrix(b), tol)
    n = la.size
    if lb.size != n:
        raise ValueError("a and b must have the same dimension")
    out = np.full((n, n), np.nan)
    for k in range(1, n + 1):
        for j in range(0, n - k + 1):
            out[k - 1, j] = la[k + j - 1] + lb[n - j - 1] - lab[k - 1]
    return out


def weyl_holds(a, b, k: int, j: int) -> bool:
    """Check ``lambda_k(a+b) <= lambda_{k+j}(a) + lambda_{n-j}(b)``.

    Indices are 1-based with eigenvalues in increasing order; a slack of
    1e-10 absorbs round-off.
    """
    n = as_matrix(a).shape[0]
    if k < 1 or j < 0 or k + j > n:
        raise IndexOutOfRange(f"need 1 <= k and k + j <= n, got k={k}, j={j}, n={n}")
    la = eigvals_hermitian(a)
    lb = eigvals_hermitian(b)
    lab = eigvals_hermitian(as_matrix(a) + as_matrix(b))
    return bool(lab[k - 1] <= la[k + j - 1] + lb[n - j - 1] + WEYL_SLACK)

"""Dense complex linear algebra on numpy ``complex128`` arrays.

All matrices are plain 2-D numpy arrays. Block conventions: a matrix on
``C^p (x) C^q`` is a ``p x p`` array of ``q x q`` blocks, block ``(i, j)``
occupying rows ``i*q:(i+1)*q`` and columns ``j*q:(j+1)*q`` (this is what
``np.kron`` produces).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NoConvergence, NonHermitianInput

PSD_TOL = 1e-9
HERMITIAN_TOL = 1e-12
EIG_TOL = 1e-9
VECTOR_COND_LIMIT = 1e8


@dataclass(frozen=True)
class EigResult:
    values: np.ndarray
    vectors: Optional[np.ndarray]
    residual: float
    left_vectors: Optional[np.ndarray] = None

    @property
    def min(self) -> float:
        return float(np.real(self.values[0]))

    @property
    def max(self) -> float:
        return float(np.real(self.values[-1]))


def as_matrix(m) -> np.ndarray:
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {arr.shape}")
    return arr


def matrix_unit(i: int, j: int, p: int, q: int | None = None) -> np.ndarray:
    """``E_{ij}`` of size ``p x q`` (``q`` defaults to ``p``)."""
    e = np.zeros((p, p if q is None else q), dtype=complex)
    e[i, j] = 1.0
    return e


def frob(m) -> float:
    return float(np.linalg.norm(m))


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    scale = 1.0 + (float(np.abs(m).max()) if m.size else 0.0)
    return bool(np.abs(m - m.conj().T).max(initial=0.0) <= tol * scale)


def _check_square(m: np.ndarray) -> None:
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")


def _residual(m: np.ndarray, values: np.ndarray, vectors: np.ndarray) -> float:
    if m.size == 0:
        return 0.0
    r = m @ vectors - vectors * values[None, :]
    return float(np.linalg.norm(r, axis=0).max())


def herm_eig(h, tol: float = EIG_TOL, method: str = "lapack") -> EigResult:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.

    ``method="lapack"`` calls ``numpy.linalg.eigh``; ``method="jacobi"`` runs
    the cyclic Jacobi sweep in :func:`jacobi_eigh`. Both report the residual
    ``max_j ||H v_j - lambda_j v_j||`` and raise :class:`NoConvergence` when
    it exceeds ``tol * (1 + ||H||_F)``.
    """
    h = as_matrix(h)
    _check_square(h)
    if not is_hermitian(h):
        raise NonHermitianInput("matrix is not Hermitian within tolerance")
    h = (h + h.conj().T) / 2
    if method == "lapack":
        values, vectors = np.linalg.eigh(h)
    elif method == "jacobi":
        values, vectors = jacobi_eigh(h)
    else:
        raise ValueError(f"unknown method {method!r}")
    res = _residual(h, values, vectors)
    if res > tol * (1.0 + frob(h)):
        raise NoConvergence(f"Hermitian eigensolver residual {res:.3e} above tolerance")
    return EigResult(values=np.asarray(values, dtype=float), vectors=vectors, residual=res)


def jacobi_eigh(h, tol: float = 1e-14, max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi for complex Hermitian matrices.

    Each rotation is a real Givens rotation conjugated by the phase of the
    pivot, so the pivot ``(p, q)`` is annihilated exactly.
    """
    a = np.array(h, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(frob(a), 1e-300)
    for _ in range(max_sweeps):
        off = frob(a - np.diag(np.diag(a)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(1.0 + theta * theta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                rot = np.array([[c, s * phase], [-s * np.conj(phase), c]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = rot.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ rot
    else:
        raise NoConvergence("Jacobi sweep budget exhausted")
    values = np.real(np.diag(a))
    order = np.argsort(values, kind="stable")
    return values[order], v[:, order]


def _sort_key(values: np.ndarray) -> np.ndarray:
    return np.lexsort((np.round(values.imag, 12), np.round(values.real, 12)))


def eig_general(m, left: bool = False, cond_limit: float = VECTOR_COND_LIMIT) -> EigResult:
    """Eigenvalues of a general square matrix (LAPACK Hessenberg + shifted QR).

    Values are sorted by real part, then imaginary part. Eigenvectors are
    dropped (``vectors is None``) when the eigenvector matrix has condition
    number above ``cond_limit``; the residual is then reported as ``nan``.
    """
    m = as_matrix(m)
    _check_square(m)
    if m.size == 0:
        return EigResult(np.zeros(0, dtype=complex), np.zeros((0, 0), dtype=complex), 0.0)
    if not np.all(np.isfinite(m)):
        raise NoConvergence("matrix has non-finite entries")
    try:
        if left:
            values, lvecs, rvecs = scipy.linalg.eig(m, left=True, right=True)
        else:
            values, rvecs = scipy.linalg.eig(m)
            lvecs = None
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NoConvergence(str(exc)) from exc
    order = _sort_key(values)
    values = values[order]
    rvecs = rvecs[:, order]
    if lvecs is not None:
        lvecs = lvecs[:, order]
    if np.linalg.cond(rvecs) > cond_limit:
        return EigResult(values=values, vectors=None, residual=float("nan"))
    return EigResult(values=values, vectors=rvecs, residual=_residual(m, values, rvecs), left_vectors=lvecs)


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def partial_transpose(c, p: int, q: int) -> np.ndarray:
    """Transpose each ``q x q`` block of a ``(pq) x (pq)`` matrix; block positions stay put."""
    c = as_matrix(c)
    if c.shape != (p * q, p * q):
        raise DimensionMismatch(f"expected shape {(p * q, p * q)}, got {c.shape}")
    return c.reshape(p, q, p, q).transpose(0, 3, 2, 1).reshape(p * q, p * q)


def psd_check(h, tol: float = PSD_TOL) -> tuple[bool, float]:
    """Return ``(min_eig >= -tol * (1 + ||H||_F), min_eig)``."""
    h = as_matrix(h)
    if h.size == 0:
        return True, 0.0
    lam = herm_eig(h).min
    return lam >= -tol * (1.0 + frob(h)), lam

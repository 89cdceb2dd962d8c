"""Iterates of a unital / trace-preserving channel and their idempotent limit.

All norms are Frobenius norms of transfer matrices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import Channel, apply, channel_props, scale
from .classify import is_ppt
from .errors import DefectivePeripheralSpectrum, DimensionMismatch, NotPowerBounded, NotScalarUnital
from .matcore import VECTOR_COND_LIMIT, eig_general, frob

NORM_NAME = "frobenius(transfer)"
PERIPHERAL_TOL = 1e-6
IDEMPOTENT_TOL = 1e-7


def normalize_channel(phi: Channel, tol: float = 1e-9) -> Channel:
    """Rescale ``phi`` so that it is unital; requires ``phi(I) = c I`` with ``c > 0``."""
    if phi.p != phi.q:
        raise DimensionMismatch("normalization needs p == q")
    img = apply(phi, np.eye(phi.p))
    c = np.trace(img) / phi.p
    if abs(c.imag) > tol or c.real <= tol or frob(img - c * np.eye(phi.p)) > tol * (1.0 + abs(c)):
        raise NotScalarUnital(f"phi(I) is not a positive multiple of I ({phi.label})")
    c = float(c.real)
    if c == 1.0:
        return phi
    return scale(phi, 1.0 / c, label=f"({phi.label})/{c!r}")


def _check_power_bounded(values: np.ndarray, tol: float) -> None:
    rho = float(np.abs(values).max(initial=0.0))
    if rho > 1.0 + tol:
        raise NotPowerBounded(f"spectral radius {rho:.6g} exceeds 1")


def _spectral_projection(t: np.ndarray, tol: float) -> np.ndarray | None:
    eig = eig_general(t, left=True)
    _check_power_bounded(eig.values, tol)
    mask = np.abs(eig.values) >= 1.0 - tol
    n = t.shape[0]
    if not mask.any():
        return np.zeros((n, n), dtype=complex)
    if eig.vectors is None:
        return None
    right = eig.vectors[:, mask]
    left = eig.left_vectors[:, mask]
    gram = left.conj().T @ right
    if np.linalg.cond(gram) > VECTOR_COND_LIMIT:
        return None
    return right @ np.linalg.solve(gram, left.conj().T)


def _iterative_projection(t: np.ndarray, scan: int = 64, max_power: int = 2 ** 20,
                          cesaro: int = 2000) -> np.ndarray:
    """Idempotent limit point of the powers of ``t`` without eigenvectors.

    Candidate exponents are ``1..scan`` followed by repeated doubling up to
    ``max_power``; the power ``B = t^k`` minimizing ``||t^(2k) - t^k||`` is
    then refined by Cesaro averaging ``(1/J) sum_j B^j`` until it is
    idempotent. The exponent cap matters: a peripheral eigenvalue rounded to
    ``1 - 1e-16`` would otherwise be driven to zero, and the zero matrix is
    trivially idempotent.
    """
    best_err, best = math.inf, None
    m = np.eye(t.shape[0], dtype=complex)
    for _ in range(scan):
        m = m @ t
        err = frob(m @ m - m)
        if err < best_err:
            best_err, best = err, m.copy()
    k = scan
    while 2 * k <= max_power:
        k *= 2
        m2 = m @ m
        if not np.all(np.isfinite(m2)):
            break
        err = frob(m2 - m)
        if err < best_err:
            best_err, best = err, m.copy()
        m = m2
    if best_err <= IDEMPOTENT_TOL:
        return best
    acc = best.copy()
    bj = best.copy()
    for j in range(2, cesaro + 1):
        bj = bj @ best
        acc += bj
        avg = acc / j
        if frob(avg @ avg - avg) <= IDEMPOTENT_TOL:
            return avg
    return acc / cesaro


def peripheral_idempotent(phi: Channel, tol: float = PERIPHERAL_TOL, method: str = "auto") -> Channel:
    """Projection onto the peripheral spectral subspace of ``phi``.

    ``psi`` acts as the identity on the span of eigenvectors with
    ``|lambda| >= 1 - tol`` and as zero on the complementary invariant
    subspace, so ``psi o psi = psi`` and ``psi`` commutes with ``phi``.
    ``method`` is ``"auto"`` (spectral, falling back to iteration),
    ``"spectral"`` or ``"iterative"``.
    """
    if phi.p != phi.q:
        raise DimensionMismatch("iteration needs p == q")
    t = np.asarray(phi.transfer)
    proj = None
    if method in ("auto", "spectral"):
        proj = _spectral_projection(t, tol)
        if proj is not None and not _is_good(proj, t):
            proj = None
    if proj is None and method in ("auto", "iterative"):
        proj = _iterative_projection(t)
        if not _is_good(proj, t):
            proj = None
    if proj is None:
        raise DefectivePeripheralSpectrum("could not build an idempotent limit of the iterates")
    return Channel.from_transfer(proj, phi.p, phi.p, label=f"psi[{phi.label}]")


def _is_good(proj: np.ndarray, t: np.ndarray) -> bool:
    return frob(proj @ proj - proj) <= IDEMPOTENT_TOL and frob(t @ proj - proj @ t) <= IDEMPOTENT_TOL


@dataclass(frozen=True)
class IterationTrace:
    k_values: list
    distances: list
    fitted_rate: float
    psi: Channel
    psi_idempotency_error: float
    psi_commutation_error: float
    psi_is_ppt: bool
    phi_is_ppt: bool
    hypothesis: str
    subdominant_radius: float
    tolerances: dict = field(default_factory=dict)

    @property
    def eb_distance_bound(self) -> bool:
        """Distances bound ``d(phi^k, EB)`` only when the limit ``psi`` is PPT."""
        return self.psi_is_ppt

    def to_dict(self) -> dict:
        return {
            "norm": NORM_NAME,
            "trace": [[k, d] for k, d in zip(self.k_values, self.distances)],
            "fitted_rate": self.fitted_rate,
            "subdominant_radius": self.subdominant_radius,
            "psi_idempotency_error": self.psi_idempotency_error,
            "psi_commutation_error": self.psi_commutation_error,
            "psi_is_ppt": self.psi_is_ppt,
            "phi_is_ppt": self.phi_is_ppt,
            "hypothesis": self.hypothesis,
            "distance_meaning": "EB-distance bound" if self.eb_distance_bound else "distance to phi^k o psi",
            "tolerances": dict(self.tolerances),
        }


def fit_rate(k_values, distances) -> float:
    """``exp`` of the least-squares slope of ``log d_k`` over the tail half."""
    pairs = [(k, d) for k, d in zip(k_values, distances) if d > 0 and math.isfinite(d)]
    half = len(k_values) // 2
    pairs = [(k, d) for k, d in pairs if k >= k_values[half]] if k_values else []
    if len(pairs) < 2:
        return 0.0
    ks = np.array([k for k, _ in pairs], dtype=float)
    logs = np.log([d for _, d in pairs])
    slope = np.polyfit(ks, logs, 1)[0]
    return float(math.exp(slope))


def convergence_report(phi: Channel, K: int, tol: float = PERIPHERAL_TOL, ppt_tol: float = 1e-9) -> IterationTrace:
    """Distances ``||phi^k - phi^k o psi||`` for ``k = 1..K``.

    ``phi`` must be unital or trace preserving. The powers are formed as
    ``((I - P) T (I - P))^k``, which equals ``T^k (I - P)`` because ``P``
    is an idempotent commuting with ``T``, and avoids cancellation against
    the peripheral part once the distances fall below machine epsilon.
    """
    if K < 2:
        raise ValueError("K must be at least 2")
    unital, tp, _ = channel_props(phi)
    if not (unital or tp):
        raise NotScalarUnital("convergence analysis needs a unital or trace-preserving map")
    psi = peripheral_idempotent(phi, tol)
    t = np.asarray(phi.transfer)
    proj = np.asarray(psi.transfer)
    n = t.shape[0]
    comp = np.eye(n) - proj
    step = comp @ t @ comp
    distances = []
    m = np.eye(n, dtype=complex)
    for _ in range(K):
        m = m @ step
        distances.append(frob(m))
    ks = list(range(1, K + 1))

    values = eig_general(t).values
    inner = np.abs(values)[np.abs(values) < 1.0 - tol]
    return IterationTrace(
        k_values=ks,
        distances=distances,
        fitted_rate=fit_rate(ks, distances),
        psi=psi,
        psi_idempotency_error=frob(proj @ proj - proj),
        psi_commutation_error=frob(t @ proj - proj @ t),
        psi_is_ppt=is_ppt(psi, ppt_tol)[0],
        phi_is_ppt=is_ppt(phi, ppt_tol)[0],
        hypothesis="unital" if unital else "trace preserving",
        subdominant_radius=float(inner.max(initial=0.0)),
        tolerances={"peripheral": tol, "idempotent": IDEMPOTENT_TOL, "ppt": ppt_tol},
    )

"""Linear maps ``M_p -> M_q`` held as Choi matrices.

Conventions used throughout the package:

* Choi matrix ``C = sum_{ij} E_ij (x) phi(E_ij)``, a ``p x p`` array of
  ``q x q`` blocks, block ``(i, j)`` equal to ``phi(E_ij)``.
* ``vec`` stacks columns, ``vec(X)[a + p*b] = X[a, b]``.
* Transfer matrix ``T`` (shape ``q^2 x p^2``) with ``vec(phi(X)) = T vec(X)``.
  Under these conventions the Schur map ``S_A`` has ``T = diag(vec A)``.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DimensionMismatch, InvalidAdjacency
from .matcore import as_matrix, frob, is_hermitian, matrix_unit


def vec(x) -> np.ndarray:
    return np.asarray(x).reshape(-1, order="F")


def unvec(v, rows: int, cols: int | None = None) -> np.ndarray:
    return np.asarray(v).reshape((rows, rows if cols is None else cols), order="F")


def choi_to_transfer(c, p: int, q: int) -> np.ndarray:
    c = as_matrix(c)
    if c.shape != (p * q, p * q):
        raise DimensionMismatch(f"Choi matrix must be {(p * q, p * q)}, got {c.shape}")
    # C[(i,k),(j,l)] = phi(E_ij)[k,l] = T[(l,k),(j,i)]
    return c.reshape(p, q, p, q).transpose(3, 1, 2, 0).reshape(q * q, p * p)


def transfer_to_choi(t, p: int, q: int) -> np.ndarray:
    t = as_matrix(t)
    if t.shape != (q * q, p * p):
        raise DimensionMismatch(f"transfer matrix must be {(q * q, p * p)}, got {t.shape}")
    return t.reshape(q, q, p, p).transpose(3, 1, 2, 0).reshape(p * q, p * q)


def reshuffle(c, p: int, q: int) -> np.ndarray:
    """Choi matrix -> transfer matrix. For ``p == q`` this is an involution."""
    return choi_to_transfer(c, p, q)


def validate_adjacency(a) -> np.ndarray:
    """Return ``a`` as a real 0/1 array after the symmetric/hollow checks."""
    arr = np.asarray(a)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InvalidAdjacency(f"adjacency matrix must be square, got shape {arr.shape}")
    if np.iscomplexobj(arr):
        if np.any(arr.imag != 0):
            raise InvalidAdjacency("adjacency matrix has imaginary entries")
        arr = arr.real
    if not np.all((arr == 0) | (arr == 1)):
        raise InvalidAdjacency("adjacency entries must be 0 or 1")
    if np.any(np.diag(arr) != 0):
        raise InvalidAdjacency("adjacency matrix must have a zero diagonal")
    if not np.array_equal(arr, arr.T):
        raise InvalidAdjacency("adjacency matrix must be symmetric")
    return arr.astype(float)


@dataclass(frozen=True, eq=False)
class Channel:
    p: int
    q: int
    choi: np.ndarray
    label: str = ""
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False, compare=False)
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        c = as_matrix(self.choi).copy()
        if c.shape != (self.p * self.q, self.p * self.q):
            raise DimensionMismatch(f"Choi matrix must be {(self.p * self.q,) * 2}, got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "choi", c)

    @classmethod
    def from_transfer(cls, t, p: int, q: int, label: str = "") -> "Channel":
        ch = cls(p, q, transfer_to_choi(t, p, q), label)
        tt = as_matrix(t).copy()
        tt.setflags(write=False)
        ch._cache["transfer"] = tt
        return ch

    @classmethod
    def from_map(cls, fn: Callable[[np.ndarray], np.ndarray], p: int, q: int | None = None,
                 label: str = "") -> "Channel":
        """Build the Choi matrix by applying ``fn`` to every matrix unit of ``M_p``."""
        q = p if q is None else q
        c = np.zeros((p * q, p * q), dtype=complex)
        for i in range(p):
            for j in range(p):
                block = as_matrix(fn(matrix_unit(i, j, p)))
                if block.shape != (q, q):
                    raise DimensionMismatch(f"map returned shape {block.shape}, expected {(q, q)}")
                c[i * q:(i + 1) * q, j * q:(j + 1) * q] = block
        return cls(p, q, c, label)

    @property
    def transfer(self) -> np.ndarray:
        with self._lock:
            t = self._cache.get("transfer")
            if t is None:
                t = choi_to_transfer(self.choi, self.p, self.q)
                t.setflags(write=False)
                self._cache["transfer"] = t
        return t

    @property
    def is_hermitian(self) -> bool:
        return is_hermitian(self.choi)

    def __call__(self, x) -> np.ndarray:
        return apply(self, x)

    def __repr__(self) -> str:
        return f"Channel(p={self.p}, q={self.q}, label={self.label!r})"


def apply(phi: Channel, x) -> np.ndarray:
    x = as_matrix(x)
    if x.shape != (phi.p, phi.p):
        raise DimensionMismatch(f"input must be {(phi.p, phi.p)}, got {x.shape}")
    return unvec(phi.transfer @ vec(x), phi.q)


def compose(phi: Channel, psi: Channel) -> Channel:
    """``phi o psi`` (``psi`` acts first)."""
    if psi.q != phi.p:
        raise DimensionMismatch(f"cannot compose: psi outputs M_{psi.q}, phi takes M_{phi.p}")
    label = f"({phi.label})o({psi.label})" if phi.label or psi.label else ""
    return Channel.from_transfer(phi.transfer @ psi.transfer, psi.p, phi.q, label)


def power(phi: Channel, k: int) -> Channel:
    if phi.p != phi.q:
        raise DimensionMismatch("powers need p == q")
    t = np.linalg.matrix_power(np.asarray(phi.transfer), k)
    return Channel.from_transfer(t, phi.p, phi.p, f"({phi.label})^{k}")


def scale(phi: Channel, c: complex, label: str | None = None) -> Channel:
    return Channel(phi.p, phi.q, c * phi.choi, phi.label if label is None else label)


def add(phi: Channel, psi: Channel, label: str = "") -> Channel:
    if (phi.p, phi.q) != (psi.p, psi.q):
        raise DimensionMismatch("cannot add channels of different shapes")
    return Channel(phi.p, phi.q, phi.choi + psi.choi, label)


def adjoint(phi: Channel) -> Channel:
    """Hilbert-Schmidt adjoint ``M_q -> M_p``; its transfer matrix is ``T^H``."""
    return Channel.from_transfer(np.asarray(phi.transfer).conj().T, phi.q, phi.p, f"({phi.label})*")


def make_identity(p: int) -> Channel:
    return Channel.from_map(lambda x: x, p, label=f"id_{p}")


def make_transpose(p: int) -> Channel:
    return Channel.from_map(lambda x: x.T, p, label=f"T_{p}")


def make_unitary(u) -> Channel:
    u = as_matrix(u)
    return Channel.from_map(lambda x: u @ x @ u.conj().T, u.shape[1], u.shape[0], label="Ad(U)")


def make_delta(p: int) -> Channel:
    """``X -> tr(X) I_p`` with the normalized trace ``tr = Tr / p``."""
    if p < 1:
        raise ValueError("p must be at least 1")
    eye = np.eye(p)
    return Channel.from_map(lambda x: np.trace(x) / p * eye, p, label=f"delta_{p}")


def make_schur(pm) -> Channel:
    pm = as_matrix(pm)
    if pm.shape[0] != pm.shape[1]:
        raise DimensionMismatch("Schur multiplier must be square")
    return Channel.from_map(lambda x: pm * x, pm.shape[0], label="S_P")


def make_gamma(t: float, a) -> Channel:
    """``t * delta + S_A`` for an adjacency matrix ``A``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    a = validate_adjacency(a)
    p = a.shape[0]
    choi = make_delta(p).choi * t + make_schur(a).choi
    edges = [(i, j) for i in range(p) for j in range(i + 1, p) if a[i, j]]
    return Channel(p, p, choi, label=f"gamma(t={float(t)!r}, p={p}, edges={edges})")


def channel_props(phi: Channel, tol: float = 1e-9) -> tuple[bool, bool, bool]:
    """``(unital, trace_preserving, hermiticity_preserving)``."""
    if phi.p != phi.q:
        raise DimensionMismatch("channel_props needs p == q")
    eye = np.eye(phi.p)
    unital = frob(apply(phi, eye) - eye) <= tol
    tp = frob(apply(adjoint(phi), eye) - eye) <= tol
    return bool(unital), bool(tp), phi.is_hermitian


def channel_distance(phi: Channel, psi: Channel) -> float:
    """Frobenius distance between transfer matrices."""
    return frob(np.asarray(phi.transfer) - np.asarray(psi.transfer))

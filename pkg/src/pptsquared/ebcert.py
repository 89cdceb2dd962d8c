"""Exact separability certificates for ``gamma_{pd, A} = pd * delta + S_A``.

Everything here runs on Python integers (and ``Fraction`` for the PSD test);
no floating point value enters a verdict. A certificate states

    scale * C = sum_k w_k L_k (x) R_k + sum_m v_m sum_{(i,j) in D_m} E_ii (x) E_jj

where ``C`` is the Choi matrix of ``gamma_{pd, A}``, every ``L_k, R_k`` is a
positive semidefinite Gaussian-integer matrix and every weight is a positive
integer. Such an identity exhibits ``C`` as separable, so the map is
entanglement breaking.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import numpy as np

from .channel import validate_adjacency

Gauss = tuple[int, int]


def gmul(a: Gauss, b: Gauss) -> Gauss:
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def gconj(a: Gauss) -> Gauss:
    return (a[0], -a[1])


@dataclass(frozen=True)
class GaussianIntMatrix:
    """Sparse matrix of Gaussian integers; zero entries are never stored."""

    rows: int
    cols: int
    entries: tuple = ()  # sorted ((r, c), (re, im)) pairs

    @classmethod
    def from_dict(cls, rows: int, cols: int, d: dict) -> "GaussianIntMatrix":
        for (r, c), z in d.items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise IndexError(f"entry ({r}, {c}) outside a {rows}x{cols} matrix")
            if not all(isinstance(x, int) for x in z):
                raise TypeError("Gaussian integer parts must be int")
        items = tuple(sorted((k, (int(v[0]), int(v[1]))) for k, v in d.items() if v != (0, 0)))
        return cls(rows, cols, items)

    def as_dict(self) -> dict:
        return dict(self.entries)

    def __matmul__(self, other: "GaussianIntMatrix") -> "GaussianIntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        by_row: dict[int, list] = {}
        for (r, c), z in other.entries:
            by_row.setdefault(r, []).append((c, z))
        out: dict = {}
        for (r, k), a in self.entries:
            for c, b in by_row.get(k, ()):
                re, im = out.get((r, c), (0, 0))
                ab = gmul(a, b)
                out[(r, c)] = (re + ab[0], im + ab[1])
        return GaussianIntMatrix.from_dict(self.rows, other.cols, out)

    def scaled(self, n: int) -> "GaussianIntMatrix":
        return GaussianIntMatrix.from_dict(self.rows, self.cols, {k: (n * v[0], n * v[1]) for k, v in self.entries})

    def is_hermitian(self) -> bool:
        d = self.as_dict()
        return self.rows == self.cols and all(d.get((c, r), (0, 0)) == gconj(z) for (r, c), z in self.entries)

    def to_numpy(self) -> np.ndarray:
        m = np.zeros((self.rows, self.cols), dtype=complex)
        for (r, c), (re, im) in self.entries:
            m[r, c] = complex(re, im)
        return m


def exact_is_psd(m: GaussianIntMatrix) -> bool:
    """Exact PSD test by Hermitian Gaussian elimination over Q(i)."""
    if not m.is_hermitian():
        return False
    n = m.rows
    a = [[(Fraction(0), Fraction(0)) for _ in range(n)] for _ in range(n)]
    for (r, c), (re, im) in m.entries:
        a[r][c] = (Fraction(re), Fraction(im))
    alive = list(range(n))
    while alive:
        i = alive.pop(0)
        piv = a[i][i][0]
        if piv < 0:
            return False
        if piv == 0:
            if any(a[i][j] != (0, 0) for j in alive):
                return False
            continue
        for r in alive:
            f = a[r][i]
            if f == (0, 0):
                continue
            for c in alive:
                g = a[i][c]
                if g == (0, 0):
                    continue
                # a[r][c] -= a[r][i] a[i][c] / a[i][i]
                re = f[0] * g[0] - f[1] * g[1]
                im = f[0] * g[1] + f[1] * g[0]
                a[r][c] = (a[r][c][0] - re / piv, a[r][c][1] - im / piv)
    return True


def gkron(a: GaussianIntMatrix, b: GaussianIntMatrix) -> dict:
    out = {}
    for (r1, c1), z1 in a.entries:
        for (r2, c2), z2 in b.entries:
            out[(r1 * b.rows + r2, c1 * b.cols + c2)] = gmul(z1, z2)
    return out


@dataclass(frozen=True)
class ProductTerm:
    left: GaussianIntMatrix
    right: GaussianIntMatrix
    weight: int


@dataclass(frozen=True)
class DiagonalTerm:
    """``weight * sum_{(i,j) in positions} E_ii (x) E_jj``."""

    positions: tuple
    weight: int


Term = Union[ProductTerm, DiagonalTerm]


@dataclass(frozen=True)
class SeparabilityCertificate:
    p: int
    max_degree: int
    scale: int = 8
    terms: tuple = field(default=())

    @property
    def level(self) -> int:
        """The value of ``t`` the certificate speaks about: ``p * d``."""
        return self.p * self.max_degree

    def to_numpy(self) -> np.ndarray:
        """Floating-point rendering of the certificate sum (for cross-checks only)."""
        n = self.p * self.p
        m = np.zeros((n, n), dtype=complex)
        for (r, c), (re, im) in certificate_sum(self).items():
            m[r, c] = complex(re, im)
        return m


def edge_q_matrices(i: int, j: int, p: int) -> tuple[GaussianIntMatrix, ...]:
    """``Q1..Q4`` on the ``{i, j}`` block: ``D + X``, ``D - X``, ``D + Y``, ``D - Y``.

    ``D = E_ii + E_jj``, ``X = E_ij + E_ji``, ``Y = i E_ij - i E_ji``. Each
    satisfies ``Q @ Q == 2 Q``.
    """
    base = {(i, i): (1, 0), (j, j): (1, 0)}
    q1 = {**base, (i, j): (1, 0), (j, i): (1, 0)}
    q2 = {**base, (i, j): (-1, 0), (j, i): (-1, 0)}
    q3 = {**base, (i, j): (0, 1), (j, i): (0, -1)}
    q4 = {**base, (i, j): (0, -1), (j, i): (0, 1)}
    return tuple(GaussianIntMatrix.from_dict(p, p, q) for q in (q1, q2, q3, q4))


def build_certificate(a) -> SeparabilityCertificate:
    """Certificate that ``8 * C`` is separable for ``C`` the Choi matrix of ``gamma_{pd, A}``.

    Per undirected edge ``{i, j}`` the identity
    ``Q1(x)Q1 + Q2(x)Q2 + Q3(x)Q4 + Q4(x)Q3 = 4 (D(x)D + E_ij(x)E_ij + E_ji(x)E_ji)``
    is used with weight 2, contributing ``8 E_ij (x) E_ij + 8 E_ji (x) E_ji``
    plus ``8 D (x) D``. The diagonal remainder ``8d - (product coverage)`` is
    then added position by position, grouped by weight.
    """
    a = validate_adjacency(a)
    p = a.shape[0]
    deg = [int(x) for x in a.sum(axis=1)]
    d = max(deg, default=0)
    scale = 8
    terms: list[Term] = []
    edges = [(i, j) for i in range(p) for j in range(i + 1, p) if a[i, j]]
    for i, j in edges:
        q1, q2, q3, q4 = edge_q_matrices(i, j, p)
        terms += [ProductTerm(q1, q1, 2), ProductTerm(q2, q2, 2),
                  ProductTerm(q3, q4, 2), ProductTerm(q4, q3, 2)]

    padding: dict[int, list] = {}
    for k in range(p):
        for l in range(p):
            if k == l:
                covered = scale * deg[k]
            else:
                covered = scale * int(a[k, l])
            need = scale * d - covered
            if need > 0:
                padding.setdefault(need, []).append((k, l))
    for w in sorted(padding):
        terms.append(DiagonalTerm(tuple(padding[w]), w))
    return SeparabilityCertificate(p=p, max_degree=d, scale=scale, terms=tuple(terms))


def certificate_sum(cert: SeparabilityCertificate) -> dict:
    """Exact sparse sum of all terms, indexed like ``np.kron`` output."""
    p = cert.p
    total: dict = {}

    def acc(key, z):
        re, im = total.get(key, (0, 0))
        re, im = re + z[0], im + z[1]
        if (re, im) == (0, 0):
            total.pop(key, None)
        else:
            total[key] = (re, im)

    for term in cert.terms:
        if isinstance(term, ProductTerm):
            for key, z in gkron(term.left, term.right).items():
                acc(key, (term.weight * z[0], term.weight * z[1]))
        else:
            for i, j in term.positions:
                acc((i * p + j, i * p + j), (term.weight, 0))
    return total


def choi_target(a, scale: int = 8) -> dict:
    """``scale * (d I(x)I + sum_{(i,j) ordered edge} E_ij (x) E_ij)``, exact and sparse."""
    a = validate_adjacency(a)
    p = a.shape[0]
    d = int(a.sum(axis=1).max(initial=0))
    out: dict = {}
    if d:
        for r in range(p * p):
            out[(r, r)] = (scale * d, 0)
    for i in range(p):
        for j in range(p):
            if a[i, j]:
                # E_ij (x) E_ij sits at row i*p+i, column j*p+j
                out[(i * p + i, j * p + j)] = (scale, 0)
    return out


def check_certificate(cert: SeparabilityCertificate, a) -> tuple[bool, str]:
    """Return ``(ok, reason)``; ``reason`` names the first failure found."""
    a = validate_adjacency(a)
    p = a.shape[0]
    if cert.p != p:
        return False, f"certificate dimension {cert.p} does not match graph on {p} vertices"
    if not isinstance(cert.scale, int) or cert.scale <= 0:
        return False, "scale must be a positive integer"
    for n, term in enumerate(cert.terms):
        if not isinstance(term.weight, int) or term.weight <= 0:
            return False, f"term {n}: weight {term.weight!r} is not a positive integer"
        if isinstance(term, ProductTerm):
            for side, f in (("left", term.left), ("right", term.right)):
                if (f.rows, f.cols) != (p, p):
                    return False, f"term {n}: {side} factor has shape {(f.rows, f.cols)}"
                if not exact_is_psd(f):
                    return False, f"term {n}: {side} factor is not positive semidefinite"
        else:
            for i, j in term.positions:
                if not (0 <= i < p and 0 <= j < p):
                    return False, f"term {n}: diagonal position {(i, j)} out of range"

    d = int(a.sum(axis=1).max(initial=0))
    if cert.max_degree != d:
        return False, f"declared max degree {cert.max_degree}, graph has {d}"
    lhs = certificate_sum(cert)
    target = choi_target(a, cert.scale)
    for key in sorted(set(lhs) | set(target)):
        got, want = lhs.get(key, (0, 0)), target.get(key, (0, 0))
        if got != want:
            r, c = key
            return False, (f"mismatch at row {r} (e{r // p}(x)e{r % p}), column {c} "
                           f"(e{c // p}(x)e{c % p}): certificate sum {got}, target {want}")
    return True, "ok"


def verify_certificate(cert: SeparabilityCertificate, a) -> bool:
    return check_certificate(cert, a)[0]


# -- JSON ------------------------------------------------------------------

def _gmat_to_json(m: GaussianIntMatrix) -> dict:
    return {"rows": m.rows, "cols": m.cols,
            "entries": [[r, c, str(re), str(im)] for (r, c), (re, im) in m.entries]}


def _gmat_from_json(obj: dict) -> GaussianIntMatrix:
    d = {(int(r), int(c)): (int(re), int(im)) for r, c, re, im in obj["entries"]}
    return GaussianIntMatrix.from_dict(int(obj["rows"]), int(obj["cols"]), d)


def certificate_to_dict(cert: SeparabilityCertificate) -> dict:
    terms = []
    for t in cert.terms:
        if isinstance(t, ProductTerm):
            terms.append({"kind": "product", "weight": str(t.weight),
                          "left": _gmat_to_json(t.left), "right": _gmat_to_json(t.right)})
        else:
            terms.append({"kind": "diagonal", "weight": str(t.weight),
                          "positions": [[i, j] for i, j in t.positions]})
    return {"p": cert.p, "max_degree": cert.max_degree, "scale": str(cert.scale), "terms": terms}


def certificate_from_dict(obj: dict) -> SeparabilityCertificate:
    terms: list[Term] = []
    for t in obj["terms"]:
        if t["kind"] == "product":
            terms.append(ProductTerm(_gmat_from_json(t["left"]), _gmat_from_json(t["right"]), int(t["weight"])))
        elif t["kind"] == "diagonal":
            terms.append(DiagonalTerm(tuple((int(i), int(j)) for i, j in t["positions"]), int(t["weight"])))
        else:
            raise ValueError(f"unknown term kind {t['kind']!r}")
    return SeparabilityCertificate(p=int(obj["p"]), max_degree=int(obj["max_degree"]),
                                   scale=int(obj["scale"]), terms=tuple(terms))


def certificate_to_json(cert: SeparabilityCertificate) -> str:
    return json.dumps(certificate_to_dict(cert), sort_keys=True)


def certificate_from_json(text: str) -> SeparabilityCertificate:
    return certificate_from_dict(json.loads(text))

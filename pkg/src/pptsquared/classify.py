"""Positivity, CP, PPT and EB-threshold classification for ``gamma_{t,A} = t delta + S_A``."""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional

import numpy as np

from . import ebcert
from .channel import Channel, compose, make_gamma, validate_adjacency
from .errors import DimensionMismatch, NotPPT, ValidationFailure
from .graphs import Graph, graph_report, lovasz_theta_bar
from .matcore import PSD_TOL, as_matrix, frob, herm_eig, is_hermitian, partial_transpose, psd_check

EDGE_CONVENTION = "ordered edges"


def is_cp(phi: Channel, tol: float = PSD_TOL) -> tuple[bool, float]:
    """Choi test: CP iff the Choi matrix is PSD."""
    if not is_hermitian(phi.choi):
        return False, float("nan")
    return psd_check(phi.choi, tol)


def is_ppt(phi: Channel, tol: float = PSD_TOL) -> tuple[bool, float]:
    """CP and the partial transpose of the Choi matrix is PSD.

    Returns the verdict and the least eigenvalue of the partial transpose.
    """
    cp, _ = is_cp(phi, tol)
    pt = partial_transpose(phi.choi, phi.p, phi.q)
    if not is_hermitian(pt):
        return False, float("nan")
    pt_ok, lam = psd_check(pt, tol)
    return cp and pt_ok, lam


class SchurVerdict(str, enum.Enum):
    NOT_CP = "NotCP"
    CP_NOT_PPT = "CPNotPPT"
    PPT = "PPT"


def schur_ppt_classify(pm, tol: float = PSD_TOL) -> SchurVerdict:
    """Classify the Schur multiplier map ``X -> P o X``.

    The map is CP iff ``P >= 0`` and PPT iff additionally ``P`` is diagonal.
    The partial transpose of its Choi matrix carries each off-diagonal
    ``p_ij`` in a ``[[0, p_ij], [conj(p_ij), 0]]`` block, so the off-diagonal
    test uses ``max |p_ij|`` against the same scaled tolerance as the PSD
    check; this keeps the verdict in step with ``is_ppt(make_schur(P))``.
    """
    pm = as_matrix(pm)
    if pm.shape[0] != pm.shape[1]:
        raise DimensionMismatch("Schur multiplier must be square")
    if not is_hermitian(pm) or not psd_check(pm, tol)[0]:
        return SchurVerdict.NOT_CP
    off = np.abs(pm - np.diag(np.diag(pm))).max(initial=0.0)
    if off <= tol * (1.0 + frob(pm)):
        return SchurVerdict.PPT
    return SchurVerdict.CP_NOT_PPT


def bisect_threshold(predicate: Callable[[float], bool], lo: float, hi: float,
                     width: float = 1e-6) -> float:
    """Smallest ``t`` in ``[lo, hi]`` with ``predicate(t)`` true, to within ``width``.

    Assumes the predicate is monotone: false at ``lo``, true at ``hi``.
    """
    if predicate(lo) or not predicate(hi):
        raise ValueError("predicate must be false at lo and true at hi")
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if predicate(mid):
            hi = mid
        else:
            lo = mid
    return hi


# -- t_pos ------------------------------------------------------------------

def _rank_one_objective(a: np.ndarray, v: np.ndarray) -> tuple[float, np.ndarray]:
    w, u = np.linalg.eigh(a * np.outer(v, v.conj()))
    return float(w[0]), u[:, 0]


def t_pos_estimate(a, restarts: int = 64, iters: int = 500, tol: float = 1e-12,
                   seed: int = 0) -> tuple[float, np.ndarray]:
    """Witness-backed lower bound on the positivity threshold ``t_pos``.

    ``gamma_t`` is positive iff ``t/p + lambda_min(A o vv*) >= 0`` for all
    unit ``v``, so ``t_pos = -p min_v lambda_min(A o vv*)``. Every unit
    vector ``v`` therefore certifies ``t_pos >= -p lambda_min(A o vv*)``.

    The minimization runs projected gradient descent on the complex unit
    sphere from ``restarts`` random starts, with step doubling on success and
    halving on failure. For a simple least eigenpair ``(lam, u)`` the
    Wirtinger gradient of ``u*(A o vv*)u`` with respect to ``conj(v)`` is
    ``u o A(conj(u) o v)``. Returns ``(estimate, witness)``; the best start
    wins, ties going to the earlier start.
    """
    a = validate_adjacency(a)
    if not a.any():
        raise ValidationFailure("t_pos_estimate needs a graph with at least one edge")
    p = a.shape[0]
    rng = np.random.default_rng(seed)
    starts = rng.normal(size=(restarts, p)) + 1j * rng.normal(size=(restarts, p))
    starts /= np.linalg.norm(starts, axis=1, keepdims=True)

    best_val, best_v = math.inf, starts[0]
    for v in starts:
        val, u = _rank_one_objective(a, v)
        step = 1.0
        for _ in range(iters):
            grad = 2.0 * u * (a @ (u.conj() * v))
            while step > tol:
                cand = v - step * grad
                cand /= np.linalg.norm(cand)
                cval, cu = _rank_one_objective(a, cand)
                if cval < val:
                    v, val, u = cand, cval, cu
                    step *= 2.0
                    break
                step *= 0.5
            else:
                break
        if val < best_val:
            best_val, best_v = val, v
    # fix the global phase so the first nonzero entry is real and positive
    k = int(np.argmax(np.abs(best_v) > 1e-12))
    best_v = best_v * np.exp(-1j * np.angle(best_v[k]))
    return -p * best_val, best_v


# -- thresholds --------------------------------------------------------------

LOWER_BOUND_NAMES = ("one", "neg_lambda_min", "signless_laplacian", "eb_composition", "theta")


@dataclass(frozen=True)
class ThresholdReport:
    p: int
    ordered_edge_count: int
    max_degree: int
    lambda_min: float
    lambda_max: float
    t_cp: float
    t_ppt: float
    t_eb_upper: float
    t_pos_lower_components: dict
    t_pos_lower: float
    t_pos_numeric: float
    t_pos_witness: Optional[list]
    theta_bar: float
    theta_gap_estimate: float
    ppt_squared_ok: bool
    edge_convention: str = EDGE_CONVENTION

    @property
    def t_pos_bracket(self) -> tuple[float, float]:
        return max(self.t_pos_lower, self.t_pos_numeric), self.t_cp

    @property
    def t_eb_bracket(self) -> tuple[float, float]:
        return self.t_ppt, self.t_eb_upper

    def to_dict(self) -> dict:
        d = asdict(self)
        d["t_pos_bracket"] = list(self.t_pos_bracket)
        d["t_eb_bracket"] = list(self.t_eb_bracket)
        return d


def thresholds(a, *, seed: int = 0, restarts: int = 64, iters: int = 500,
               theta_iters: int = 20000) -> ThresholdReport:
    """Every threshold and bound for the family ``gamma_{t,A}``.

    ``t_cp = t_ppt = -p lambda_min(A)``; ``t_eb`` is bracketed by
    ``[t_ppt, p d]``; ``t_pos`` by ``[max(lower bounds, numeric estimate), t_cp]``.
    The edge count ``|E|`` counts ordered pairs, so it equals the degree sum.
    """
    a = validate_adjacency(a)
    g = Graph.from_adjacency(a)
    rep = graph_report(g)
    p = g.p
    theta = lovasz_theta_bar(g, iters=theta_iters)
    if g.m == 0:
        zeros = {name: 0.0 for name in LOWER_BOUND_NAMES}
        return ThresholdReport(
            p=p, ordered_edge_count=0, max_degree=0, lambda_min=rep.lambda_min,
            lambda_max=rep.lambda_max, t_cp=0.0, t_ppt=0.0, t_eb_upper=0.0,
            t_pos_lower_components=zeros, t_pos_lower=0.0, t_pos_numeric=0.0,
            t_pos_witness=None, theta_bar=theta.value, theta_gap_estimate=theta.gap_estimate,
            ppt_squared_ok=True,
        )

    t_cp = -p * rep.lambda_min
    t_eb_upper = float(p * rep.max_degree)
    components: dict[str, Optional[float]] = {
        "one": 1.0,
        "neg_lambda_min": -rep.lambda_min,
        "signless_laplacian": t_cp / rep.ordered_edge_count,
        "eb_composition": t_cp / t_eb_upper,
        "theta": rep.lambda_max / (theta.value - 1.0) if theta.value - 1.0 > 1e-9 else None,
    }
    t_pos_lower = max(v for v in components.values() if v is not None)
    est, witness = t_pos_estimate(a, restarts=restarts, iters=iters, seed=seed)
    return ThresholdReport(
        p=p,
        ordered_edge_count=rep.ordered_edge_count,
        max_degree=rep.max_degree,
        lambda_min=rep.lambda_min,
        lambda_max=rep.lambda_max,
        t_cp=t_cp,
        t_ppt=t_cp,
        t_eb_upper=t_eb_upper,
        t_pos_lower_components=components,
        t_pos_lower=t_pos_lower,
        t_pos_numeric=est,
        t_pos_witness=[[float(z.real), float(z.imag)] for z in witness],
        theta_bar=theta.value,
        theta_gap_estimate=theta.gap_estimate,
        ppt_squared_ok=t_eb_upper <= t_cp * t_cp,
    )


def t_ppt_value(a) -> float:
    """``-p lambda_min(A)``, or 0 for the empty graph."""
    a = validate_adjacency(a)
    if not a.any():
        return 0.0
    return -a.shape[0] * herm_eig(a).min


# -- PPT-squared check ---------------------------------------------------------

@dataclass(frozen=True)
class Ppt2Result:
    composition_is_gamma: bool
    eb_certified: bool
    branch: str
    t_product: float
    t_eb_upper: float
    max_error: float
    certificate_message: str = ""


def ppt2_verify(a, b, t1: float, t2: float, tol: float = PSD_TOL,
                compose_tol: float = 1e-10) -> Ppt2Result:
    """Check that the composition of two PPT maps of the family is EB.

    Raises :class:`NotPPT` when either input map is not PPT, since the claim
    is then vacuous.
    """
    a = validate_adjacency(a)
    b = validate_adjacency(b)
    if a.shape != b.shape:
        raise DimensionMismatch("both graphs must have the same vertex count")
    ga, gb = make_gamma(t1, a), make_gamma(t2, b)
    for name, gm in (("first", ga), ("second", gb)):
        if not is_ppt(gm, tol)[0]:
            raise NotPPT(f"the {name} map is not PPT at t = {gm.label}")
    prod = t1 * t2
    c = a * b
    composed = compose(ga, gb)
    err = float(np.abs(composed.choi - make_gamma(prod, c).choi).max())
    same = err <= compose_tol
    p = a.shape[0]
    if not c.any():
        # t1 t2 * delta is EB: its Choi matrix (t1 t2 / p) I (x) I is a sum of E_ii (x) E_jj.
        return Ppt2Result(same, same, "trace-map", prod, 0.0, err)
    d = int(c.sum(axis=1).max())
    t_eb = float(p * d)
    ok, msg = ebcert.check_certificate(ebcert.build_certificate(c), c)
    return Ppt2Result(same, same and prod >= t_eb and ok, "certificate", prod, t_eb, err, msg)

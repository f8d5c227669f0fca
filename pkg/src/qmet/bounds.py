"""Scalar precision bounds built from (Q, U) and a weight matrix W.

All bounds are per probe: callers divide by the number of repetitions
themselves.  The chain

    C_S <= C_H <= (1 + T) C_S <= (1 + R) C_S <= 2 C_S

holds for every pure model with invertible Q, where the quantumness
measures are R = ||i Q^-1 U||_inf and
T(W) = ||sqrt(W) Q^-1 U Q^-1 sqrt(W)||_1 / Tr[W Q^-1].

For two-parameter pure qubit models det Q = det U and the Holevo bound
collapses to the closed form Tr[W Q^-1] + 2 sqrt(det[W Q^-1]).

The threshold predicates compare the stepwise bound estimated first-to-
second against C_S, C_T or C_R through an equivalent condition on the
sloppiness s = 1/det Q; each verdict carries both the algebraic test and
the direct numerical comparison so disagreements are visible.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NotApplicable, NotPositiveDefinite, SingularQfim
from .linalg import (
    cholesky,
    determinant,
    lower_inverse,
    nuclear_norm,
    pivot_tol,
    spd_inverse,
)
from .stepwise import csep_ordered

COMPARE_RTOL = 1e-9
PURE_QUBIT_RTOL = 1e-8


@dataclass(frozen=True)
class BoundReport:
    """All scalar bounds of one model evaluation under one weight matrix."""

    c_s: float
    c_t: float
    c_r: float
    c_h_closed: float | None
    sloppiness: float
    quantumness_r: float
    quantumness_t: float
    weight: np.ndarray
    t3_unnormalized: float | None = None

    def to_json(self):
        out = {
            "c_s": self.c_s,
            "c_t": self.c_t,
            "c_r": self.c_r,
            "c_h": self.c_h_closed,
            "R": self.quantumness_r,
            "T": self.quantumness_t,
            "s": self.sloppiness,
        }
        if self.t3_unnormalized is not None:
            out["t3_unnormalized"] = self.t3_unnormalized
        return out


@dataclass(frozen=True)
class ThresholdVerdict:
    """Algebraic sloppiness-threshold test next to the direct bound comparison.

    ``predicate_holds`` evaluates s >= threshold_value; ``direct_comparison``
    checks C_sep(1->2) <= target directly.  ``diagnostic_threshold`` carries
    the alternative closed form of the C_S condition, whose value differs
    from the primary one away from the constraint surface even though both
    predicates agree on actual (Q, U) pairs.
    """

    predicate_holds: bool
    threshold_value: float
    direct_comparison: bool
    diagnostic_threshold: float | None = None

    @property
    def consistent(self):
        return self.predicate_holds == self.direct_comparison


def weight_matrix(w, n):
    """Normalize a weight spec (None, diagonal vector, or full matrix) to n x n."""
    if w is None:
        return np.eye(n)
    w = np.asarray(w, dtype=float)
    if w.ndim == 1:
        if w.shape != (n,):
            raise ValueError(f"expected {n} diagonal weights, got {w.shape}")
        if np.any(w <= 0):
            raise ValueError("weights must be positive")
        return np.diag(w)
    if w.shape != (n, n):
        raise ValueError(f"weight matrix shape {w.shape} does not match n = {n}")
    if np.any(np.linalg.eigvalsh(0.5 * (w + w.T)) <= 0):
        raise ValueError("weight matrix must be positive definite")
    return 0.5 * (w + w.T)


def _qinv(q):
    try:
        return spd_inverse(q)
    except NotPositiveDefinite as exc:
        raise SingularQfim(str(exc)) from exc


def c_sld(q, w=None):
    """SLD quantum Cramer-Rao bound Tr[W Q^-1]."""
    q = np.asarray(q, dtype=float)
    return float(np.trace(weight_matrix(w, q.shape[0]) @ _qinv(q)))


def quantumness_R(q, u):
    """R = ||i Q^-1 U||_inf, the largest eigenvalue of the similar Hermitian pencil.

    Computed as the spectral norm of L^-1 (iU) L^-T with Q = L L^T, which is
    similar to i Q^-1 U but Hermitian.
    """
    q = np.asarray(q, dtype=float)
    u = np.asarray(u, dtype=float)
    try:
        linv = lower_inverse(cholesky(q))
    except NotPositiveDefinite as exc:
        raise SingularQfim(str(exc)) from exc
    k = linv @ (1j * u) @ linv.T
    return float(np.max(np.abs(np.linalg.eigvalsh(k))))


def quantumness_T(q, u, w=None):
    """T(W) = ||sqrt(W) Q^-1 U Q^-1 sqrt(W)||_1 / Tr[W Q^-1]."""
    q = np.asarray(q, dtype=float)
    u = np.asarray(u, dtype=float)
    wm = weight_matrix(w, q.shape[0])
    qinv = _qinv(q)
    evals, evecs = np.linalg.eigh(wm)
    sqrt_w = evecs @ np.diag(np.sqrt(evals)) @ evecs.T
    inner = sqrt_w @ qinv @ u @ qinv @ sqrt_w
    return nuclear_norm(inner) / float(np.trace(wm @ qinv))


def r2_closed(q, u):
    """Two-parameter closed form sqrt(det U / det Q); det U = U_12^2."""
    det_q = determinant(q)
    if det_q <= 0:
        raise SingularQfim("det Q <= 0")
    u = np.asarray(u, dtype=float)
    return float(np.sqrt(u[0, 1] ** 2 / det_q))


def t2_closed(q, u, omega=1.0):
    """Two-parameter closed form 2 sqrt(omega det U) / (Q22 + omega Q11)."""
    q = np.asarray(q, dtype=float)
    u = np.asarray(u, dtype=float)
    det_u = u[0, 1] ** 2
    return float(2.0 * np.sqrt(omega * det_u) / (q[1, 1] + omega * q[0, 0]))


def axial_vector(u):
    """u = (U_23, -U_13, U_12) of a 3 x 3 antisymmetric matrix."""
    u = np.asarray(u, dtype=float)
    return np.array([u[1, 2], -u[0, 2], u[0, 1]])


def r3_closed(q, u):
    """Three-parameter closed form sqrt(u^T Q u / det Q)."""
    det_q = determinant(q)
    if det_q <= 0:
        raise SingularQfim("det Q <= 0")
    v = axial_vector(u)
    return float(np.sqrt(v @ np.asarray(q, dtype=float) @ v / det_q))


def t3_unnormalized_value(q, u, w=None):
    """Three-parameter closed form 2 sqrt(u^T Q W~ Q u) / det Q.

    W~ = diag(w2 w3, w1 w3, w1 w2) for W = diag(w1, w2, w3).  This equals
    the nuclear-norm numerator of T(W), i.e. T(W) times Tr[W Q^-1]: it is
    sometimes quoted as "T_3" directly, but that convention violates
    T <= R (take Q = W = I with |u| = 1), so it is reported as a separate
    diagnostic value and never used as T.
    """
    q = np.asarray(q, dtype=float)
    wm = weight_matrix(w, 3)
    wd = np.diag(wm)
    if not np.allclose(wm, np.diag(wd)):
        raise ValueError("the printed three-parameter form needs a diagonal weight")
    w_tilde = np.diag([wd[1] * wd[2], wd[0] * wd[2], wd[0] * wd[1]])
    det_q = determinant(q)
    if det_q <= 0:
        raise SingularQfim("det Q <= 0")
    v = axial_vector(u)
    return float(2.0 * np.sqrt(v @ q @ w_tilde @ q @ v) / det_q)


def c_t(q, u, w=None):
    """(1 + T(W)) C_S."""
    return (1.0 + quantumness_T(q, u, w)) * c_sld(q, w)


def c_r(q, u, w=None):
    """(1 + R) C_S."""
    return (1.0 + quantumness_R(q, u)) * c_sld(q, w)


def is_pure_qubit_pair(q, u, rtol=PURE_QUBIT_RTOL):
    """True when (Q, U) satisfies the pure-qubit identity det Q = U_12^2."""
    q = np.asarray(q, dtype=float)
    u = np.asarray(u, dtype=float)
    if q.shape != (2, 2):
        return False
    det_q = determinant(q)
    if det_q <= 0:
        return False
    return abs(det_q - u[0, 1] ** 2) <= rtol * max(det_q, u[0, 1] ** 2)


def c_holevo_qubit_pure(q, w=None, u=None):
    """Closed-form Holevo bound Tr[W Q^-1] + 2 sqrt(det[W Q^-1]).

    Valid for two-parameter pure qubit models, where it equals (1 + T) C_S.
    When ``u`` is supplied the pure-qubit certificate det Q = U_12^2 is
    checked and NotApplicable raised on failure.
    """
    q = np.asarray(q, dtype=float)
    if q.shape != (2, 2):
        raise NotApplicable("closed form requires a two-parameter model")
    if u is not None and not is_pure_qubit_pair(q, u):
        raise NotApplicable("det Q = U_12^2 does not hold: not a pure qubit model")
    wm = weight_matrix(w, 2)
    qinv = _qinv(q)
    wq = wm @ qinv
    det_wq = float(np.linalg.det(wq))
    if det_wq < 0:
        raise SingularQfim("det[W Q^-1] < 0")
    return float(np.trace(wq) + 2.0 * np.sqrt(det_wq))


def sloppiness(q):
    """s = 1 / det Q; +inf when the determinant falls below the pivot tolerance."""
    q = np.asarray(q, dtype=float)
    det_q = determinant(q)
    if det_q < pivot_tol(q) or not np.isfinite(det_q):
        return np.inf
    return 1.0 / det_q


def threshold_csep_vs(target, q, u):
    """Does C_sep(1->2) beat the target bound?  Algebraic and direct answers.

    ``target`` is one of "c_s", "c_t", "c_r".  The algebraic route turns the
    comparison into a sloppiness threshold; thresholds that divide by a
    vanishing Q_12 (or by Q_12^2 + 2 Q_22 |U_12| = 0) become +inf, meaning
    the predicate can never hold.
    """
    q = np.asarray(q, dtype=float)
    u = np.asarray(u, dtype=float)
    if q.shape != (2, 2):
        raise ValueError("threshold conditions are defined for n = 2")
    s = sloppiness(q)
    if not np.isfinite(s):
        raise SingularQfim("QFIM is singular")
    q11, q22, q12 = q[0, 0], q[1, 1], q[0, 1]
    u12 = abs(u[0, 1])
    diagnostic = None
    if target == "c_s":
        threshold = 4.0 * q22**2 / q12**4 if q12 != 0.0 else np.inf
        diagnostic = (1.0 + np.sqrt(1.0 + q11 / q22)) ** 2 / q11**2
        bound = c_sld(q)
    elif target == "c_t":
        denom = q12**2 + 2.0 * q22 * u12
        threshold = 4.0 * q22**2 / denom**2 if denom != 0.0 else np.inf
        bound = c_t(q, u)
    elif target == "c_r":
        a = u12 * (q12**2 + q22**2)
        b = q12**2
        c = u12 - 2.0 * q22
        if a == 0.0:
            # no incompatibility: reduces to the C_S condition
            threshold = 4.0 * q22**2 / q12**4 if q12 != 0.0 else np.inf
        elif c >= 0.0:
            threshold = 0.0
        else:
            delta = b**2 - 4.0 * a * c
            threshold = ((np.sqrt(delta) - b) / (2.0 * a)) ** 2
        bound = c_r(q, u)
    else:
        raise ValueError(f"unknown target {target!r}")
    predicate = bool(s >= threshold * (1.0 - COMPARE_RTOL))
    csep12 = csep_ordered(q, (1, 2)).value
    direct = bool(csep12 <= bound * (1.0 + COMPARE_RTOL))
    return ThresholdVerdict(
        predicate_holds=predicate,
        threshold_value=float(threshold),
        direct_comparison=direct,
        diagnostic_threshold=diagnostic,
    )


def compute_report(q, u, w=None):
    """Assemble every scalar bound into a BoundReport.

    The Holevo closed form is filled in only when the pure-qubit
    certificate holds; the printed three-parameter T form is attached for
    n = 3 with diagonal weights.
    """
    q = np.asarray(q, dtype=float)
    u = np.asarray(u, dtype=float)
    n = q.shape[0]
    wm = weight_matrix(w, n)
    c_s = c_sld(q, wm)
    r_val = quantumness_R(q, u)
    t_val = quantumness_T(q, u, wm)
    c_h = None
    if n == 2 and is_pure_qubit_pair(q, u):
        c_h = c_holevo_qubit_pure(q, wm, u)
    t3 = None
    if n == 3 and np.allclose(wm, np.diag(np.diag(wm))):
        t3 = t3_unnormalized_value(q, u, wm)
    return BoundReport(
        c_s=c_s,
        c_t=(1.0 + t_val) * c_s,
        c_r=(1.0 + r_val) * c_s,
        c_h_closed=c_h,
        sloppiness=float(sloppiness(q)),
        quantumness_r=r_val,
        quantumness_t=t_val,
        weight=wm,
        t3_unnormalized=t3,
    )

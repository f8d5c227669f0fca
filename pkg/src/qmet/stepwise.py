"""The stepwise separable bound and its ordering optimization.

A sequential protocol estimates one parameter per step, spending a
fraction gamma_j of the probes on step j while the not-yet-estimated
parameters stay unknown.  For an estimation order sigma the optimal
resource split has the closed form

    C_sep = (sum_j sqrt(A_j))^2,      A_j = det Q_{j+1..n} / det Q_{j..n},

where Q_{j..n} are trailing submatrices of the order-permuted QFIM and
A_j equals [Q_{j..n}^{-1}]_{11}, the single-parameter bound of step j.
The optimal fractions are gamma_j proportional to sqrt(A_j).

The bound depends on the order.  Orderings here are 1-based tuples of
parameter labels, first-estimated first, matching all user-facing
surfaces.  Two search routines find the minimizing order: brute-force
enumeration, and a Bellman-Held-Karp bitmask recursion whose additive
cost is the inverse Cholesky pivot 1/sqrt(q_jj - q_jI Q_II^-1 q_jI)
of appending parameter j to an already-arranged subset I.  Squaring the
optimal accumulated cost recovers the bound.
"""

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .errors import NotPositiveDefinite, SingularQfim, TooManyParameters
from .linalg import (
    _require_symmetric,
    cholesky,
    determinant,
    pivot_tol,
    spd_inverse,
    symmetrize,
)

BRUTE_FORCE_MAX = 8
DP_MAX = 20


@dataclass(frozen=True)
class StepwiseResult:
    """Optimized stepwise bound for one estimation order."""

    value: float
    gammas: np.ndarray
    ordering: tuple
    step_terms: np.ndarray

    def to_json(self):
        return {
            "value": self.value,
            "ordering": list(self.ordering),
            "gammas": [float(g) for g in self.gammas],
            "step_terms": [float(a) for a in self.step_terms],
        }


@dataclass(frozen=True)
class Brackets:
    """Order-independent envelope of the stepwise bound."""

    harmonic_lower: float
    geometric_lower: float
    upper: float


@dataclass(frozen=True)
class DpTables:
    """Memoization tables of the ordering search.

    ``cost`` maps a bitmask of parameter labels (bit k = label k+1) to the
    optimal accumulated cost sum 1/L_jj over that subset; ``choice`` maps it
    to the 0-based index of the parameter estimated first within the
    subset.  ``expansions`` counts evaluated (subset, candidate) pairs.
    """

    cost: dict
    choice: dict
    expansions: int


def _validate_ordering(order, n):
    order = tuple(int(o) for o in order)
    if sorted(order) != list(range(1, n + 1)):
        raise ValueError(f"ordering {order} is not a permutation of 1..{n}")
    return order


def _weight_diag(w, n):
    if w is None:
        return np.ones(n)
    w = np.asarray(w, dtype=float)
    if w.ndim == 2:
        if not np.allclose(w, np.diag(np.diag(w))):
            raise ValueError("stepwise weights must be diagonal")
        w = np.diag(w)
    if w.shape != (n,):
        raise ValueError(f"expected {n} weights, got shape {w.shape}")
    if np.any(w <= 0):
        raise ValueError("weights must be positive")
    return w


def _step_terms(qp):
    """A_j for the already-permuted matrix, or None where a trailing block fails SPD.

    Each trailing determinant comes from its own Cholesky factorization
    (squared pivot product); they are all positive iff the matrix is SPD,
    and any failure marks the ordering as singular.  This route is kept
    independent of the single-factorization telescoping of
    :func:`csep_cholesky`, which the tests play against it.
    """
    n = qp.shape[0]
    dets = np.empty(n + 1)
    dets[n] = 1.0
    for j in range(n):
        try:
            piv = np.diag(np.linalg.cholesky(qp[j:, j:]))
        except np.linalg.LinAlgError:
            return None
        dets[j] = np.prod(piv) ** 2
    if np.any(dets[:n] <= 0.0) or not np.all(np.isfinite(dets)):
        return None
    return dets[1:] / dets[:n]


def csep_ordered(q, order=None, w=None):
    """Stepwise bound, optimal fractions and per-step terms for one ordering.

    ``order`` lists 1-based parameter labels, first estimated first
    (default: natural order 1..n).  ``w`` holds positive per-parameter
    weights (diagonal weight matrix); the weight of the parameter estimated
    at step j multiplies that step's variance term.
    """
    q = np.asarray(q, dtype=float)
    _require_symmetric(q, "QFIM")
    q = symmetrize(q)
    n = q.shape[0]
    order = _validate_ordering(order if order is not None else range(1, n + 1), n)
    wd = _weight_diag(w, n)
    idx = [o - 1 for o in order]
    qp = q[np.ix_(idx, idx)]
    a = _step_terms(qp)
    if a is None:
        raise SingularQfim("a trailing determinant of the permuted QFIM is <= 0")
    weighted = wd[list(idx)] * a
    roots = np.sqrt(weighted)
    total = roots.sum()
    return StepwiseResult(
        value=float(total**2),
        gammas=roots / total,
        ordering=order,
        step_terms=a,
    )


def csep_cholesky(q):
    """Stepwise bound of the reversed order (n, ..., 1) as (Tr L^-1)^2, Q = L L^T."""
    q = np.asarray(q, dtype=float)
    try:
        L = cholesky(q)
    except NotPositiveDefinite as exc:
        raise SingularQfim(str(exc)) from exc
    return float(np.sum(1.0 / np.diag(L)) ** 2)


def brackets(q):
    """Order-independent bracket n^3/TrQ <= n^2 det(Q)^(-1/n) <= C_sep <= n Tr[Q^-1].

    Both outer bounds saturate simultaneously iff Q is a positive multiple
    of the identity.
    """
    q = np.asarray(q, dtype=float)
    n = q.shape[0]
    det = determinant(q)
    if det <= 0:
        raise SingularQfim("QFIM determinant is <= 0")
    try:
        inv = spd_inverse(q)
    except NotPositiveDefinite as exc:
        raise SingularQfim(str(exc)) from exc
    return Brackets(
        harmonic_lower=float(n**3 / np.trace(q)),
        geometric_lower=float(n**2 * det ** (-1.0 / n)),
        upper=float(n * np.trace(inv)),
    )


def _value_or_inf(q, order, wd):
    """Weighted stepwise value, infinite when the ordering hits a singular block."""
    idx = [o - 1 for o in order]
    a = _step_terms(q[np.ix_(idx, idx)])
    if a is None:
        return np.inf
    return float(np.sum(np.sqrt(wd[list(idx)] * a)) ** 2)


def best_order_bruteforce(q, w=None):
    """Minimum stepwise bound over all n! orderings.

    Ties keep the lexicographically smallest ordering.  Orderings that hit
    a singular trailing block are skipped rather than raised, so the search
    survives matrices that are singular only along some directions.
    """
    q = np.asarray(q, dtype=float)
    _require_symmetric(q, "QFIM")
    q = symmetrize(q)
    n = q.shape[0]
    if n > BRUTE_FORCE_MAX:
        raise TooManyParameters(
            f"brute force is guarded at n <= {BRUTE_FORCE_MAX}, got n = {n}"
        )
    wd = _weight_diag(w, n)
    best_order, best_value = None, np.inf
    for perm in permutations(range(1, n + 1)):
        value = _value_or_inf(q, perm, wd)
        if value < best_value:
            best_order, best_value = perm, value
    if best_order is None:
        raise SingularQfim("no ordering has positive trailing determinants")
    return csep_ordered(q, best_order, w)


def dp_tables(q, w=None):
    """Held-Karp tables over parameter subsets.

    cost(S) = min_{j in S} cost(S \\ {j}) + sqrt(w_j) / sqrt(schur(j | S \\ {j}))
    with schur(j | I) = q_jj - q_jI Q_II^-1 q_jI, the squared Cholesky pivot
    of appending j after the block I.  Subsets iterate by population count;
    non-positive Schur complements make a candidate infeasible.
    """
    q = np.asarray(q, dtype=float)
    _require_symmetric(q, "QFIM")
    q = symmetrize(q)
    n = q.shape[0]
    if n > DP_MAX:
        raise TooManyParameters(f"DP is guarded at n <= {DP_MAX}, got n = {n}")
    wd = _weight_diag(w, n)
    tol = pivot_tol(q)
    cost = {0: 0.0}
    choice = {0: None}
    expansions = 0
    masks = sorted(range(1, 1 << n), key=lambda m: (m.bit_count(), m))
    for mask in masks:
        bits = [k for k in range(n) if mask >> k & 1]
        best, best_j = np.inf, None
        for j in bits:
            expansions += 1
            rest = mask ^ (1 << j)
            base = cost[rest]
            if not np.isfinite(base):
                continue
            others = [k for k in bits if k != j]
            if others:
                qii = q[np.ix_(others, others)]
                qij = q[others, j]
                schur = q[j, j] - qij @ np.linalg.solve(qii, qij)
            else:
                schur = q[j, j]
            if schur <= tol:
                continue
            cand = base + np.sqrt(wd[j]) / np.sqrt(schur)
            if cand < best:
                best, best_j = cand, j
        cost[mask] = best
        choice[mask] = best_j
    return DpTables(cost=cost, choice=choice, expansions=expansions)


def best_order_dp(q, w=None):
    """Minimum stepwise bound via the bitmask recursion; equals brute force.

    The optimal estimation order is reconstructed by unwinding the choice
    table from the full set: each recorded choice is the parameter
    estimated first within its subset.
    """
    q = np.asarray(q, dtype=float)
    n = q.shape[0]
    tables = dp_tables(q, w)
    full = (1 << n) - 1
    if not np.isfinite(tables.cost[full]):
        raise SingularQfim("no ordering has positive Schur complements")
    order = []
    mask = full
    while mask:
        j = tables.choice[mask]
        order.append(j + 1)
        mask ^= 1 << j
    return csep_ordered(q, tuple(order), w)

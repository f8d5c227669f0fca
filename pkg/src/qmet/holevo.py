"""Numerical Holevo bound via a self-contained interior-point SDP.

The bound minimizes ``Tr[W Re Z] + ||sqrt(W) Im Z sqrt(W)||_1`` with
``Z_uv = Tr[rho X_u X_v]`` over Hermitian observable families satisfying
the local unbiasedness conditions ``Tr[d_v rho X_u] = delta_uv`` and
``Tr[rho X_u] = 0``.  Expanding each X_u in an orthonormal Hermitian
operator basis turns this into the equivalent semidefinite program

    minimize  Tr[W V]   over real symmetric V and coefficients X
    subject to  [[V, (R X)^dag], [R X, I]] >= 0  (complex Hermitian),

where S_ij = Tr[rho b_i b_j] = R^dag R is factored at its numerical rank
r (r = d for pure states), so the Schur block has complex size n + r.
Minimizing Tr[W V] over V >= Z recovers exactly the Re/Im-nuclear-norm
objective.  The unbiasedness constraints are affine and eliminated up
front: X = X0 + N xi with N spanning their null space, which keeps the
interior point problem unconstrained apart from the cone.

The cone constraint is realified ([[Re M, -Im M], [Im M, Re M]] >= 0) and
solved by a primal-dual path-following method in the dual-scaling flavor:
the search direction in the variables z comes from the Newton system
M dz = mu tr[G_k G^-1] - c with M_kl = tr[G_k Y G_l G^-1] symmetrized,
and the cone multiplier Y is updated from the linearized complementarity
condition.  Problem sizes here are tiny (at most ~21 variables and a
24 x 24 realified block), so no exploitation of sparsity is attempted.
"""

from dataclasses import dataclass

import numpy as np

from .bounds import c_sld, quantumness_T, weight_matrix
from .errors import Infeasible
from .models import hermitian_operator_basis

SDP_TOL = 1e-6
CONSTRAINT_TOL = 1e-8
MAX_ITERATIONS = 500
_POLISH_TOL = 1e-11
_BOUNDARY_FRACTION = 0.98


@dataclass(frozen=True)
class UnbiasedFamily:
    """Locally unbiased observables X_u, their basis, and expansion coefficients."""

    operators: list
    basis: list
    coeffs: np.ndarray


@dataclass(frozen=True)
class HolevoSolution:
    value: float
    x_opt: UnbiasedFamily
    v_opt: np.ndarray
    status: str
    gap: float
    iterations: int
    constraint_residual: float

    def to_json(self):
        return {"value": self.value, "status": self.status, "gap": self.gap}


def _realify(m):
    return np.block([[m.real, -m.imag], [m.imag, m.real]])


def _validate_inputs(rho, drho):
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    scale = 1.0 + float(np.max(np.abs(rho)))
    if np.max(np.abs(rho - rho.conj().T)) > 1e-10 * scale:
        raise ValueError("rho must be Hermitian")
    if abs(np.trace(rho).real - 1.0) > 1e-10:
        raise ValueError("rho must have unit trace")
    if np.min(np.linalg.eigvalsh(rho)) < -1e-10:
        raise ValueError("rho must be positive semidefinite")
    out = []
    for k, dr in enumerate(drho):
        dr = np.asarray(dr, dtype=complex)
        if dr.shape != (d, d):
            raise ValueError("derivative shapes must match rho")
        dscale = 1.0 + float(np.max(np.abs(dr)))
        if np.max(np.abs(dr - dr.conj().T)) > 1e-8 * dscale:
            raise ValueError(f"drho[{k}] must be Hermitian")
        if abs(np.trace(dr)) > 1e-8 * dscale:
            raise ValueError(f"drho[{k}] must be traceless")
        out.append(dr)
    return rho, out


def _max_step(p, dp):
    """Largest step keeping p + a*dp positive definite, within the boundary fraction.

    Returns 0 when the current iterate has already lost numerical positive
    definiteness, which the main loop treats as a stall.
    """
    try:
        L = np.linalg.cholesky(p)
    except np.linalg.LinAlgError:
        return 0.0
    linv = np.linalg.inv(L)
    lam_min = float(np.min(np.linalg.eigvalsh(linv @ dp @ linv.T)))
    if lam_min >= -1e-14:
        return 1.0
    return min(1.0, -_BOUNDARY_FRACTION / lam_min)


def holevo_bound(rho, drho, w=None, sdp_tol=SDP_TOL, max_iterations=MAX_ITERATIONS):
    """Holevo bound of a (pure or mixed) model given rho and its derivatives.

    Raises Infeasible when the unbiasedness system has no solution (the
    model is not locally identifiable).  A run that exhausts the iteration
    budget returns its best value with status "max_iter" and the reached
    duality gap, rather than raising.
    """
    rho, drho = _validate_inputs(rho, drho)
    d = rho.shape[0]
    n = len(drho)
    wm = weight_matrix(w, n)
    basis = hermitian_operator_basis(d)
    nb = len(basis)

    # unbiasedness constraints E x_u = (e_u; 0), stacked over the basis
    dmat = np.array([[np.trace(dr @ b).real for b in basis] for dr in drho])
    rvec = np.array([np.trace(rho @ b).real for b in basis])
    e_mat = np.vstack([dmat, rvec])
    rhs = np.vstack([np.eye(n), np.zeros((1, n))])
    x0, *_ = np.linalg.lstsq(e_mat, rhs, rcond=None)
    if np.max(np.abs(e_mat @ x0 - rhs)) > CONSTRAINT_TOL:
        raise Infeasible("local unbiasedness constraints have no solution")
    _, sv, vt = np.linalg.svd(e_mat)
    rank = int(np.sum(sv > 1e-12 * sv[0]))
    nullspace = vt[rank:].T  # nb x f

    # Gram matrix S_ij = Tr[rho b_i b_j], factored at numerical rank
    s_mat = np.array([[np.trace(rho @ bi @ bj) for bj in basis] for bi in basis])
    evals, evecs = np.linalg.eigh(s_mat)
    keep = evals > 1e-12 * max(evals[-1], 1e-300)
    r_fact = (np.sqrt(evals[keep])[:, None] * evecs[:, keep].conj().T)  # r x nb
    r_rank = r_fact.shape[0]

    # drop null-space directions invisible to the Gram factor
    r_null = r_fact @ nullspace
    visible = np.linalg.norm(r_null, axis=0) > 1e-12
    nullspace = nullspace[:, visible]
    f = nullspace.shape[1]

    mc = n + r_rank
    m = 2 * mc
    nv = n * (n + 1) // 2
    p = nv + n * f

    pairs = [(a, b) for a in range(n) for b in range(a, n)]
    gk = np.zeros((p, m, m))
    cvec = np.zeros(p)
    for k, (a, b) in enumerate(pairs):
        blk = np.zeros((mc, mc), dtype=complex)
        blk[a, b] = blk[b, a] = 1.0
        gk[k] = _realify(blk)
        cvec[k] = wm[a, a] if a == b else 2.0 * wm[a, b]
    for mu in range(n):
        for l in range(f):
            k = nv + mu * f + l
            col = r_fact @ nullspace[:, l]
            blk = np.zeros((mc, mc), dtype=complex)
            blk[n:, mu] = col
            blk[mu, n:] = col.conj()
            gk[k] = _realify(blk)

    rx0 = r_fact @ x0
    g0_blk = np.zeros((mc, mc), dtype=complex)
    g0_blk[n:, :n] = rx0
    g0_blk[:n, n:] = rx0.conj().T
    g0_blk[n:, n:] = np.eye(r_rank)
    g0 = _realify(g0_blk)

    # strictly feasible start: V beyond the largest eigenvalue of (R X0)^dag (R X0)
    k0 = rx0.conj().T @ rx0
    v_shift = 2.0 * max(float(np.max(np.linalg.eigvalsh(k0))), 0.0) + 1.0
    z = np.zeros(p)
    for k, (a, b) in enumerate(pairs):
        if a == b:
            z[k] = v_shift
    g = g0 + np.tensordot(z, gk, axes=1)
    y = np.eye(m)

    status = "max_iter"
    gap = np.inf
    iterations = 0
    sigma = 0.3
    prev_gap = np.inf
    for iterations in range(1, max_iterations + 1):
        ginv = np.linalg.inv(g)
        ginv = 0.5 * (ginv + ginv.T)
        gap = float(np.sum(y * g))
        obj = float(cvec @ z)
        scale = 1.0 + abs(obj)
        resid = float(np.max(np.abs(np.einsum("kij,ji->k", gk, y) - cvec)))
        if gap <= sdp_tol * scale and resid <= CONSTRAINT_TOL * scale:
            status = "converged"
            if gap <= _POLISH_TOL * scale:
                break
        if gap <= 0.5 * _POLISH_TOL * scale:
            break
        mu = sigma * gap / m
        tr_gk_ginv = np.einsum("kij,ji->k", gk, ginv)
        t_mats = np.einsum("ab,kbc,cd->kad", y, gk, ginv)
        mm = np.einsum("kab,lba->kl", gk, t_mats)
        mm = 0.5 * (mm + mm.T)
        rhs_vec = mu * tr_gk_ginv - cvec
        try:
            dz = np.linalg.solve(mm + 1e-14 * np.trace(mm) / p * np.eye(p), rhs_vec)
        except np.linalg.LinAlgError:
            break
        dg = np.tensordot(dz, gk, axes=1)
        dy = mu * ginv - y - 0.5 * (ginv @ dg @ y + y @ dg @ ginv)
        dy = 0.5 * (dy + dy.T)
        alpha_z = _max_step(g, dg)
        alpha_y = _max_step(y, dy)
        if max(alpha_z, alpha_y) < 1e-10:
            break
        z = z + alpha_z * dz
        g = g0 + np.tensordot(z, gk, axes=1)
        y = y + alpha_y * dy
        sigma = 0.15 if min(alpha_z, alpha_y) > 0.9 else 0.5
        if prev_gap / max(gap, 1e-300) < 1.000001 and gap < 1e3 * sdp_tol * scale:
            break  # stalled after reaching the useful accuracy range
        prev_gap = gap

    value = float(cvec @ z)
    v_opt = np.zeros((n, n))
    for k, (a, b) in enumerate(pairs):
        v_opt[a, b] = v_opt[b, a] = z[k]
    xi = z[nv:].reshape(n, f)
    coeffs = (x0 + nullspace @ xi.T).T  # n x nb
    operators = [
        sum(coeffs[u, i] * basis[i] for i in range(nb)) for u in range(n)
    ]
    resid = 0.0
    for u, x_u in enumerate(operators):
        resid = max(resid, abs(np.trace(rho @ x_u).real))
        for v_idx, dr in enumerate(drho):
            target = 1.0 if u == v_idx else 0.0
            resid = max(resid, abs(np.trace(dr @ x_u).real - target))
    return HolevoSolution(
        value=value,
        x_opt=UnbiasedFamily(operators=operators, basis=basis, coeffs=coeffs),
        v_opt=v_opt,
        status=status,
        gap=gap,
        iterations=iterations,
        constraint_residual=float(resid),
    )


def z_matrix(rho, operators):
    """Z_uv = Tr[rho X_u X_v]: Hermitian, with Re Z positive semidefinite.

    At the optimum Re Z dominates Q^-1 (the matrix Re Z - Q^-1 is PSD up to
    solver tolerance), which callers can check diagnostically.
    """
    rho = np.asarray(rho, dtype=complex)
    n = len(operators)
    z = np.empty((n, n), dtype=complex)
    for a in range(n):
        for b in range(n):
            z[a, b] = np.trace(rho @ operators[a] @ operators[b])
    return z


def verify_sandwich(solution, q, u, w=None, tol=1e-6):
    """Check C_S - tol <= value <= (1 + T(W)) C_S + tol for a converged solve."""
    low = c_sld(q, w)
    high = (1.0 + quantumness_T(q, u, w)) * low
    slack = tol * (1.0 + abs(high))
    return bool(low - slack <= solution.value <= high + slack)

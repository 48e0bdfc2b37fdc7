"""Quantumness measures: minimum apparatus entanglement over local bases.

The search space is parameterized by Hermitian generators, U = exp(iH):
for each measured subsystem of dimension d, a real vector of length d^2
fills H (d diagonal entries, then real/imaginary parts of the upper
triangle).  The parameterization is redundant (global and column phases,
permutations); redundancy is accepted and invariance is covered by tests.

All reported minima are upper bounds: Nelder-Mead with multi-start makes
no global-optimality guarantee.
"""

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import linalg
from .entanglement import BipartitionCut, negativity
from .errors import InvariantError
from .premeasure import MeasurementPlan, premeasure
from .states import SYSTEM, LabeledState, LocalBasis, spawn_rng

NEGATIVITY_OF_QUANTUMNESS = "negativity_of_quantumness"
ONE_WAY_DEFICIT = "one_way_deficit"
TWO_WAY_DEFICIT = "two_way_deficit"

VALUE_CLAMP = 1e-9


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 24
    max_iter: int = 300
    tol: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise InvariantError("restarts must be >= 1")
        if self.tol <= 0:
            raise InvariantError("tolerance must be positive")


@dataclass(frozen=True)
class QuantumnessReport:
    value: float
    measure: str
    measured: tuple
    argmin_bases: tuple
    restart_values: tuple
    converged: bool


def _fast_kron(a, b):
    """np.kron without its generic-shape overhead (2-d inputs only)."""
    ra, ca = a.shape
    rb, cb = b.shape
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(ra * rb, ca * cb)


def _fill_hermitian(params, d):
    h = np.zeros((d, d), dtype=complex)
    h[np.diag_indices(d)] = params[:d]
    k = d
    for i in range(d):
        for j in range(i + 1, d):
            h[i, j] = params[k] + 1j * params[k + 1]
            h[j, i] = params[k] - 1j * params[k + 1]
            k += 2
    return h


def _unitary_2x2(params):
    # closed-form exp(iH) for H = [[a, b+ic], [b-ic, e]]
    a, e, b, c = float(params[0]), float(params[1]), float(params[2]), float(params[3])
    t = 0.5 * (a + e)
    g = 0.5 * (a - e)
    r = math.sqrt(g * g + b * b + c * c)
    s = math.sin(r) / r if r > 1e-300 else 1.0
    phase = cmath.exp(1j * t)
    cr = math.cos(r)
    u = np.empty((2, 2), dtype=complex)
    u[0, 0] = phase * (cr + 1j * s * g)
    u[0, 1] = phase * (1j * s * (b + 1j * c))
    u[1, 0] = phase * (1j * s * (b - 1j * c))
    u[1, 1] = phase * (cr - 1j * s * g)
    return u


def params_to_unitary(params, d):
    """U = exp(iH) for the Hermitian H encoded by ``params`` (length d^2)."""
    params = np.asarray(params, dtype=float)
    if params.size != d * d:
        raise InvariantError(f"expected {d * d} parameters for dimension {d}, got {params.size}")
    if d == 2:
        return _unitary_2x2(params)
    h = _fill_hermitian(params, d)
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * w)) @ np.conj(v).T


def decode_basis(params, d, subsystem=""):
    """Measurement basis whose columns are the columns of exp(iH(params))."""
    return LocalBasis(subsystem, params_to_unitary(params, d))


def make_plan(state, measured, params):
    """MeasurementPlan from a joint parameter vector (one d^2 block per label)."""
    bases = []
    k = 0
    for label in measured:
        d = state.register.dim(label)
        bases.append(decode_basis(params[k : k + d * d], d, label))
        k += d * d
    return MeasurementPlan(tuple(measured), tuple(bases))


def apparatus_cut(premeasured_state, n_original):
    """Cut separating the original subsystems from the appended apparatuses."""
    n = premeasured_state.register.n
    return BipartitionCut(tuple(range(n_original)), tuple(range(n_original, n)))


def plan_negativity(state, plan):
    """Negativity across system : apparatuses of the pre-measurement state."""
    pm = premeasure(state, plan)
    return negativity(pm, apparatus_cut(pm, state.register.n))


class _Workspace:
    """Precomputed machinery for repeated objective evaluations on one state.

    Local-unitary trick: measuring in basis U equals rotating the state by
    U^dag and measuring in the computational basis, and the rotation is
    local on the system side of the system:apparatus cut, so neither the
    negativity nor the dephasing entropy is affected.  The computational-
    basis isometry and the partial-transpose axis permutation are therefore
    fixed and built once.
    """

    def __init__(self, state, measured):
        reg = state.register
        self.rho = state.rho
        self.dims = reg.dims
        self.n = reg.n
        self.measured_idx = [reg.index(lab) for lab in measured]
        self.meas_dims = [reg.dims[i] for i in self.measured_idx]
        self.param_len = sum(d * d for d in self.meas_dims)

        big_d = reg.total_dim
        self.big_d = big_d

        # Measured sub-indices of each full computational index; the
        # apparatus record for basis state |s> is the flattened tuple of
        # measured sub-indices, written in measurement order.
        sub_idx = []
        for idx in self.measured_idx:
            stride = int(np.prod(self.dims[idx + 1 :])) if idx + 1 < self.n else 1
            sub_idx.append((np.arange(big_d) // stride) % self.dims[idx])
        dm = int(np.prod(self.meas_dims))
        aidx = np.zeros(big_d, dtype=np.intp)
        for s, d in zip(sub_idx, self.meas_dims):
            aidx = aidx * d + s
        self.final_d = big_d * dm

        # Flat positions of sigma[s, s'] inside the apparatus-partial-
        # transposed pre-measurement matrix: entry ((s, a), (s', a')) is
        # nonzero only for a = record(s'), a' = record(s).
        s_grid = np.arange(big_d)[:, None]
        sp_grid = np.arange(big_d)[None, :]
        rows = s_grid * dm + aidx[sp_grid]
        cols = sp_grid * dm + aidx[s_grid]
        self.pt_flat_pos = (rows * self.final_d + cols).ravel()

        # dephasing mask: zero where measured-subsystem indices differ
        mask = np.ones((big_d, big_d), dtype=bool)
        for s in sub_idx:
            mask &= s[:, None] == s[None, :]
        self.dephase_mask = mask.astype(float)
        self.base_entropy = linalg.von_neumann_entropy(self.rho)
        self._eyes = {d: np.eye(d, dtype=complex) for d in set(self.dims)}
        # scratch buffer reused across objective calls (single-threaded per
        # workspace; each optimizer call builds its own workspace)
        self._pt_buf = np.zeros(self.final_d * self.final_d, dtype=complex)

    def _rotate(self, params):
        """sigma = G rho G^dag with G = (x) U_k^dag on measured subsystems."""
        slices = {}
        k = 0
        for idx, d in zip(self.measured_idx, self.meas_dims):
            slices[idx] = slice(k, k + d * d)
            k += d * d
        g = None
        for i in range(self.n):
            if i in slices:
                m = np.conj(params_to_unitary(params[slices[i]], self.dims[i])).T
            else:
                m = self._eyes[self.dims[i]]
            g = m if g is None else _fast_kron(g, m)
        return g @ self.rho @ np.conj(g).T

    def neg_objective(self, params):
        sigma = self._rotate(params)
        pt = self._pt_buf
        pt[self.pt_flat_pos] = sigma.ravel()
        w = np.linalg.eigvalsh(pt.reshape(self.final_d, self.final_d))
        return -float(np.minimum(w, 0.0).sum())

    def deficit_objective(self, params):
        sigma = self._rotate(params)
        return linalg.von_neumann_entropy(sigma * self.dephase_mask) - self.base_entropy


def _optimize(objective, param_len, cfg):
    """Multi-start Nelder-Mead; restart 0 at zero parameters."""
    best_x = None
    best_val = np.inf
    restart_values = []
    converged = False
    for r in range(cfg.restarts):
        if r == 0:
            x0 = np.zeros(param_len)
        else:
            rng = spawn_rng(cfg.seed, r)
            x0 = rng.normal(scale=1.0, size=param_len)
        res = minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={
                "maxiter": cfg.max_iter,
                "xatol": 1e-6,
                "fatol": cfg.tol,
                "adaptive": param_len > 6,
            },
        )
        restart_values.append(float(res.fun))
        converged = converged or bool(res.success)
        if res.fun < best_val:
            best_val = float(res.fun)
            best_x = res.x
    return best_val, best_x, tuple(restart_values), converged


def _check_measured(state, measured):
    measured = tuple(measured)
    if not measured:
        raise InvariantError("measured subset must be nonempty")
    for lab in measured:
        state.register.index(lab)
    return measured


def q_negativity(state, measured, cfg=OptimizerConfig()):
    """Upper bound on the minimum system:apparatus negativity over local bases."""
    measured = _check_measured(state, measured)
    ws = _Workspace(state, measured)
    value, best_x, restart_values, converged = _optimize(
        ws.neg_objective, ws.param_len, cfg
    )
    plan = make_plan(state, measured, best_x)
    return QuantumnessReport(
        value=max(0.0, value) if value < VALUE_CLAMP else value,
        measure=NEGATIVITY_OF_QUANTUMNESS,
        measured=measured,
        argmin_bases=plan.bases,
        restart_values=restart_values,
        converged=converged,
    )


def deficit(state, measured, cfg=OptimizerConfig()):
    """Minimum entropy increase under local dephasing on the measured subsystems.

    With one measured subsystem this is the one-way information deficit;
    with all subsystems measured it is the (two-way) relative entropy of
    quantumness.  Product-basis dephasing only; nonnegative by the pinching
    inequality.
    """
    measured = _check_measured(state, measured)
    ws = _Workspace(state, measured)
    value, best_x, restart_values, converged = _optimize(
        ws.deficit_objective, ws.param_len, cfg
    )
    n_sys = sum(1 for k in state.register.kinds if k == SYSTEM)
    two_way = len(measured) == state.register.n or len(measured) == n_sys > 1
    plan = make_plan(state, measured, best_x)
    return QuantumnessReport(
        value=max(0.0, value) if value < VALUE_CLAMP else value,
        measure=TWO_WAY_DEFICIT if two_way else ONE_WAY_DEFICIT,
        measured=measured,
        argmin_bases=plan.bases,
        restart_values=restart_values,
        converged=converged,
    )


def classify_cc(state, measured, threshold=1e-7, cfg=OptimizerConfig()):
    """I-CC classification: both quantumness residuals below ``threshold``.

    Returns {"cc", "witness_bases", "residual"}; witness bases are the
    argmin of the negativity optimization when classical.
    """
    q = q_negativity(state, measured, cfg)
    d = deficit(state, measured, cfg)
    residual = max(q.value, d.value)
    cc = residual < threshold
    return {
        "cc": cc,
        "witness_bases": q.argmin_bases if cc else None,
        "residual": residual,
        "negativity_residual": q.value,
        "deficit_residual": d.value,
    }


def _hermitian_basis(d):
    """Standard orthogonal Hermitian operator basis of a d-dim space."""
    ops = []
    for i in range(d):
        m = np.zeros((d, d), dtype=complex)
        m[i, i] = 1.0
        ops.append(m)
    for i in range(d):
        for j in range(i + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[i, j] = m[j, i] = 1.0 / np.sqrt(2)
            ops.append(m)
            m = np.zeros((d, d), dtype=complex)
            m[i, j] = -1j / np.sqrt(2)
            m[j, i] = 1j / np.sqrt(2)
            ops.append(m)
    return ops


def cc_commutation_oracle(state, measured_label, tol=1e-9):
    """Algebraic classicality check for the bipartite case (test oracle).

    The state is classical on the measured subsystem iff the conditional
    operators Tr_other[(I (x) X_m) rho], over a Hermitian operator basis
    {X_m} of the other subsystem, pairwise commute.
    """
    reg = state.register
    if reg.n != 2:
        raise InvariantError("cc_commutation_oracle requires a bipartite register")
    a = reg.index(measured_label)
    b = 1 - a
    da, db = reg.dims[a], reg.dims[b]
    t = state.rho.reshape(reg.dims + reg.dims)
    conditionals = []
    for x in _hermitian_basis(db):
        if a == 0:
            cond = np.einsum("ibjc,cb->ij", t, x)
        else:
            cond = np.einsum("bicj,cb->ij", t, x)
        conditionals.append(cond)
    for i in range(len(conditionals)):
        for j in range(i + 1, len(conditionals)):
            comm = conditionals[i] @ conditionals[j] - conditionals[j] @ conditionals[i]
            if np.max(np.abs(comm)) > tol:
                return False
    return True

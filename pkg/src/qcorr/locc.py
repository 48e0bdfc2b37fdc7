"""LOCC channel transferring a measured subsystem's state to its apparatus.

The protocol (local with respect to the system:apparatus cut): Fourier
transform on the measured subsystem in the plan basis, projective
measurement of that subsystem, then an outcome-conditioned phase
correction on the apparatus.  Every outcome produces the same output, so
the channel is deterministic; branches are enumerated exactly rather than
sampled.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .entanglement import BipartitionCut, negativity
from .errors import InvariantError
from .premeasure import (
    IMAGE_TOL,
    global_isometry,
    global_operator,
    premeasure,
)
from .states import APPARATUS_PREFIX, LabeledState


@dataclass(frozen=True)
class LoccTranscript:
    outcome_probabilities: tuple
    corrections: tuple        # human-readable description per outcome
    branch_outputs: tuple     # per-outcome conditional output states
    output: LabeledState

    def __post_init__(self):
        p = np.asarray(self.outcome_probabilities, dtype=float)
        if np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-10:
            raise InvariantError(f"invalid outcome probabilities: {p}")


def fourier_unitary(d):
    """F[k][i] = exp(2*pi*1j*i*k/d)/sqrt(d)."""
    if d < 2:
        raise InvariantError(f"fourier_unitary requires d >= 2, got {d}")
    k, i = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    return np.exp(2j * np.pi * i * k / d) / np.sqrt(d)


def correction_unitary(k, d):
    """Diagonal phase unitary diag(exp(-2*pi*1j*i*k/d))."""
    if not 0 <= k < d:
        raise InvariantError(f"correction index {k} outside [0, {d})")
    return np.diag(np.exp(-2j * np.pi * np.arange(d) * k / d))


def _check_premeasured(premeasured, plan, label):
    """The input must lie in the image of the pre-measurement isometry."""
    reg = premeasured.register
    app_label = APPARATUS_PREFIX + label
    a = reg.index(label)
    m = reg.index(app_label)
    basis = plan.basis_for(label)
    # move the apparatus to the end so the isometry check applies directly
    order = [i for i in range(reg.n) if i != m] + [m]
    moved = premeasured.permuted(order)
    w = global_isometry(moved.register.drop_last(), label, basis)
    projected = linalg.dagger(w) @ moved.rho @ w
    recon = w @ projected @ linalg.dagger(w)
    residual = 0.5 * np.sum(np.abs(np.linalg.eigvalsh(recon - moved.rho)))
    if residual > IMAGE_TOL:
        raise InvariantError(
            f"not a valid pre-measurement state for the plan (residual {residual:.3e})"
        )
    return a, m, basis


def locc_undo(premeasured, plan, label):
    """Transfer the measured subsystem's role to its apparatus via LOCC.

    Removes subsystem ``label`` from the register; the output equals the
    original state with that subsystem's information held by the apparatus.
    """
    a, m, basis = _check_premeasured(premeasured, plan, label)
    reg = premeasured.register
    d = reg.dims[a]
    u = basis.vectors

    # Fourier in the plan basis on the measured subsystem
    f_plan = fourier_unitary(d) @ linalg.dagger(u)
    g = global_operator(reg, label, f_plan)
    rho1 = g @ premeasured.rho @ linalg.dagger(g)

    app_label = APPARATUS_PREFIX + label
    keep = [i for i in range(reg.n) if i != a]
    out_reg = reg.drop(label)
    probs = []
    corrections = []
    branches = []
    for k in range(d):
        proj = np.zeros((d, d))
        proj[k, k] = 1.0
        pk_op = global_operator(reg, label, proj)
        branch = pk_op @ rho1 @ pk_op
        p = float(np.real(np.trace(branch)))
        if p < 1e-12:
            raise InvariantError(f"degenerate outcome probability {p} for k={k}")
        probs.append(p)
        ck = correction_unitary(k, d)
        corrections.append(f"diag phase U_{k} on {app_label}")
        ck_op = global_operator(reg, app_label, ck)
        branch = ck_op @ branch @ linalg.dagger(ck_op)
        branch_out = linalg.partial_trace(branch / p, reg.dims, keep)
        branches.append(LabeledState(out_reg, branch_out))

    avg = np.zeros_like(branches[0].rho)
    for p, b in zip(probs, branches):
        avg += p * b.rho
    output = LabeledState(out_reg, avg)
    return LoccTranscript(tuple(probs), tuple(corrections), tuple(branches), output)


def transfer_to_apparatus(premeasured, plan, labels):
    """Apply locc_undo sequentially for several (subsystem, apparatus) pairs.

    The pairs act on disjoint subsystems, so the order is irrelevant.
    """
    state = premeasured
    for label in labels:
        state = locc_undo(state, plan, label).output
    return state


def verify_monotonicity_step(state, plan):
    """Per-basis entanglement monotonicity across one pre-measurement.

    lhs: system:apparatus negativity of the pre-measurement state.
    rhs: negativity of the LOCC-transferred state (equal to the original
    entanglement with the measured subsystem's role moved to the apparatus).
    """
    if len(plan.measured) != 1:
        raise InvariantError("verify_monotonicity_step expects a single measured subsystem")
    label = plan.measured[0]
    n0 = state.register.n
    pm = premeasure(state, plan)
    cut = BipartitionCut(tuple(range(n0)), (n0,))
    lhs = negativity(pm, cut)
    out = locc_undo(pm, plan, label).output
    # cut: transferred apparatus (last) vs everything else
    rhs_cut = BipartitionCut(tuple(range(out.register.n - 1)), (out.register.n - 1,))
    rhs = negativity(out, rhs_cut)
    return {"lhs": lhs, "rhs": rhs, "holds": lhs >= rhs - 1e-9}

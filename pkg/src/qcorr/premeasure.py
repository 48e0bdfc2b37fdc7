"""Measurement interactions, pre-measurement states, and induced dephasing.

A complete von Neumann measurement of subsystem k in basis {|b_i>} is
implemented as the isometry V |b_i> = |b_i> (x) |i>, with the apparatus in
the computational basis and appended at the end of the register.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import InvariantError
from .states import (
    APPARATUS_PREFIX,
    MAX_TOTAL_DIM,
    LabeledState,
    LocalBasis,
    Register,
)

# Residual weight outside the isometry image above which undo refuses.
IMAGE_TOL = 1e-8


@dataclass(frozen=True)
class MeasurementPlan:
    """Ordered set of measured labels with one local basis each."""

    measured: tuple
    bases: tuple

    def __post_init__(self):
        measured = tuple(self.measured)
        bases = tuple(self.bases)
        object.__setattr__(self, "measured", measured)
        object.__setattr__(self, "bases", bases)
        if len(measured) != len(bases):
            raise InvariantError("one basis per measured label required")
        if len(set(measured)) != len(measured):
            raise InvariantError(f"duplicate measured labels: {measured}")
        for label, basis in zip(measured, bases):
            if basis.subsystem != label:
                raise InvariantError(
                    f"basis subsystem {basis.subsystem!r} does not match plan label {label!r}"
                )

    def basis_for(self, label):
        return self.bases[self.measured.index(label)]

    def check_register(self, register):
        for label, basis in zip(self.measured, self.bases):
            if basis.dim != register.dim(label):
                raise InvariantError(
                    f"basis dimension {basis.dim} != subsystem {label!r} "
                    f"dimension {register.dim(label)}"
                )


def plan_for(label, basis_vectors):
    """Single-subsystem plan from raw basis columns."""
    return MeasurementPlan((label,), (LocalBasis(label, basis_vectors),))


def measurement_isometry(basis):
    """The (d^2 x d) isometry V with V |b_i> = |b_i> (x) |i>."""
    d = basis.dim
    v = np.zeros((d * d, d), dtype=complex)
    for i in range(d):
        b = basis.vectors[:, i]
        e = np.zeros(d, dtype=complex)
        e[i] = 1.0
        v += np.outer(np.kron(b, e), np.conj(b))
    return v


def global_isometry(register, label, basis):
    """Isometry on the full register measuring ``label`` with the apparatus appended."""
    k = register.index(label)
    d = register.dims[k]
    if basis.dim != d:
        raise InvariantError(f"basis dimension {basis.dim} != subsystem dim {d}")
    d_before = int(np.prod(register.dims[:k], dtype=int)) if k else 1
    d_after = int(np.prod(register.dims[k + 1 :], dtype=int)) if k + 1 < register.n else 1
    big_d = register.total_dim
    w = np.zeros((big_d * d, big_d), dtype=complex)
    eye_b = np.eye(d_before)
    eye_a = np.eye(d_after)
    for i in range(d):
        b = basis.vectors[:, i]
        proj = np.kron(np.kron(eye_b, np.outer(b, np.conj(b))), eye_a)
        e = np.zeros((d, 1), dtype=complex)
        e[i, 0] = 1.0
        w += np.kron(proj, e)
    return w


def global_operator(register, label, op):
    """``op`` acting on ``label``, identity elsewhere."""
    k = register.index(label)
    d_before = int(np.prod(register.dims[:k], dtype=int)) if k else 1
    d_after = int(np.prod(register.dims[k + 1 :], dtype=int)) if k + 1 < register.n else 1
    return linalg.kron_all([np.eye(d_before), np.asarray(op, dtype=complex), np.eye(d_after)])


def premeasure(state, plan):
    """Pre-measurement state on the enlarged register S u M_I.

    One apparatus per measured label, dimension matching, label
    "M:<label>", appended in measurement order.
    """
    plan.check_register(state.register)
    reg = state.register
    rho = state.rho
    for label, basis in zip(plan.measured, plan.bases):
        d = reg.dim(label)
        if reg.total_dim * d > MAX_TOTAL_DIM:
            raise InvariantError(
                f"pre-measurement would exceed total dimension {MAX_TOTAL_DIM}"
            )
        w = global_isometry(reg, label, basis)
        rho = w @ rho @ linalg.dagger(w)
        reg = reg.with_apparatus(label)
    return LabeledState(reg, rho)


def dephase(state, plan):
    """Pinching in the plan bases on each measured subsystem."""
    plan.check_register(state.register)
    rho = state.rho
    for label, basis in zip(plan.measured, plan.bases):
        out = np.zeros_like(rho)
        for i in range(basis.dim):
            b = basis.vectors[:, i]
            p = global_operator(state.register, label, np.outer(b, np.conj(b)))
            out += p @ rho @ p
        rho = out
    return LabeledState(state.register, rho)


def undo_interaction(premeasured, plan):
    """Invert the measurement interaction, removing the apparatuses.

    The input must lie in the image of the pre-measurement isometry; a
    residual weight above 1e-8 outside the image is an error.
    """
    reg = premeasured.register
    rho = premeasured.rho
    for label, basis in zip(reversed(plan.measured), reversed(plan.bases)):
        app_label = APPARATUS_PREFIX + label
        if reg.labels[-1] != app_label:
            raise InvariantError(
                f"expected apparatus {app_label!r} last in register, found {reg.labels[-1]!r}"
            )
        base_reg = reg.drop_last()
        w = global_isometry(base_reg, label, basis)
        projected = linalg.dagger(w) @ rho @ w
        recon = w @ projected @ linalg.dagger(w)
        residual = 0.5 * np.sum(np.abs(np.linalg.eigvalsh(recon - rho)))
        if residual > IMAGE_TOL:
            raise InvariantError(
                f"state is not in the image of the measurement isometry "
                f"(residual {residual:.3e})"
            )
        rho = projected
        reg = base_reg
    return LabeledState(reg, rho)

"""Dense complex linear algebra for Hermitian operators on tensor-product spaces.

Conventions: operators are square numpy arrays, row-major, with subsystem 0
the slowest-varying tensor index (standard Kronecker ordering).  Entropies
are in bits (base-2 logarithms).
"""

import numpy as np

from .errors import InvariantError

# Tolerance ladder: exact-arithmetic-level structure, spectral positivity,
# iterative/reconstruction error.
TOL_STRUCT = 1e-12
TOL_PSD = 1e-10
TOL_RECON = 1e-9

# Eigenvalues below this are treated as exactly zero in entropies.
EIG_ZERO = 1e-12


def dagger(a):
    """Conjugate transpose."""
    return np.conj(a).T


def is_hermitian(a, tol=TOL_PSD):
    return np.max(np.abs(a - dagger(a))) <= tol


def kron(a, b):
    """Kronecker product (subsystem of ``a`` slowest-varying)."""
    return np.kron(np.asarray(a), np.asarray(b))


def kron_all(mats):
    """Kronecker product of a sequence of matrices, left to right."""
    out = np.asarray(mats[0])
    for m in mats[1:]:
        out = np.kron(out, np.asarray(m))
    return out


def hermitian_eig(h, tol=TOL_PSD):
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues ascending, eigenvector columns).  Raises
    InvariantError if ``h`` deviates from Hermiticity by more than ``tol``.
    """
    h = np.asarray(h, dtype=complex)
    dev = np.max(np.abs(h - dagger(h))) if h.size else 0.0
    if dev > tol:
        raise InvariantError(f"matrix is not Hermitian (max deviation {dev:.3e})")
    w, v = np.linalg.eigh(h)
    return w, v


def trace_norm(a, tol=TOL_PSD):
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    w, _ = hermitian_eig(a, tol=tol)
    return float(np.sum(np.abs(w)))


def check_density(rho, dims=None):
    """Validate density-operator invariants; returns ``rho`` as a complex array.

    Checks Hermiticity and unit trace at 1e-12 and positivity of the
    spectrum at -1e-10, plus dimension consistency when ``dims`` is given.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvariantError(f"density operator must be square, got shape {rho.shape}")
    if dims is not None:
        d = int(np.prod(dims))
        if rho.shape[0] != d:
            raise InvariantError(
                f"matrix dimension {rho.shape[0]} != product of subsystem dims {d}"
            )
    herm = np.max(np.abs(rho - dagger(rho)))
    if herm > TOL_STRUCT:
        raise InvariantError(f"not Hermitian: max |rho - rho^dag| = {herm:.3e}")
    tr = np.trace(rho)
    if abs(tr - 1.0) > TOL_STRUCT:
        raise InvariantError(f"trace {tr} differs from 1 beyond tolerance")
    wmin = float(np.min(np.linalg.eigvalsh(rho)))
    if wmin < -TOL_PSD:
        raise InvariantError(f"not positive semidefinite: min eigenvalue {wmin:.3e}")
    return rho


def partial_trace(rho, dims, keep):
    """Reduced operator on the subsystems in ``keep`` (indices into ``dims``)."""
    dims = list(dims)
    n = len(dims)
    keep = sorted(set(keep))
    if not keep:
        raise InvariantError("partial_trace: keep set is empty")
    if keep[0] < 0 or keep[-1] >= n:
        raise InvariantError(f"partial_trace: index out of range for {n} subsystems")
    t = np.asarray(rho).reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep]
    for ax in sorted(traced, reverse=True):
        half = t.ndim // 2
        t = np.trace(t, axis1=ax, axis2=ax + half)
    d = int(np.prod([dims[i] for i in keep]))
    return t.reshape(d, d)


def partial_transpose(rho, dims, subset):
    """Transpose the tensor indices of the subsystems in ``subset``.

    Pure entry permutation: applying it twice over the same subset returns
    the original matrix exactly.
    """
    dims = list(dims)
    n = len(dims)
    subset = sorted(set(subset))
    if subset and (subset[0] < 0 or subset[-1] >= n):
        raise InvariantError(f"partial_transpose: index out of range for {n} subsystems")
    t = np.asarray(rho).reshape(dims + dims)
    axes = list(range(2 * n))
    for i in subset:
        axes[i], axes[i + n] = axes[i + n], axes[i]
    d = int(np.prod(dims))
    return np.transpose(t, axes).reshape(d, d)


def von_neumann_entropy(rho):
    """Von Neumann entropy in bits, with 0*log(0) = 0.

    Eigenvalues below 1e-12 (including small negative numerical noise)
    are treated as exactly zero.
    """
    w = np.linalg.eigvalsh(np.asarray(rho, dtype=complex))
    w = w[w > EIG_ZERO]
    if w.size == 0:
        return 0.0
    return float(-np.sum(w * np.log2(w)))


def entropy_of_probs(p):
    """Shannon entropy in bits of a probability vector."""
    p = np.asarray(p, dtype=float)
    p = p[p > EIG_ZERO]
    if p.size == 0:
        return 0.0
    return float(-np.sum(p * np.log2(p)))


def trace_distance(rho, sigma):
    """Half the trace norm of the difference of two Hermitian operators."""
    rho = np.asarray(rho)
    sigma = np.asarray(sigma)
    if rho.shape != sigma.shape:
        raise InvariantError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    return 0.5 * trace_norm(rho - sigma)


def purity(rho):
    """Tr(rho^2) as a real number."""
    rho = np.asarray(rho)
    return float(np.real(np.trace(rho @ rho)))

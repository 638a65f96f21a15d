"""Small dense complex linear algebra for 2-, 4- and 8-dimensional density matrices.

Matrices are plain ``numpy`` arrays.  Most routines accept either a single
``(n, n)`` matrix or a stack ``(..., n, n)`` so the scan can push thousands of
reduced states through one call.  The eigensolver is a cyclic Jacobi method
with complex rotations, vectorised across the stack.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, NumericalError, ValidationError

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100
JACOBI_BLOCK = 2048

SIGMA_I = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


@dataclass(frozen=True)
class EigenResult:
    """Eigenvalues sorted descending and the largest ``|A v - lambda v|`` seen."""

    values: np.ndarray
    residual: float


def as_matrix(a, dims=None) -> np.ndarray:
    """Return ``a`` as a complex square matrix (or stack), rejecting NaN/Inf."""
    m = np.asarray(a, dtype=complex)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise ContractError(f"expected square matrix, got shape {m.shape}")
    if dims is not None and m.shape[-1] not in dims:
        raise ContractError(f"matrix dimension {m.shape[-1]} not in {tuple(dims)}")
    if not np.all(np.isfinite(m)):
        raise ContractError("matrix has non-finite entries")
    return m


def matmul(a, b) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[-1] != b.shape[-1]:
        raise ContractError(f"dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}")
    return a @ b


def adjoint(a) -> np.ndarray:
    return np.conj(np.swapaxes(as_matrix(a), -1, -2))


def kron(*factors) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for f in factors:
        out = np.kron(out, f)
    return out


def hermiticity_error(a) -> np.ndarray:
    a = np.asarray(a)
    diff = np.abs(a - np.conj(np.swapaxes(a, -1, -2)))
    return diff.max(axis=(-1, -2))


def check_hermitian(a, tol=HERMITIAN_TOL) -> None:
    err = np.max(hermiticity_error(a))
    if err > tol:
        raise ValidationError(f"matrix is not Hermitian (max |A - A^H| = {err:.3e})")


def check_density(rho, tol=TRACE_TOL) -> None:
    """Raise ``ValidationError`` unless ``rho`` is Hermitian with unit trace."""
    check_hermitian(rho, tol)
    tr = np.trace(rho, axis1=-2, axis2=-1)
    err = np.max(np.abs(tr - 1.0))
    if err > tol:
        raise ValidationError(f"trace deviates from 1 by {err:.3e}")


def reduce_qubits(rho, keep, n_qubits=3) -> np.ndarray:
    """Partial trace of an ``n_qubits`` density matrix onto the qubits in ``keep``.

    Qubit labels are 1-based, qubit 1 being the leftmost ket label (most
    significant bit of the basis index).  The kept qubits come out in ascending
    label order.
    """
    rho = np.asarray(rho)
    dim = 2 ** n_qubits
    if rho.shape[-2:] != (dim, dim):
        raise ContractError(f"expected {dim}x{dim} matrix, got {rho.shape[-2:]}")
    keep = sorted(keep)
    if any(q < 1 or q > n_qubits for q in keep) or len(set(keep)) != len(keep):
        raise ContractError(f"invalid qubit labels {keep}")
    batch = rho.shape[:-2]
    t = rho.reshape(batch + (2,) * (2 * n_qubits))
    nb = len(batch)
    # Trace out from the highest label down so earlier axis numbers stay valid.
    n_left = n_qubits
    for q in sorted(set(range(1, n_qubits + 1)) - set(keep), reverse=True):
        row_axis = nb + q - 1
        col_axis = nb + n_left + q - 1
        t = np.trace(t, axis1=row_axis, axis2=col_axis)
        n_left -= 1
    d = 2 ** len(keep)
    return t.reshape(batch + (d, d))


def partial_trace(rho, traced_qubit: int) -> np.ndarray:
    """Trace one qubit out of a three-qubit density matrix.

    Returns the 4x4 reduced matrix of the two remaining qubits.
    """
    rho = as_matrix(rho, dims=(8,))
    if traced_qubit not in (1, 2, 3):
        raise ContractError(f"traced_qubit must be 1, 2 or 3, got {traced_qubit!r}")
    check_density(rho)
    keep = [q for q in (1, 2, 3) if q != traced_qubit]
    return reduce_qubits(rho, keep)


def partial_transpose(rho, subsystem: str = "second") -> np.ndarray:
    """Transpose the indices of one tensor factor of a two-qubit matrix."""
    rho = as_matrix(rho, dims=(4,))
    batch = rho.shape[:-2]
    nb = len(batch)
    t = rho.reshape(batch + (2, 2, 2, 2))
    if subsystem == "first":
        t = np.swapaxes(t, nb + 0, nb + 2)
    elif subsystem == "second":
        t = np.swapaxes(t, nb + 1, nb + 3)
    else:
        raise ContractError(f"subsystem must be 'first' or 'second', got {subsystem!r}")
    return t.reshape(batch + (4, 4))


def jacobi_eigh(a, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Cyclic Jacobi diagonalisation of a Hermitian (or real symmetric) matrix.

    Accepts a single ``(n, n)`` matrix or a stack ``(..., n, n)``.  Each
    rotation first removes the phase of the pivot, then applies the real
    Jacobi rotation, so complex input never needs a doubled real embedding.
    Sweeps stop once the off-diagonal Frobenius norm of every matrix in the
    stack drops below ``tol * max(1, ||A||_F)``.

    Returns ``(values, vectors)``: real values sorted descending and the
    eigenvectors in the matching columns.
    """
    a = np.asarray(a)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ContractError(f"expected square matrix, got shape {a.shape}")
    if a.ndim > 2 and int(np.prod(a.shape[:-2])) > JACOBI_BLOCK:
        # Cache-sized blocks, each iterated to its own convergence.
        n = a.shape[-1]
        flat = a.reshape((-1, n, n))
        parts = [jacobi_eigh(flat[i : i + JACOBI_BLOCK], tol, max_sweeps)
                 for i in range(0, flat.shape[0], JACOBI_BLOCK)]
        vals = np.concatenate([p[0] for p in parts])
        vecs = np.concatenate([p[1] for p in parts])
        return vals.reshape(a.shape[:-1]), vecs.reshape(a.shape)
    is_complex = np.iscomplexobj(a)
    a = a.astype(complex if is_complex else float)
    single = a.ndim == 2
    batch_shape = a.shape[:-2]
    n = a.shape[-1]
    a = a.reshape((-1, n, n))
    if not np.all(np.isfinite(a)):
        raise ContractError("matrix has non-finite entries")
    if a.size:
        asym = np.abs(a - np.conj(np.swapaxes(a, 1, 2))).max()
        if asym > HERMITIAN_TOL * max(1.0, np.abs(a).max()):
            raise ValidationError(f"matrix is not Hermitian (max |A - A^H| = {asym:.3e})")
    a = 0.5 * (a + np.conj(np.swapaxes(a, 1, 2)))
    scale = np.maximum(1.0, np.sqrt(np.sum(np.abs(a) ** 2, axis=(1, 2))))
    off_mask = ~np.eye(n, dtype=bool)

    # Work in (row, col, batch) layout so every row/column slice is contiguous.
    a = np.ascontiguousarray(np.moveaxis(a, 0, -1))
    m = a.shape[-1]
    v = np.zeros((n, n, m), dtype=a.dtype)
    for i in range(n):
        v[i, i] = 1.0

    for _ in range(max_sweeps + 1):
        off = np.sqrt(np.sum(np.abs(a[off_mask]) ** 2, axis=0))
        if np.all(off < tol * scale):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = np.abs(apq)
                nz = r > 0.0
                if not np.any(nz):
                    continue
                safe_r = np.where(nz, r, 1.0)
                # conj of the pivot phase, e^{-i phi}
                w = np.where(nz, np.conj(apq) / safe_r, 1.0)
                with np.errstate(over="ignore"):
                    theta = (a[q, q].real - a[p, p].real) / (2.0 * safe_r)
                    t = np.copysign(1.0, theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
                t = np.where(nz, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                cw = c * w
                sw = s * w
                # A <- A U with U[p,p]=c, U[p,q]=s, U[q,p]=-s w, U[q,q]=c w
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - sw * col_q
                a[:, q] = s * col_p + cw * col_q
                # A <- U^H A
                row_p = a[p].copy()
                row_q = a[q].copy()
                a[p] = c * row_p - np.conj(sw) * row_q
                a[q] = s * row_p + np.conj(cw) * row_q
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - sw * vq
                v[:, q] = s * vp + cw * vq
    else:
        raise NumericalError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")

    vals = np.real(np.einsum("iim->mi", a))
    v = np.moveaxis(v, -1, 0)
    order = np.argsort(-vals, axis=1, kind="stable")
    vals = np.take_along_axis(vals, order, axis=1)
    v = np.take_along_axis(v, order[:, None, :], axis=2)
    if single:
        return vals[0], v[0]
    return vals.reshape(batch_shape + (n,)), v.reshape(batch_shape + (n, n))


def eigvalsh(a) -> np.ndarray:
    """Descending eigenvalues of a Hermitian matrix or stack of them."""
    a = as_matrix(a)
    check_hermitian(a)
    vals, _ = jacobi_eigh(a)
    return vals


def hermitian_eigenvalues(a) -> EigenResult:
    """Eigenvalues of one Hermitian matrix with the eigen-pair residual."""
    a = as_matrix(a)
    if a.ndim != 2:
        raise ContractError("hermitian_eigenvalues takes a single matrix")
    check_hermitian(a)
    vals, vecs = jacobi_eigh(a)
    residual = float(np.max(np.abs(a @ vecs - vecs * vals[None, :])))
    return EigenResult(values=vals, residual=residual)


def hermitian_function(a, func) -> np.ndarray:
    """Apply ``func`` to the spectrum of a Hermitian matrix (or stack)."""
    a = as_matrix(a)
    check_hermitian(a)
    vals, vecs = jacobi_eigh(a)
    fvals = func(vals)
    return (vecs * fvals[..., None, :]) @ np.conj(np.swapaxes(vecs, -1, -2))

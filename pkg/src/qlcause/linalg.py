"""Small dense complex linear algebra (dimensions 2, 3, 6, 12).

Everything is a plain ``numpy`` complex128 array. Vectors are 1-d, matrices
are 2-d. Kronecker products use first-factor-major ordering, so for vectors
``kron(u, v)[i * len(v) + j] == u[i] * v[j]``.
"""

from __future__ import annotations

import numpy as np

STRUCT_TOL = 1e-10
NORM_TOL = 1e-12


class DimensionError(ValueError):
    """Operand shapes are incompatible."""


def as_vector(entries) -> np.ndarray:
    v = np.asarray(entries, dtype=np.complex128)
    if v.ndim != 1 or v.size == 0:
        raise DimensionError(f"expected a non-empty 1-d vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return v


def as_matrix(entries) -> np.ndarray:
    m = np.asarray(entries, dtype=np.complex128)
    if m.ndim != 2 or m.size == 0:
        raise DimensionError(f"expected a non-empty 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def kron(m1, m2) -> np.ndarray:
    """Kronecker product of two matrices or of two vectors."""
    a = np.asarray(m1, dtype=np.complex128)
    b = np.asarray(m2, dtype=np.complex128)
    if a.ndim != b.ndim or a.ndim not in (1, 2):
        raise DimensionError(f"cannot kron shapes {a.shape} and {b.shape}")
    if a.ndim == 1:
        return np.outer(a, b).ravel()
    (p, q), (r, s) = a.shape, b.shape
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(p * r, q * s)


def kron_all(*factors) -> np.ndarray:
    out = np.asarray(factors[0], dtype=np.complex128)
    for f in factors[1:]:
        out = kron(out, f)
    return out


def compose(m1, m2) -> np.ndarray:
    a, b = as_matrix(m1), as_matrix(m2)
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot compose {a.shape} with {b.shape}")
    return a @ b


def apply(m, v) -> np.ndarray:
    a, x = as_matrix(m), as_vector(v)
    if a.shape[1] != x.shape[0]:
        raise DimensionError(f"cannot apply {a.shape} matrix to length-{x.shape[0]} vector")
    return a @ x


def adjoint(m) -> np.ndarray:
    return as_matrix(m).conj().T


def trace(m) -> complex:
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"trace of non-square matrix {a.shape}")
    return complex(np.trace(a))


def inner(u, v) -> complex:
    """<u|v>, conjugate-linear in the first argument."""
    a, b = as_vector(u), as_vector(v)
    if a.shape != b.shape:
        raise DimensionError(f"inner product of lengths {a.size} and {b.size}")
    return complex(np.vdot(a, b))


def norm2(v) -> float:
    x = np.asarray(v, dtype=np.complex128)
    # real and imaginary parts summed separately: keeps symmetric cases exact
    return float(x.real @ x.real + x.imag @ x.imag)


def _max_abs(m: np.ndarray) -> float:
    return float(np.max(np.abs(m))) if m.size else 0.0


def is_projector(m, tol: float = STRUCT_TOL) -> bool:
    """True iff ``m`` is Hermitian and idempotent to within ``tol`` (max-entry norm)."""
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"projector test on non-square matrix {a.shape}")
    return _max_abs(a - a.conj().T) <= tol and _max_abs(a @ a - a) <= tol


def commutator_norm(p, q) -> float:
    """Max-entry magnitude of ``pq - qp``."""
    a, b = as_matrix(p), as_matrix(q)
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise DimensionError(f"commutator of shapes {a.shape} and {b.shape}")
    return _max_abs(a @ b - b @ a)


def rank1_projector(u) -> np.ndarray:
    """|u><u| / <u|u>."""
    x = as_vector(u)
    n = norm2(x)
    if n <= 0.0:
        raise ValueError("cannot project onto the zero vector")
    return np.outer(x, x.conj()) / n

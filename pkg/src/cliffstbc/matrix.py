"""Small dense complex-matrix kernel.

Matrices are plain 2-D ``numpy`` arrays of dtype ``complex128``.  Every size
used in this package is at most 64x64, so nothing here tries to be clever
about storage.
"""

import numpy as np

DEFAULT_TOL = 1e-10
MAX_DIM = 64


def as_matrix(a):
    """Return `a` as a finite 2-D complex128 array.

    Raises
    ------
    ValueError
        If `a` is not two dimensional, is empty, or has non-finite entries.
    """
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def identity(n):
    return np.eye(n, dtype=np.complex128)


def kron(a, b):
    """Kronecker product; block (p, q) of the result is ``a[p, q] * b``."""
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(*mats):
    out = as_matrix(mats[0])
    for m in mats[1:]:
        out = np.kron(out, as_matrix(m))
    return out


def adjoint(a):
    """Conjugate transpose."""
    return as_matrix(a).conj().T


def det(a):
    """Determinant through LU factorisation with partial pivoting.

    Raises
    ------
    ValueError
        If `a` is not square or exceeds the supported size.
    """
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"determinant needs a square matrix, got {m.shape}")
    if m.shape[0] > MAX_DIM:
        raise ValueError(f"matrix dimension {m.shape[0]} exceeds {MAX_DIM}")
    return complex(np.linalg.det(m))


def fro(a):
    return float(np.linalg.norm(a))


def approx_eq(a, b, tol=DEFAULT_TOL):
    """True iff ``||a - b||_F <= tol * max(1, ||a||_F)``."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return fro(a - b) <= tol * max(1.0, fro(a))


def is_unitary(a, tol=DEFAULT_TOL):
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        return False
    return approx_eq(a.conj().T @ a, identity(a.shape[0]), tol)


def is_hermitian(a, tol=DEFAULT_TOL):
    a = as_matrix(a)
    return a.shape[0] == a.shape[1] and approx_eq(a, a.conj().T, tol)


def clean(a):
    """Drop signed zeros and round-off below 1e-15 so exported entries are stable."""
    a = np.array(a, dtype=np.complex128)
    re = np.where(np.abs(a.real) < 1e-15, 0.0, a.real) + 0.0
    im = np.where(np.abs(a.imag) < 1e-15, 0.0, a.imag) + 0.0
    return re + 1j * im


def to_pairs(a):
    """Row-major ``[[re, im], ...]`` nested lists for JSON."""
    a = clean(a)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def from_pairs(rows):
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ValueError("complex matrix must be encoded as rows of [re, im] pairs")
    return as_matrix(arr[..., 0] + 1j * arr[..., 1])

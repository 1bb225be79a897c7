"""Dense complex linear algebra on qubit-scale operators.

Everything downstream (circuit simulation, channel distances, reductions)
is built on the handful of primitives here: Kronecker products, partial
traces, Hermitian spectral decompositions, singular values, and PSD square
roots.  Matrices are plain ``numpy.ndarray`` values of dtype complex128;
states are 1-d arrays.  All functions are pure.

Tolerances are centralized in this module.  Double precision with matrix
sides <= 256 leaves ample headroom for the defaults below.
"""

from __future__ import annotations

import numpy as np

TOL_HERM = 1e-9
TOL_PSD = 1e-9
TOL_TRACE = 1e-9
TOL_NORM = 1e-9
TOL_RECON = 1e-10

#: Hard cap on any matrix side.  Exceeding it raises SizeCapError, never
#: silent truncation: polarization parameters can explode (see reductions).
DIM_CAP = 4096


class SizeCapError(ValueError):
    """An operation would produce a matrix side above the dimension cap."""


def check_cap(dim: int, cap: int = DIM_CAP, context: str = "matrix") -> None:
    """Raise SizeCapError if ``dim`` exceeds ``cap``."""
    if dim > cap:
        raise SizeCapError(
            f"{context} dimension {dim} exceeds the cap {cap}; "
            "refusing rather than truncating"
        )


def as_matrix(x) -> np.ndarray:
    """Coerce to a 2-d complex128 array, rejecting NaN/Inf entries."""
    m = np.asarray(x, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got array of ndim {m.ndim}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise ValueError("matrix contains non-finite entries")
    return m


def as_state(x) -> np.ndarray:
    """Coerce to a 1-d complex128 array, rejecting NaN/Inf entries."""
    v = np.asarray(x, dtype=np.complex128).reshape(-1)
    if not np.all(np.isfinite(v.real)) or not np.all(np.isfinite(v.imag)):
        raise ValueError("state contains non-finite entries")
    return v


def dag(x: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return x.conj().T


def herm_defect(x: np.ndarray) -> float:
    """Largest absolute entry of x - x^dagger."""
    return float(np.abs(x - dag(x)).max(initial=0.0))


def require_hermitian(x: np.ndarray, tol: float = TOL_HERM) -> np.ndarray:
    """Check Hermiticity within ``tol`` and return the symmetrized matrix."""
    d = herm_defect(x)
    if d > tol:
        raise ValueError(f"matrix is not Hermitian: defect {d:.3e} > {tol:.1e}")
    return (x + dag(x)) / 2


def tensor(a, b, cap: int = DIM_CAP) -> np.ndarray:
    """Kronecker product; dimensions multiply, subject to the cap."""
    a = as_matrix(a)
    b = as_matrix(b)
    check_cap(a.shape[0] * b.shape[0], cap, "tensor rows")
    check_cap(a.shape[1] * b.shape[1], cap, "tensor cols")
    return np.kron(a, b)


def partial_trace(x, dims, keep) -> np.ndarray:
    """Trace out all factors of ``x`` not listed in ``keep``.

    ``dims`` are the subsystem dimensions (their product must equal the side
    of the square matrix ``x``).  ``keep`` is a sequence of factor indices;
    the output factors appear in the order given by ``keep``.
    """
    x = as_matrix(x)
    dims = [int(d) for d in dims]
    n = len(dims)
    side = int(np.prod(dims)) if dims else 1
    if x.shape[0] != x.shape[1] or x.shape[0] != side:
        raise ValueError(
            f"shape mismatch: matrix is {x.shape}, subsystem dims {dims} "
            f"imply side {side}"
        )
    keep = list(keep)
    if any(k < 0 or k >= n for k in keep) or len(set(keep)) != len(keep):
        raise ValueError(f"keep indices {keep} invalid for {n} factors")
    t = x.reshape(dims + dims)
    # einsum: traced factors share a row/col letter, kept factors keep both.
    letters = "abcdefghijklmnopqrstuvwxyz"
    if 2 * n > len(letters):
        raise ValueError("too many subsystem factors")
    row = list(letters[:n])
    col = [letters[n + i] if i in keep else letters[i] for i in range(n)]
    out = "".join(row[k] for k in keep) + "".join(col[k] for k in keep)
    res = np.einsum(f"{''.join(row)}{''.join(col)}->{out}", t)
    kept = int(np.prod([dims[k] for k in keep])) if keep else 1
    return res.reshape(kept, kept)


def spectral(h, tol: float = TOL_HERM) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decompose a Hermitian matrix.

    Returns ``(w, v)`` with eigenvalues ``w`` sorted descending and the
    matching orthonormal eigenvectors as columns of ``v``, so that
    ``h == v @ diag(w) @ v.conj().T`` up to reconstruction tolerance.
    The input is symmetrized as (H + H^dagger)/2 before factoring; a
    Hermiticity defect beyond ``tol`` is an error.
    """
    h = require_hermitian(as_matrix(h), tol)
    w, v = np.linalg.eigh(h)
    return w[::-1].copy(), v[:, ::-1].copy()


def singular_values(x) -> np.ndarray:
    """Singular values of ``x``, sorted descending (count = min(rows, cols))."""
    return np.linalg.svd(as_matrix(x), compute_uv=False)


def psd_sqrt(p, tol: float = TOL_PSD) -> np.ndarray:
    """Hermitian PSD square root.

    Eigenvalues within ``tol`` of zero are clamped to zero before the square
    root (numerical PSD drift from channel composition is expected); an
    eigenvalue below ``-tol`` is an error.
    """
    w, v = spectral(p)
    if w[-1] < -tol:
        raise ValueError(
            f"matrix is not PSD: eigenvalue {w[-1]:.3e} below -{tol:.1e}"
        )
    w = np.clip(w, 0.0, None)
    r = (v * np.sqrt(w)) @ dag(v)
    return (r + dag(r)) / 2


def matrix_to_json(m) -> dict:
    """Repo-wide matrix JSON object: rows, cols, row-major [re, im] pairs."""
    m = as_matrix(m)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in m.reshape(-1)],
    }


def matrix_from_json(obj: dict, cap: int = DIM_CAP) -> np.ndarray:
    """Inverse of :func:`matrix_to_json`; exact up to decimal parsing."""
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        entries = obj["entries"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed matrix JSON: {exc}") from exc
    if rows < 0 or cols < 0 or len(entries) != rows * cols:
        raise ValueError(
            f"matrix JSON has {len(entries)} entries, expected {rows}x{cols}"
        )
    check_cap(max(rows, cols, 1), cap, "matrix JSON")
    flat = np.array(
        [complex(float(re), float(im)) for re, im in entries],
        dtype=np.complex128,
    )
    return as_matrix(flat.reshape(rows, cols))

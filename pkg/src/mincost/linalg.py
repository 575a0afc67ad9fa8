"""Dense complex linear algebra used by every other module.

All operators are plain ``numpy`` arrays.  Hermitian eigendecompositions are
delegated to LAPACK through :func:`numpy.linalg.eigh`; this module adds the
tolerance checks, support-restricted matrix functions and PSD tests that the
measurement code relies on.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NegativeEigenvalue, NotHermitian, NotSquare

TOL_HERM = 1e-9
SUPPORT_CUTOFF = 1e-12


@dataclass(frozen=True, eq=False)
class HermitianEigen:
    eigenvalues: np.ndarray  # real, ascending
    eigenvectors: np.ndarray  # columns orthonormal

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise NotSquare(f"expected a 2-d matrix, got shape {a.shape}")
    return a


def _check_square(a: np.ndarray) -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSquare(f"matrix of shape {a.shape} is not square")


def hermitian_part(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    return (a + a.conj().swapaxes(-1, -2)) / 2


def check_hermitian(m, tol: float = TOL_HERM) -> np.ndarray:
    """Validate Hermiticity (max-entry deviation) and return the symmetrized matrix."""
    a = as_matrix(m)
    _check_square(a)
    dev = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if dev > tol:
        raise NotHermitian(f"max |m - m^dagger| = {dev:.3e} exceeds {tol:.1e}")
    return hermitian_part(a)


def hermitian_eig(m, tol_herm: float = TOL_HERM) -> HermitianEigen:
    a = check_hermitian(m, tol_herm)
    w, v = np.linalg.eigh(a)
    return HermitianEigen(w, v)


def func_on_support(
    m,
    f: Callable[[np.ndarray], np.ndarray],
    support_cutoff: float = SUPPORT_CUTOFF,
) -> np.ndarray:
    """Apply ``f`` to the eigenvalues of a PSD matrix, zeroing the kernel.

    Eigenvalues at or below ``support_cutoff * largest |eigenvalue|`` are
    treated as the kernel and mapped to 0 regardless of ``f``; this is what
    makes ``f = x**-0.5`` a pseudo-inverse square root.
    """
    eig = hermitian_eig(m)
    w, v = eig.eigenvalues, eig.eigenvectors
    if w.size == 0:
        return np.zeros_like(v)
    cut = support_cutoff * float(np.max(np.abs(w)))
    if w[0] < -cut:
        raise NegativeEigenvalue(f"eigenvalue {w[0]:.3e} below -{cut:.1e}")
    keep = w > cut
    g = np.zeros_like(w)
    if keep.any():
        g[keep] = f(w[keep])
    return (v * g) @ v.conj().T


def inv_sqrt_on_support(m, support_cutoff: float = SUPPORT_CUTOFF) -> np.ndarray:
    return func_on_support(m, lambda w: 1.0 / np.sqrt(w), support_cutoff)


def support_projector(m, support_cutoff: float = SUPPORT_CUTOFF) -> np.ndarray:
    return func_on_support(m, np.ones_like, support_cutoff)


def support_basis(m, support_cutoff: float = SUPPORT_CUTOFF) -> np.ndarray:
    """Orthonormal columns spanning the support of a Hermitian PSD matrix."""
    w, v = np.linalg.eigh(np.asarray(m))
    scale = max(float(np.abs(w).max()), 1e-300)
    return v[:, w > support_cutoff * scale]


def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a), np.asarray(b))


def kron_all(factors) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex) if np.ndim(factors[0]) == 2 else np.ones(1, dtype=complex)
    for f in factors:
        out = np.kron(out, np.asarray(f))
    return out


def is_psd(m, tol: float = 1e-9, tol_herm: float = TOL_HERM) -> tuple[bool, float]:
    """Return ``(min eigenvalue >= -tol, min eigenvalue)``."""
    a = check_hermitian(m, tol_herm)
    lo = float(np.linalg.eigvalsh(a)[0]) if a.size else 0.0
    return lo >= -tol, lo


def ket(v) -> np.ndarray:
    return np.asarray(v, dtype=complex).reshape(-1)


def projector(v) -> np.ndarray:
    v = ket(v)
    return np.outer(v, v.conj())


def batched_inv_sqrt(s: np.ndarray, support_cutoff: float = SUPPORT_CUTOFF):
    """Pseudo-inverse square roots and support projectors of a stack of PSD matrices."""
    w, v = np.linalg.eigh(s)
    scale = np.maximum(np.abs(w).max(axis=-1, keepdims=True), 1e-300)
    keep = w > support_cutoff * scale
    g = np.where(keep, 1.0 / np.sqrt(np.where(keep, w, 1.0)), 0.0)
    vh = v.conj().swapaxes(-1, -2)
    inv_sqrt = (v * g[..., None, :]) @ vh
    proj = (v * keep[..., None, :]) @ vh
    return inv_sqrt, proj

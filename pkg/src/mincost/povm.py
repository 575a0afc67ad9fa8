"""The measurement container."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidPovm

POVM_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Povm:
    """Outcome operators stacked as an ``(M, d, d)`` complex array."""

    elements: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.elements, dtype=complex)
        if e.ndim != 3 or e.shape[1] != e.shape[2]:
            raise InvalidPovm(f"POVM elements must have shape (M, d, d), got {e.shape}")
        object.__setattr__(self, "elements", e)

    @property
    def n_outcomes(self) -> int:
        return self.elements.shape[0]

    @property
    def dim(self) -> int:
        return self.elements.shape[1]

    def __len__(self):
        return self.n_outcomes

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, j):
        return self.elements[j]

    def completeness_error(self) -> float:
        return float(np.max(np.abs(self.elements.sum(axis=0) - np.eye(self.dim))))

    def min_eigenvalue(self) -> float:
        h = (self.elements + self.elements.conj().swapaxes(-1, -2)) / 2
        return float(np.linalg.eigvalsh(h).min())

    def validate(self, tol: float = POVM_TOL) -> "Povm":
        herm = float(np.max(np.abs(self.elements - self.elements.conj().swapaxes(-1, -2))))
        if herm > tol:
            raise InvalidPovm(f"POVM element not Hermitian (deviation {herm:.2e})")
        lo = self.min_eigenvalue()
        if lo < -tol:
            raise InvalidPovm(f"POVM element has eigenvalue {lo:.3e}")
        err = self.completeness_error()
        if err > tol:
            raise InvalidPovm(f"POVM elements do not sum to identity (error {err:.2e})")
        return self

    @classmethod
    def from_vectors(cls, vectors) -> "Povm":
        v = np.asarray(vectors, dtype=complex)
        return cls(np.einsum("ja,jb->jab", v, v.conj()))


def as_povm(povm) -> Povm:
    return povm if isinstance(povm, Povm) else Povm(np.asarray(povm))


def tensor_povm(factors) -> Povm:
    """Tensor product of POVMs, outcomes in big-endian order (first factor most significant)."""
    out = np.ones((1, 1, 1), dtype=complex)
    for f in factors:
        e = as_povm(f).elements
        m1, d1 = out.shape[0], out.shape[1]
        m2, d2 = e.shape[0], e.shape[1]
        out = np.einsum("iab,jcd->ijacbd", out, e).reshape(m1 * m2, d1 * d2, d1 * d2)
    return Povm(out)

"""Random instance generators shared by the test modules."""
import numpy as np

from mincost import Ensemble, symmetric_from_coeffs
from mincost.povm import Povm

QDS_COST = np.array([
    [9.34e-5, 7.81e-4, 1.19e-3, 8.70e-4],
    [9.53e-4, 3.25e-4, 9.74e-4, 1.36e-3],
    [1.43e-3, 1.40e-3, 6.35e-5, 9.61e-4],
    [8.10e-4, 1.62e-3, 9.38e-4, 7.07e-5],
])

# two-state minimum error for |0>, |+> at equal priors
P_MIN_ZERO_PLUS = (1 - 1 / np.sqrt(2)) / 2


def random_psd(rng, d, rank=None):
    rank = d if rank is None else rank
    x = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    return x @ x.conj().T


def random_density(rng, d, rank=None):
    m = random_psd(rng, d, rank)
    return m / np.trace(m).real


def random_ensemble(rng, n, d, pure=False):
    states = np.array([random_density(rng, d, 1 if pure else None) for _ in range(n)])
    priors = rng.dirichlet(np.ones(n))
    return Ensemble(states, priors)


def random_povm(rng, m, d):
    a = np.array([random_psd(rng, d) for _ in range(m)])
    w, v = np.linalg.eigh(a.sum(axis=0))
    root = (v / np.sqrt(w)) @ v.conj().T
    return Povm(root @ a @ root)


def random_family(rng, n, dim=None):
    dim = n if dim is None else dim
    b = (rng.random(dim) + 0.05) * np.exp(2j * np.pi * rng.random(dim))
    b /= np.linalg.norm(b)
    freqs = rng.choice(n, size=dim, replace=False)
    return symmetric_from_coeffs(b, n, np.sort(freqs))


def random_nsd_half(rng):
    """Nonpositive N=4 symmetric circulant (c0, c1, c2) with no positive eigenvalue."""
    c0 = -rng.uniform(0.1, 1.0)
    c2 = rng.uniform(c0, 0.0)
    c1 = rng.uniform((c0 + c2) / 2, 0.0)
    return np.array([c0, c1, c2])


def random_psd_circulant_mixture(rng, n):
    """Circulant, symmetric, PSD, row-stochastic a (autocorrelation of a nonnegative vector)."""
    v = rng.random(n)
    v = (v + np.roll(v[::-1], 1)) / 2
    row = np.real(np.fft.ifft(np.abs(np.fft.fft(v)) ** 2))
    row = np.clip(row, 0.0, None)
    row /= row.sum()
    return np.array([np.roll(row, i) for i in range(n)])

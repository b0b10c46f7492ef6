"""Sampling oracles that never touch the eigen-solver paths under test."""

import numpy as np


def unit_samples(rng, count, dim):
    X = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    return X / np.linalg.norm(X, axis=1)[:, None]


def sampled_extremum(objective, dim, rng, samples=10_000, refine_steps=400, maximize=True):
    """Extremum of a scale-invariant objective by sampling plus random local search.

    ``objective`` maps an (m, dim) array of vectors to m real values.
    """
    sign = 1.0 if maximize else -1.0
    X = unit_samples(rng, samples, dim)
    vals = sign * objective(X)
    best = X[np.argmax(vals)]
    best_val = vals.max()
    step = 0.3
    for _ in range(refine_steps):
        cand = best + step * unit_samples(rng, 32, dim)
        cvals = sign * objective(cand)
        k = int(np.argmax(cvals))
        if cvals[k] > best_val:
            best, best_val = cand[k] / np.linalg.norm(cand[k]), cvals[k]
        else:
            step *= 0.9
    return sign * best_val, best


def quad(mat, X):
    return np.einsum("ki,ij,kj->k", X.conj(), mat, X)

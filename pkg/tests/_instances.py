"""Seeded random instances shared by the test modules."""

import numpy as np

from sectorial import Embedding, Form, FormFamily, make_space


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_pd(rng, n, cond_boost=1.0):
    X = crandn(rng, n, n)
    return (X @ X.conj().T) / n + cond_boost * np.eye(n)


def random_invertible(rng, n):
    return np.eye(n) + 0.5 * crandn(rng, n, n) / np.sqrt(n)


def coercive_matrix(rng, gram_v, margin=0.5):
    n = gram_v.shape[0]
    R = crandn(rng, n, n)
    herm = (R + R.conj().T) / 2
    lam = np.linalg.eigvals(np.linalg.solve(gram_v, herm)).real.min()
    return R + (abs(lam) + margin) * gram_v


def random_instance(seed, n=None, hermitian=False):
    """Random (form, embedding) with PD Grams, invertible J and coercive M."""
    rng = np.random.default_rng(seed)
    n = n or int(rng.integers(2, 9))
    gv = random_pd(rng, n)
    gh = random_pd(rng, n)
    V = make_space(gv)
    H = make_space(gh)
    emb = Embedding(V, H, random_invertible(rng, n))
    if hermitian:
        X = crandn(rng, n, n)
        M = X @ X.conj().T / n + 0.5 * gv
    else:
        M = coercive_matrix(rng, gv)
    return Form(V, M), emb


def random_family(seed, n=4, degree=1, scale=0.5, radius=2.0):
    form, emb = random_instance(seed, n)
    rng = np.random.default_rng(seed + 1000)
    coeffs = [form.mat] + [scale * crandn(rng, n, n) for _ in range(degree)]
    return FormFamily(emb, np.array(coeffs), radius)

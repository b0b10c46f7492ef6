import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sectorial import (
    DimensionMismatch,
    DualVector,
    Form,
    NotHermitian,
    NotPositiveDefinite,
    dual_norm,
    inner,
    make_space,
    norm,
    op_norm,
    standard_space,
)
from sectorial.hilbert import smallest_eigenvalue

from _instances import crandn, random_pd
from _oracles import quad, sampled_extremum

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(2, 8)


def test_identity_space():
    V = make_space(np.eye(2))
    assert V.dim == 2


def test_indefinite_gram_rejected():
    with pytest.raises(NotPositiveDefinite) as info:
        make_space(np.diag([1.0, -1.0]))
    assert info.value.eigenvalue == pytest.approx(-1.0)


def test_non_hermitian_gram_rejected():
    with pytest.raises(NotHermitian):
        make_space([[2.0, 1.0], [0.0, 2.0]])


def test_non_square_gram_rejected():
    with pytest.raises(DimensionMismatch):
        make_space(np.ones((2, 3)))


def test_h1_gram_smallest_eigenvalue():
    n = 5
    gram = n * (2 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1))
    V = make_space(gram)
    # oracle: general (non-Hermitian) dense eigensolver
    brute = np.linalg.eigvals(gram).real.min()
    assert smallest_eigenvalue(V) == pytest.approx(brute, rel=1e-12)
    assert smallest_eigenvalue(V) == pytest.approx(1.3397459621556135, rel=1e-12)


def test_inner_examples():
    V = standard_space(2)
    assert inner(V, [1, 1j], [1, 0]) == pytest.approx(1.0)
    assert norm(V, np.zeros(2)) == 0.0
    W = make_space(np.diag([2.0, 3.0]))
    assert norm(W, [1.0, 1.0]) ** 2 == pytest.approx(5.0)


def test_inner_linear_in_first_slot():
    V = make_space(np.diag([2.0, 3.0]))
    x, y = np.array([1.0, 1j]), np.array([1j, 2.0])
    assert inner(V, 1j * x, y) == pytest.approx(1j * inner(V, x, y))
    assert inner(V, x, 1j * y) == pytest.approx(-1j * inner(V, x, y))


def test_inner_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        inner(standard_space(2), [1, 2, 3], [1, 2])


def test_dual_norm_closed_forms():
    assert dual_norm(standard_space(2), DualVector(standard_space(2), [1, 0])) == pytest.approx(1.0)
    V = make_space(np.diag([4.0, 1.0]))
    assert dual_norm(V, DualVector(V, [1, 0])) == pytest.approx(0.5)


def test_dual_norm_against_sampled_sup(rng):
    n = 4
    V = make_space(random_pd(rng, n))
    c = crandn(rng, n)
    f = DualVector(V, c)

    def ratio(X):
        return np.abs(X.conj() @ c) / np.sqrt(quad(V.gram, X).real)

    sup, _ = sampled_extremum(ratio, n, rng)
    exact = dual_norm(V, f)
    assert exact >= sup - 1e-12
    assert (exact - sup) / exact < 1e-2


def test_dual_norm_mismatch():
    with pytest.raises(DimensionMismatch):
        dual_norm(standard_space(3), DualVector(standard_space(2), [1, 0]))


def test_op_norm_trivial_cases():
    V = standard_space(3)
    assert op_norm(np.eye(3), V, V) == pytest.approx(1.0)
    assert op_norm(2 * np.eye(3), V, V.dual) == pytest.approx(2.0)


def test_op_norm_against_sampling(rng):
    n = 3
    V = make_space(random_pd(rng, n))
    W = make_space(random_pd(rng, n))
    T = crandn(rng, n, n)
    exact = op_norm(T, V, W.dual)
    winv = np.linalg.inv(W.gram)

    def ratio(X):
        return np.sqrt(quad(T.conj().T @ winv @ T, X).real / quad(V.gram, X).real)

    # plain Monte-Carlo with 1e5 samples, no refinement
    sup, _ = sampled_extremum(ratio, n, rng, samples=100_000, refine_steps=0)
    assert exact >= sup - 1e-12
    assert (exact - sup) / exact < 1e-2


def test_op_norm_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        op_norm(np.eye(2), standard_space(3), standard_space(2))


@settings(max_examples=30, deadline=None)
@given(seeds, dims)
def test_form_splits_into_hermitian_parts(seed, n):
    rng = np.random.default_rng(seed)
    V = make_space(random_pd(rng, n))
    form = Form(V, crandn(rng, n, n))
    for _ in range(10):
        u = crandn(rng, n)
        re_val = np.vdot(u, form.re_part @ u)
        im_val = np.vdot(u, form.im_part @ u)
        assert abs(re_val.imag) <= 1e-12 * max(1, abs(re_val))
        assert abs(im_val.imag) <= 1e-12 * max(1, abs(im_val))
        assert form(u) == pytest.approx(re_val.real + 1j * im_val.real, rel=1e-12, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(seeds, dims)
def test_form_is_sesquilinear(seed, n):
    rng = np.random.default_rng(seed)
    form = Form(standard_space(n), crandn(rng, n, n))
    u, w, v = crandn(rng, n), crandn(rng, n), crandn(rng, n)
    s, t = complex(*rng.standard_normal(2)), complex(*rng.standard_normal(2))
    scale = np.linalg.norm(form.mat) * (np.linalg.norm(u) + np.linalg.norm(w)) * np.linalg.norm(v)
    assert abs(form(s * u + t * w, v) - (s * form(u, v) + t * form(w, v))) <= 1e-12 * scale
    assert abs(form(v, s * u) - np.conj(s) * form(v, u)) <= 1e-12 * scale


@settings(max_examples=30, deadline=None)
@given(seeds, dims)
def test_cauchy_schwarz(seed, n):
    rng = np.random.default_rng(seed)
    V = make_space(random_pd(rng, n))
    x, y = crandn(rng, n), crandn(rng, n)
    assert abs(inner(V, x, y)) <= norm(V, x) * norm(V, y) * (1 + 1e-12) + 1e-12
    assert inner(V, x, x).imag == pytest.approx(0.0, abs=1e-12 * norm(V, x) ** 2)


@settings(max_examples=30, deadline=None)
@given(seeds, dims)
def test_dual_norm_is_a_norm(seed, n):
    rng = np.random.default_rng(seed)
    V = make_space(random_pd(rng, n))
    f, g = DualVector(V, crandn(rng, n)), DualVector(V, crandn(rng, n))
    s = complex(*rng.standard_normal(2))
    nf, ng = dual_norm(V, f), dual_norm(V, g)
    assert dual_norm(V, DualVector(V, s * f.coeffs)) == pytest.approx(abs(s) * nf, rel=1e-12)
    assert dual_norm(V, DualVector(V, f.coeffs + g.coeffs)) <= nf + ng + 1e-12 * (nf + ng)
    assert dual_norm(V, DualVector(V, np.zeros(n))) == 0.0


@settings(max_examples=30, deadline=None)
@given(seeds, dims, st.sampled_from(["primal", "dual"]), st.sampled_from(["primal", "dual"]))
def test_op_norm_bounds_every_vector(seed, n, src_kind, tgt_kind):
    rng = np.random.default_rng(seed)
    V, W = make_space(random_pd(rng, n)), make_space(random_pd(rng, n))
    src = V if src_kind == "primal" else V.dual
    tgt = W if tgt_kind == "primal" else W.dual
    T = crandn(rng, n, n)
    bound = op_norm(T, src, tgt)
    for u in crandn(rng, 20, n):
        nu = np.sqrt(np.vdot(u, src.metric @ u).real)
        tu = T @ u
        ntu = np.sqrt(np.vdot(tu, tgt.metric @ tu).real)
        assert ntu <= bound * nu * (1 + 1e-10) + 1e-10

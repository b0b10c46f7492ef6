import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sectorial import (
    DimensionMismatch,
    DualVector,
    Embedding,
    Form,
    NotCoercive,
    accretivity_margin,
    associated_operator,
    canonical_injection,
    coercivity_constant,
    laxmilgram_inverse_norm,
    laxmilgram_solve,
    make_space,
    op_norm,
    standard_space,
)

from _instances import coercive_matrix, crandn, random_instance, random_invertible, random_pd
from _oracles import quad, sampled_extremum

seeds = st.integers(0, 2**32 - 1)
GOLDEN = (1 + np.sqrt(5)) / 2


def identity_setup(n):
    V = standard_space(n)
    return V, Embedding(V, standard_space(n), np.eye(n))


def lm_oracle(form, emb):
    """Assemble A^{-1} column by column from Lax-Milgram solves of a(u, .) = <y, j(.)>_H."""
    n = emb.codomain.dim
    cols = []
    for y in np.eye(n):
        f = DualVector(emb.domain, emb.mat.conj().T @ emb.codomain.gram @ y)
        cols.append(emb.mat @ laxmilgram_solve(form, emb.domain, f))
    return np.array(cols).T


# coercivity ------------------------------------------------------------------

def test_alpha_identity():
    assert coercivity_constant(Form(standard_space(2), np.eye(2))).alpha == pytest.approx(1.0)


def test_alpha_diagonal():
    assert coercivity_constant(Form(standard_space(2), np.diag([2.0, 3.0]))).alpha == pytest.approx(2.0)


def test_alpha_against_sampling(rng):
    n = 4
    V = make_space(random_pd(rng, n))
    form = Form(V, coercive_matrix(rng, V.gram))
    cert = coercivity_constant(form)

    def rayleigh(X):
        return quad(form.re_part, X).real / quad(V.gram, X).real

    low, _ = sampled_extremum(rayleigh, n, rng, samples=100_000, maximize=False)
    assert low >= cert.alpha - 1e-12
    assert low - cert.alpha < 1e-2


def test_certificate_invariants(rng):
    form, emb = random_instance(3)
    V = form.space
    cert = coercivity_constant(form)
    w = cert.witness
    assert form(w).real - cert.alpha * np.vdot(w, V.gram @ w).real == pytest.approx(0.0, abs=1e-10)
    for u in crandn(rng, 100, V.dim):
        u = u / np.sqrt(np.vdot(u, V.gram @ u).real)
        assert form(u).real >= cert.alpha - 1e-10


def test_not_coercive_reports_witness():
    with pytest.raises(NotCoercive) as info:
        coercivity_constant(Form(standard_space(2), np.diag([1.0, -0.5])))
    assert info.value.eigenvalue == pytest.approx(-0.5)
    assert abs(info.value.witness[1]) == pytest.approx(1.0)


# solve ----------------------------------------------------------------------

def test_solve_identity():
    V = standard_space(2)
    u = laxmilgram_solve(Form(V, np.eye(2)), V, DualVector(V, [1, 0]))
    np.testing.assert_allclose(u, [1, 0])


def test_solve_diagonal():
    V = standard_space(2)
    u = laxmilgram_solve(Form(V, np.diag([2.0, 4.0])), V, DualVector(V, [2, 4]))
    np.testing.assert_allclose(u, [1, 1])


def test_solve_defining_relation(rng):
    n = 5
    V = make_space(random_pd(rng, n))
    form = Form(V, coercive_matrix(rng, V.gram))
    f = DualVector(V, crandn(rng, n))
    u = laxmilgram_solve(form, V, f)
    for e in np.eye(n):
        assert abs(form(u, e) - f(e)) <= 1e-10 * np.linalg.norm(f.coeffs)


def test_solve_rejects_non_coercive():
    V = standard_space(2)
    with pytest.raises(NotCoercive):
        laxmilgram_solve(Form(V, -np.eye(2)), V, DualVector(V, [1, 0]))


# inverse norm ---------------------------------------------------------------

def test_inverse_norm_identity_is_tight():
    form = Form(standard_space(2), np.eye(2))
    assert laxmilgram_inverse_norm(form) == pytest.approx(1.0)
    assert 1 / coercivity_constant(form).alpha == pytest.approx(1.0)


def test_inverse_norm_diagonal_is_tight():
    assert laxmilgram_inverse_norm(Form(standard_space(2), np.diag([2.0, 3.0]))) == pytest.approx(0.5)


def test_non_normal_shear_is_rejected():
    # Re part has eigenvalues -1 and 3, so this shear is not coercive at all
    with pytest.raises(NotCoercive):
        laxmilgram_inverse_norm(Form(standard_space(2), [[1.0, 4.0], [0.0, 1.0]]))


def test_inverse_norm_non_normal():
    form = Form(standard_space(2), [[1.0, 1.0], [0.0, 1.0]])
    value = laxmilgram_inverse_norm(form)
    assert value == pytest.approx(GOLDEN, rel=1e-12)
    assert coercivity_constant(form).alpha == pytest.approx(0.5)
    assert value <= 1 / coercivity_constant(form).alpha


# injection and associated operator -------------------------------------------

def test_injection_identity():
    _, emb = identity_setup(2)
    np.testing.assert_allclose(canonical_injection(emb, [1, 2j]).coeffs, [1, 2j])


def test_injection_scaling():
    V = standard_space(2)
    emb = Embedding(V, standard_space(2), 2 * np.eye(2))
    np.testing.assert_allclose(canonical_injection(emb, [1, 0]).coeffs, [2, 0])


def test_injection_pairing(rng):
    _, emb = random_instance(11)
    n = emb.domain.dim
    y = crandn(rng, n)
    ky = canonical_injection(emb, y)
    for v in np.eye(n):
        hv = emb.mat @ v
        assert ky(v) == pytest.approx(np.vdot(hv, emb.codomain.gram @ y), abs=1e-12 * np.linalg.norm(y) * 10)


def test_injection_mismatch():
    _, emb = identity_setup(2)
    with pytest.raises(DimensionMismatch):
        canonical_injection(emb, [1, 2, 3])


def test_associated_identity():
    V, emb = identity_setup(2)
    np.testing.assert_allclose(associated_operator(Form(V, np.eye(2)), emb).op_mat, np.eye(2), atol=1e-14)


def test_associated_diagonal():
    V, emb = identity_setup(2)
    op = associated_operator(Form(V, np.diag([1.0, 2.0])), emb)
    np.testing.assert_allclose(op.op_mat, np.diag([1.0, 2.0]), atol=1e-14)


def test_associated_matches_columnwise_oracle(rng):
    n = 4
    V, H = make_space(random_pd(rng, n)), make_space(random_pd(rng, n))
    emb = Embedding(V, H, random_invertible(rng, n))
    form = Form(V, coercive_matrix(rng, V.gram))
    op = associated_operator(form, emb)
    oracle = lm_oracle(form, emb)
    assert np.linalg.norm(op.inv_mat - oracle) <= 1e-9 * np.linalg.norm(oracle)
    np.testing.assert_allclose(op.op_mat @ op.inv_mat, np.eye(n), atol=1e-10)


def test_associated_defining_relation():
    form, emb = random_instance(5)
    op = associated_operator(form, emb)
    n = form.space.dim
    G_H = emb.codomain.gram
    for u in np.eye(n):
        x = emb.mat @ u
        for v in np.eye(n):
            lhs = form(u, v)
            rhs = np.vdot(emb.mat @ v, G_H @ (op.op_mat @ x))
            assert abs(lhs - rhs) <= 1e-10 * np.linalg.norm(form.mat)


def test_accretivity_trivial():
    V, emb = identity_setup(2)
    assert accretivity_margin(associated_operator(Form(V, np.eye(2)), emb)) == pytest.approx(1.0)
    assert accretivity_margin(associated_operator(Form(V, np.diag([1.0, 3.0])), emb)) == pytest.approx(1.0)


def test_accretivity_against_sampling(rng):
    form, emb = random_instance(21)
    op = associated_operator(form, emb)
    margin = accretivity_margin(op)
    G = emb.codomain.gram
    herm = G @ op.op_mat

    def ratio(X):
        return quad(herm, X).real / quad(G, X).real

    low, _ = sampled_extremum(ratio, form.space.dim, rng, maximize=False)
    assert low >= margin - 1e-10
    assert margin >= coercivity_constant(form).alpha / op_norm(emb.mat, emb.domain, emb.codomain) ** 2 - 1e-10


# properties -------------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(seeds)
def test_lax_milgram_bound_random(seed):
    form, _ = random_instance(seed)
    assert laxmilgram_inverse_norm(form) <= 1 / coercivity_constant(form).alpha + 1e-10


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_associated_operator_random(seed):
    form, emb = random_instance(seed)
    op = associated_operator(form, emb)
    oracle = lm_oracle(form, emb)
    assert np.linalg.norm(op.inv_mat - oracle) <= 1e-9 * np.linalg.norm(oracle)
    accretivity_margin(op)


@settings(max_examples=20, deadline=None)
@given(seeds, st.integers(2, 8))
def test_identity_setup_reduces_to_form_matrix(seed, n):
    rng = np.random.default_rng(seed)
    V, emb = identity_setup(n)
    M = coercive_matrix(rng, np.eye(n))
    op = associated_operator(Form(V, M), emb)
    np.testing.assert_allclose(op.op_mat, M, rtol=1e-10, atol=1e-10 * np.linalg.norm(M))

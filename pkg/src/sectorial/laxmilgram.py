"""Coercivity, the Lax-Milgram operator and the associated operator.

The operator associated with a coercive form ``a`` and an embedding ``j`` is
obtained from its inverse, ``A^{-1} = j L^{-1} k``, where ``L: V -> V*`` is the
Lax-Milgram operator (coordinate matrix ``M``) and ``k: H -> V*`` is the
anti-dual of ``j``. In coordinates this reads ``A^{-1} = J M^{-1} J^* G_H``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatch, InvariantViolation, NotCoercive, SolveFailed
from .hilbert import (
    DualVector,
    Embedding,
    Form,
    HilbertSpace,
    hermitian_part,
    lowest_generalized,
    op_norm,
)

SOLVE_RTOL = 1e-10
BOUND_SLACK = 1e-10


@dataclass(frozen=True, eq=False)
class CoercivityCertificate:
    alpha: float
    witness: np.ndarray


@dataclass(frozen=True, eq=False)
class AssociatedOperator:
    space: HilbertSpace
    op_mat: np.ndarray
    inv_mat: np.ndarray
    form: Form
    embedding: Embedding


def coercivity_constant(form: Form, space: HilbertSpace | None = None) -> CoercivityCertificate:
    """Best constant ``alpha`` with ``Re a(u) >= alpha ||u||_V^2``.

    ``alpha`` is the smallest generalized eigenvalue of the Hermitian part of
    the form against ``gram_V``; the witness is the V-unit eigenvector.
    """
    space = space or form.space
    if space.dim != form.space.dim:
        raise DimensionMismatch("form and space dimensions differ")
    alpha, witness = lowest_generalized(form.re_part, space.gram)
    witness = witness / np.sqrt(np.vdot(witness, space.gram @ witness).real)
    if not alpha > 0:
        raise NotCoercive(alpha, witness)
    return CoercivityCertificate(alpha, witness)


def _solve(mat, rhs, rtol: float = SOLVE_RTOL):
    try:
        lu = sla.lu_factor(mat, check_finite=True)
        sol = sla.lu_solve(lu, rhs)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolveFailed(str(exc), float(np.linalg.cond(mat))) from exc
    resid = np.linalg.norm(mat @ sol - rhs)
    if not np.all(np.isfinite(sol)) or resid > rtol * np.linalg.norm(rhs):
        raise SolveFailed("dense solve lost accuracy", float(np.linalg.cond(mat)))
    return sol


def laxmilgram_solve(form: Form, space: HilbertSpace, f: DualVector) -> np.ndarray:
    """Return ``u`` with ``a(u, v) = <f, v>`` for all ``v``, i.e. ``M u = c``."""
    if f.space.dim != space.dim:
        raise DimensionMismatch("right-hand side lives over a different space")
    coercivity_constant(form, space)
    return _solve(form.mat, np.asarray(f.coeffs))


def laxmilgram_inverse_norm(form: Form, space: HilbertSpace | None = None) -> float:
    """Exact ``V* -> V`` norm of the inverse Lax-Milgram operator.

    Raises :class:`InvariantViolation` if the result exceeds ``1/alpha``.
    """
    space = space or form.space
    cert = coercivity_constant(form, space)
    inv = _solve(form.mat, np.eye(space.dim))
    value = op_norm(inv, space.dual, space)
    if value > 1.0 / cert.alpha + BOUND_SLACK * max(1.0, 1.0 / cert.alpha):
        raise InvariantViolation(f"||L^-1|| = {value:.16e} exceeds 1/alpha = {1.0 / cert.alpha:.16e}")
    return value


def canonical_injection(embedding: Embedding, y) -> DualVector:
    """``k y = <y, j(.)>_H`` as the coefficient vector ``J^* G_H y``."""
    y = np.asarray(y, dtype=np.complex128)
    if y.shape != (embedding.codomain.dim,):
        raise DimensionMismatch(f"vector of shape {y.shape} for H of dim {embedding.codomain.dim}")
    J = embedding.mat
    return DualVector(embedding.domain, J.conj().T @ (embedding.codomain.gram @ y))


def associated_matrices(mat, embedding: Embedding) -> tuple[np.ndarray, np.ndarray]:
    """``(A, A^{-1})`` for any invertible form matrix, coercive or not."""
    J = embedding.mat
    k_mat = J.conj().T @ embedding.codomain.gram
    inv_mat = J @ _solve(np.asarray(mat), k_mat)
    op_mat = _solve(inv_mat, np.eye(embedding.codomain.dim))
    return op_mat, inv_mat


def associated_operator(form: Form, embedding: Embedding) -> AssociatedOperator:
    """Associated operator of ``(a, j)`` built from ``A^{-1} = j L^{-1} k``.

    The defining relation ``a(u, v) = <A j u, j v>_H`` is verified on the
    full basis before returning.
    """
    space_h = embedding.codomain
    coercivity_constant(form, embedding.domain)
    op_mat, inv_mat = associated_matrices(form.mat, embedding)

    # <A J u, J v>_H = v^* (J^* G_H A J) u must reproduce M
    J = embedding.mat
    lhs = J.conj().T @ space_h.gram @ op_mat @ J
    rtol = max(SOLVE_RTOL, 100 * np.finfo(float).eps * np.linalg.cond(op_mat) * np.linalg.cond(J) ** 2)
    if np.linalg.norm(lhs - form.mat) > rtol * np.linalg.norm(form.mat):
        raise InvariantViolation("associated operator does not reproduce the form")
    return AssociatedOperator(space_h, op_mat, inv_mat, form, embedding)


def accretivity_margin(op: AssociatedOperator) -> float:
    """Exact ``min Re <Ax, x>_H / ||x||_H^2``.

    Raises :class:`InvariantViolation` when the margin falls below
    ``alpha / c^2`` with ``c = ||j||_{V -> H}``.
    """
    space = op.space
    herm = hermitian_part(space.gram @ op.op_mat)
    margin, _ = lowest_generalized(herm, space.gram)
    alpha = coercivity_constant(op.form, op.embedding.domain).alpha
    c = op.embedding.bound
    floor = alpha / c**2
    if margin < floor - BOUND_SLACK * max(1.0, abs(floor)):
        raise InvariantViolation(f"accretivity margin {margin:.16e} below alpha/c^2 = {floor:.16e}")
    return margin

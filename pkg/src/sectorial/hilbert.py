"""Finite-dimensional complex Hilbert spaces with Gram inner products.

Conventions used throughout the package:

* ``inner(x, y) = y^* G x`` is linear in the first slot.
* A form with coordinate matrix ``M`` acts as ``a(u, v) = v^* M u``.
* An anti-dual vector with coefficients ``c`` pairs as ``<f, v> = v^* c``,
  so the Lax-Milgram operator of a form has coordinate matrix ``M`` itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg as sla

from .errors import (
    DimensionMismatch,
    NotHermitian,
    NotInvertible,
    NotPositiveDefinite,
    SingularGram,
)

DEFAULT_TOL = 1e-12


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=np.complex128)
    out.setflags(write=False)
    return out


def hermitian_part(mat) -> np.ndarray:
    mat = np.asarray(mat)
    return (mat + mat.conj().T) / 2


def skew_part(mat) -> np.ndarray:
    """Hermitian matrix ``(M - M^*) / 2i`` carrying the imaginary part of the form."""
    mat = np.asarray(mat)
    return (mat - mat.conj().T) / 2j


@dataclass(frozen=True, eq=False)
class HilbertSpace:
    gram: np.ndarray

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    @property
    def metric(self) -> np.ndarray:
        return self.gram

    @cached_property
    def chol(self) -> np.ndarray:
        """Lower Cholesky factor ``L`` with ``gram = L L^*``."""
        try:
            return sla.cholesky(self.gram, lower=True)
        except np.linalg.LinAlgError as exc:
            raise SingularGram(str(exc)) from exc

    @cached_property
    def inv_gram(self) -> np.ndarray:
        inv = sla.cho_solve((self.chol, True), np.eye(self.dim))
        if not np.all(np.isfinite(inv)):
            raise SingularGram("gram inverse is not finite")
        return hermitian_part(inv)

    @property
    def dual(self) -> AntiDual:
        return AntiDual(self)

    def operator_norm(self, mat) -> float:
        """H -> H operator norm of ``mat`` (whitened spectral norm)."""
        L = self.chol
        whitened = L.conj().T @ sla.solve_triangular(L, np.asarray(mat).conj().T, lower=True).conj().T
        return float(np.linalg.norm(whitened, 2))

    def vector_norms(self, vecs) -> np.ndarray:
        """Norms of the rows of ``vecs``."""
        vecs = np.atleast_2d(vecs)
        return np.sqrt(np.maximum(np.einsum("ki,ij,kj->k", vecs.conj(), self.gram, vecs).real, 0.0))


@dataclass(frozen=True, eq=False)
class AntiDual:
    """Anti-dual space ``V*`` of a Hilbert space, normed by ``c^* G^{-1} c``."""

    space: HilbertSpace

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def metric(self) -> np.ndarray:
        return self.space.inv_gram


def make_space(gram, tol: float = DEFAULT_TOL) -> HilbertSpace:
    """Validate ``gram`` and wrap it as a :class:`HilbertSpace`.

    Raises
    ------
    NotHermitian
        If ``max|G - G^*| > tol * ||G||``.
    NotPositiveDefinite
        If the smallest eigenvalue is not positive; carries that eigenvalue.
    """
    gram = np.asarray(gram, dtype=np.complex128)
    if gram.ndim != 2 or gram.shape[0] != gram.shape[1] or gram.shape[0] == 0:
        raise DimensionMismatch(f"gram must be a non-empty square matrix, got shape {gram.shape}")
    scale = np.linalg.norm(gram, 2)
    deviation = float(np.max(np.abs(gram - gram.conj().T)))
    if deviation > tol * scale:
        raise NotHermitian(deviation)
    gram = hermitian_part(gram)
    lam_min = float(np.linalg.eigvalsh(gram)[0])
    if not lam_min > 0:
        raise NotPositiveDefinite(lam_min)
    return HilbertSpace(_frozen(gram))


def standard_space(dim: int) -> HilbertSpace:
    return HilbertSpace(_frozen(np.eye(dim)))


def smallest_eigenvalue(space: HilbertSpace) -> float:
    return float(np.linalg.eigvalsh(space.gram)[0])


@dataclass(frozen=True, eq=False)
class Form:
    """Sesquilinear form ``a(u, v) = v^* M u`` on the space ``V``."""

    space: HilbertSpace
    mat: np.ndarray

    def __post_init__(self):
        mat = _frozen(self.mat)
        if mat.shape != (self.space.dim, self.space.dim):
            raise DimensionMismatch(f"form matrix shape {mat.shape} does not match dim {self.space.dim}")
        object.__setattr__(self, "mat", mat)

    @cached_property
    def re_part(self) -> np.ndarray:
        return hermitian_part(self.mat)

    @cached_property
    def im_part(self) -> np.ndarray:
        return skew_part(self.mat)

    def __call__(self, u, v=None) -> complex:
        u = np.asarray(u)
        v = u if v is None else np.asarray(v)
        _check_vec(self.space, u)
        _check_vec(self.space, v)
        return complex(np.vdot(v, self.mat @ u))


@dataclass(frozen=True, eq=False)
class Embedding:
    """The map ``j: V -> H`` as an invertible coordinate matrix ``J``."""

    domain: HilbertSpace
    codomain: HilbertSpace
    mat: np.ndarray

    def __post_init__(self):
        mat = _frozen(self.mat)
        if self.domain.dim != self.codomain.dim:
            raise DimensionMismatch("V and H must have equal dimension")
        if mat.shape != (self.codomain.dim, self.domain.dim):
            raise DimensionMismatch(f"embedding shape {mat.shape} does not match the spaces")
        sv = np.linalg.svd(mat, compute_uv=False)
        if not sv[-1] > 0 or sv[0] / sv[-1] > 1e15:
            raise NotInvertible(f"embedding is singular (smallest singular value {sv[-1]:.3e})")
        object.__setattr__(self, "mat", mat)

    @cached_property
    def pulled_gram(self) -> np.ndarray:
        """H-metric pulled back to V: ``J^* G_H J``."""
        J = self.mat
        return hermitian_part(J.conj().T @ self.codomain.gram @ J)

    @cached_property
    def bound(self) -> float:
        """Smallest ``c`` with ``||ju||_H <= c ||u||_V``."""
        return op_norm(self.mat, self.domain, self.codomain)


def identity_embedding(space_v: HilbertSpace, space_h: HilbertSpace) -> Embedding:
    return Embedding(space_v, space_h, np.eye(space_v.dim))


@dataclass(frozen=True, eq=False)
class DualVector:
    space: HilbertSpace
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = _frozen(self.coeffs)
        if coeffs.shape != (self.space.dim,):
            raise DimensionMismatch(f"dual coefficients of shape {coeffs.shape} for dim {self.space.dim}")
        object.__setattr__(self, "coeffs", coeffs)

    def __call__(self, v) -> complex:
        """Pairing ``<f, v> = v^* c``."""
        v = np.asarray(v)
        _check_vec(self.space, v)
        return complex(np.vdot(v, self.coeffs))


def _check_vec(space, x) -> None:
    if np.shape(x) != (space.dim,):
        raise DimensionMismatch(f"vector of shape {np.shape(x)} for a space of dim {space.dim}")


def inner(space: HilbertSpace, x, y) -> complex:
    x = np.asarray(x)
    y = np.asarray(y)
    _check_vec(space, x)
    _check_vec(space, y)
    return complex(np.vdot(y, space.gram @ x))


def norm(space: HilbertSpace, x) -> float:
    return float(np.sqrt(max(inner(space, x, x).real, 0.0)))


def dual_norm(space: HilbertSpace, f: DualVector) -> float:
    if f.space.dim != space.dim:
        raise DimensionMismatch("dual vector lives over a different space")
    c = f.coeffs
    val = np.vdot(c, sla.cho_solve((space.chol, True), c)).real
    return float(np.sqrt(max(val, 0.0)))


def op_norm(mat, source: HilbertSpace | AntiDual, target: HilbertSpace | AntiDual) -> float:
    """Operator norm of ``mat`` between (anti-dual) spaces.

    Solves the generalized Hermitian eigenproblem
    ``T^* P_target T x = mu P_source x`` and returns ``sqrt(mu_max)``, where
    ``P`` is the Gram matrix of a space or the inverse Gram of an anti-dual.
    """
    mat = np.asarray(mat, dtype=np.complex128)
    if mat.shape != (target.dim, source.dim):
        raise DimensionMismatch(f"map of shape {mat.shape} from dim {source.dim} to dim {target.dim}")
    lhs = hermitian_part(mat.conj().T @ target.metric @ mat)
    try:
        mu = sla.eigh(lhs, hermitian_part(source.metric), eigvals_only=True)
    except np.linalg.LinAlgError as exc:
        raise SingularGram(str(exc)) from exc
    return float(np.sqrt(max(mu[-1], 0.0)))


def lowest_generalized(herm, gram) -> tuple[float, np.ndarray]:
    """Smallest eigenpair of ``herm x = mu gram x`` with ``x^* gram x = 1``."""
    w, vecs = sla.eigh(hermitian_part(herm), hermitian_part(gram), subset_by_index=[0, 0])
    return float(w[0]), vecs[:, 0]


def highest_generalized(herm, gram) -> tuple[float, np.ndarray]:
    n = np.shape(herm)[0]
    w, vecs = sla.eigh(hermitian_part(herm), hermitian_part(gram), subset_by_index=[n - 1, n - 1])
    return float(w[0]), vecs[:, 0]

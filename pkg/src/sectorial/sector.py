"""Sector certification for forms.

A form is sectorial with vertex ``gamma`` and slope ``C`` (semi-angle
``arctan C``) when ``|Im a(u)| <= C (Re a(u) - gamma ||ju||_H^2)`` for all
``u``. In finite dimensions this is equivalent to both Hermitian pencils
``C (H_re - gamma G) -/+ H_im`` being positive semidefinite, where
``G = J^* G_H J``. Everything here is certified through those pencils;
random sampling is only used as an oracle and for plot data.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla

from . import _kernels
from .errors import InfiniteSemiAngle, NegativeUnderRoot, VertexNotZero, VertexTooLarge
from .hilbert import Embedding, Form, hermitian_part, lowest_generalized

PSD_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class SectorEstimate:
    gamma: float
    slope: float
    tight_witness: np.ndarray | None = None

    @property
    def semi_angle(self) -> float:
        return float(np.arctan(self.slope))


class SectorCheck(NamedTuple):
    ok: bool
    margin: float


class NormEquivalence(NamedTuple):
    ok: bool
    lower: float
    upper: float


def _whiten(herm, chol) -> np.ndarray:
    # L^{-1} X L^{-*} for X Hermitian
    tmp = sla.solve_triangular(chol, herm, lower=True)
    tmp = sla.solve_triangular(chol, tmp.conj().T, lower=True)
    return hermitian_part(tmp)


def _metric_chol(embedding: Embedding) -> np.ndarray:
    return sla.cholesky(embedding.pulled_gram, lower=True)


def max_vertex(form: Form, embedding: Embedding) -> float:
    """Largest ``gamma`` with ``Re a(u) >= gamma ||ju||_H^2`` for all ``u``."""
    return lowest_generalized(form.re_part, embedding.pulled_gram)[0]


def sector_check(form: Form, embedding: Embedding, gamma: float, slope: float,
                 rtol: float = PSD_RTOL) -> SectorCheck:
    """Certify the sector with vertex ``gamma`` and slope ``slope``.

    The margin is the smallest generalized eigenvalue (against ``G``) of the
    two pencils; it is negative exactly when some ``u`` violates the sector.
    """
    if slope < 0:
        raise ValueError("slope must be nonnegative")
    G = embedding.pulled_gram
    chol = _metric_chol(embedding)
    shifted = _whiten(form.re_part - gamma * G, chol)
    im_w = _whiten(form.im_part, chol)
    eigs = np.concatenate([np.linalg.eigvalsh(slope * shifted - sign * im_w) for sign in (1.0, -1.0)])
    margin = float(eigs.min())
    # relative to the pencil terms, plus a floor for roundoff in the Hermitian split
    size = slope * np.linalg.norm(shifted, 2) + np.linalg.norm(im_w, 2)
    floor = 64 * np.finfo(float).eps * (np.linalg.norm(_whiten(form.re_part, chol), 2) + size)
    return SectorCheck(margin >= -(rtol * size + floor), margin)


def min_semiangle(form: Form, embedding: Embedding, gamma: float,
                  rtol: float = PSD_RTOL) -> SectorEstimate:
    """Smallest slope ``C`` for the sector with vertex ``gamma``.

    ``C`` is the largest ``|mu|`` over the pencil ``H_im x = mu (H_re - gamma G) x``
    restricted to the range of ``H_re - gamma G``. Directions in its kernel
    must be annihilated by ``H_im``, otherwise no finite slope exists.
    """
    chol = _metric_chol(embedding)
    shifted = _whiten(form.re_part - gamma * embedding.pulled_gram, chol)
    im_w = _whiten(form.im_part, chol)
    kvals, kvecs = np.linalg.eigh(shifted)
    scale = max(float(np.abs(kvals).max()), float(np.linalg.norm(im_w, 2)), np.finfo(float).tiny)
    if kvals[0] < -rtol * scale:
        raise VertexTooLarge(gamma, float(kvals[0]))
    im_scale = float(np.linalg.norm(im_w, 2))
    if im_scale == 0.0:
        return SectorEstimate(float(gamma), 0.0, None)

    kernel = kvals <= rtol * scale
    if kernel.any() and np.linalg.norm(im_w @ kvecs[:, kernel], 2) > 1e3 * rtol * im_scale:
        raise InfiniteSemiAngle(
            f"Im a does not vanish on the kernel of Re a - {gamma}*|.|^2; no finite slope"
        )
    basis = kvecs[:, ~kernel] / np.sqrt(kvals[~kernel])
    reduced = hermitian_part(basis.conj().T @ im_w @ basis)
    mu, vecs = np.linalg.eigh(reduced)
    idx = int(np.argmax(np.abs(mu)))
    w = basis @ vecs[:, idx]
    u = sla.solve_triangular(chol.conj().T, w, lower=False)
    u = u / np.sqrt(np.vdot(u, embedding.pulled_gram @ u).real)
    return SectorEstimate(float(gamma), float(np.abs(mu[idx])), u)


def form_norm(form: Form, embedding: Embedding, gamma: float, u,
              rtol: float = 1e-12) -> float:
    """``(Re a(u) + (1 - gamma) ||ju||_H^2)^{1/2}``."""
    u = np.asarray(u, dtype=np.complex128)
    re_val = form(u).real
    h_sq = np.vdot(u, embedding.pulled_gram @ u).real
    val = re_val + (1.0 - gamma) * h_sq
    if val < 0:
        if val < -rtol * max(abs(re_val), h_sq, np.finfo(float).tiny):
            raise NegativeUnderRoot(f"Re a(u) + (1 - gamma)|u|^2 = {val:.6e} < 0; vertex {gamma} not certified")
        val = 0.0
    return float(np.sqrt(val))


def _norm_matrix(form: Form, embedding: Embedding) -> np.ndarray:
    # matrix of ||u||_a^2 for vertex 0
    return form.re_part + embedding.pulled_gram


def norm_equivalence_check(form_a0: Form, form_az: Form, embedding: Embedding,
                           lower: float = 0.5, upper: float = 1.5,
                           rtol: float = PSD_RTOL) -> NormEquivalence:
    """Extremal ratios of ``||u||_{a_z}^2 / ||u||_{a_0}^2`` for vertex-0 form norms.

    Computed exactly as the extreme generalized eigenvalues of the two
    norm-defining matrices. ``ok`` is true when they lie in ``[lower, upper]``.
    """
    for name, form in (("a_0", form_a0), ("a_z", form_az)):
        try:
            min_semiangle(form, embedding, 0.0, rtol)
        except (VertexTooLarge, InfiniteSemiAngle) as exc:
            raise VertexNotZero(f"{name} is not sectorial with vertex 0: {exc}") from exc
    ratios = sla.eigh(_norm_matrix(form_az, embedding), _norm_matrix(form_a0, embedding),
                      eigvals_only=True)
    lo, hi = float(ratios[0]), float(ratios[-1])
    ok = lo >= lower - rtol and hi <= upper + rtol
    return NormEquivalence(ok, lo, hi)


def random_vectors(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    return rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))


def numerical_range_sample(form: Form, embedding: Embedding, count: int, seed: int) -> np.ndarray:
    """Seeded sample of ``a(u) / ||ju||_H^2`` over random nonzero ``u``."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    vecs = random_vectors(rng, count, form.space.dim)
    num = _kernels.quad_forms(form.mat, vecs)
    den = _kernels.quad_forms(embedding.pulled_gram, vecs).real
    return num / den


def sampled_sector_excess(form: Form, embedding: Embedding, gamma: float, slope: float,
                          count: int, seed: int) -> float:
    """Largest ``|Im w| - C (Re w - gamma)`` over a numerical-range sample."""
    pts = numerical_range_sample(form, embedding, count, seed)
    excess = _kernels.sector_excess(pts.real, pts.imag, gamma, slope, np.ones(len(pts)))
    return float(excess.max())

"""Holomorphic families of forms and numerical holomorphy certificates.

A family is a matrix polynomial ``M(z) = sum_k z^k M_k`` over a disc, so
``z -> a_z(u, v)`` is holomorphic by construction. Holomorphy of derived
operator functions is certified with the trapezoidal mean-value residual
``|| mean_n f(z0 + r e^{i theta_n}) - f(z0) ||``, which is spectrally small
exactly when ``f`` is holomorphic on a neighbourhood of the closed disc.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg as sla

from . import _kernels
from .errors import (
    EvaluationFailure,
    InvariantViolation,
    LambdaInSpectrum,
    NodeSpectrumHit,
    NotNormalized,
    OutsideDomain,
    SolveFailed,
)
from .hilbert import Embedding, Form, highest_generalized, op_norm
from .laxmilgram import associated_matrices
from .sector import max_vertex, min_semiangle, sector_check

SPECTRUM_COND = 1e13


@dataclass(frozen=True, eq=False)
class FormFamily:
    embedding: Embedding
    coeff_mats: np.ndarray
    domain_radius: float

    def __post_init__(self):
        coeffs = np.array(self.coeff_mats, dtype=np.complex128)
        if coeffs.ndim == 2:
            coeffs = coeffs[None]
        n = self.embedding.domain.dim
        if coeffs.ndim != 3 or coeffs.shape[1:] != (n, n) or coeffs.shape[0] == 0:
            raise ValueError(f"coefficient stack of shape {coeffs.shape} for dim {n}")
        if not self.domain_radius > 0:
            raise ValueError("domain_radius must be positive")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeff_mats", coeffs)

    @property
    def degree(self) -> int:
        return self.coeff_mats.shape[0] - 1

    @property
    def space(self):
        return self.embedding.domain


def eval_family(family: FormFamily, z: complex) -> Form:
    """Form ``a_z`` with matrix ``sum_k z^k M_k`` (Horner).

    The domain is the closed disc ``|z| <= domain_radius``.
    """
    z = complex(z)
    if abs(z) > family.domain_radius * (1 + 1e-14):
        raise OutsideDomain(z, family.domain_radius)
    if z == 0:
        return Form(family.space, family.coeff_mats[0])
    return Form(family.space, _kernels.horner(family.coeff_mats, z))


def shift_family(family: FormFamily, s: float) -> FormFamily:
    """Family of ``a_z + s ||j .||_H^2``: only ``M_0`` changes, by ``s G``."""
    coeffs = np.array(family.coeff_mats)
    coeffs[0] = coeffs[0] + s * family.embedding.pulled_gram
    return FormFamily(family.embedding, coeffs, family.domain_radius)


def normalize_family(family: FormFamily) -> tuple[FormFamily, float]:
    """Shift so that ``a_0`` has vertex exactly 1; returns the family and the shift."""
    s = 1.0 - max_vertex(eval_family(family, 0), family.embedding)
    return shift_family(family, s), s


def circle_nodes(z0: complex, r: float, count: int) -> np.ndarray:
    theta = 2 * np.pi * np.arange(count) / count
    return complex(z0) + r * np.exp(1j * theta)


@dataclass(frozen=True, eq=False)
class UniformSectorCertificate:
    """Perturbation radius and the locally uniform sector constants at ``z0 = 0``.

    On ``|z| <= radius`` one has ``||L_z - L_0||_{V -> V*} <= 1/(2 C_big)``,
    where ``||u||_V^2 <= C_big Re a_0(u)``, and every ``a_z`` is sectorial
    with vertex 0 and slope ``slope_bound = 2 C0 + 1``.
    """

    center: complex
    radius: float
    C_big: float
    C0: float
    slope_bound: float
    coeff_norms: np.ndarray
    degenerate: bool = False
    sample_z: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))
    sample_perturbation: np.ndarray = field(default_factory=lambda: np.zeros(0))
    sample_slopes: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def budget(self) -> float:
        return 1.0 / (2.0 * self.C_big)

    def perturbation_bound(self, rho: float) -> float:
        """Upper bound ``sum_{k>=1} rho^k ||M_k||`` on ``||L_z - L_0||`` for ``|z| <= rho``."""
        k = np.arange(1, len(self.coeff_norms) + 1)
        return float(np.sum(self.coeff_norms * rho**k))

    def slope_at(self, rho: float) -> float:
        """Slope at vertex 0 certified on ``|z| <= rho`` by the same chain of estimates.

        With ``eps = C_big * perturbation_bound(rho) <= 1/2`` the chain gives
        ``|Im a_z| <= (C0 + eps) Re a_0 <= (C0 + eps) / (1 - eps) Re a_z``,
        which equals ``2 C0 + 1`` at ``eps = 1/2``.
        """
        eps = min(self.C_big * self.perturbation_bound(rho), 0.5)
        return (self.C0 + eps) / (1.0 - eps)


def _find_radius(norms: np.ndarray, target: float, rmax: float, rtol: float) -> float:
    k = np.arange(1, len(norms) + 1)

    def f(rho):
        return float(np.sum(norms * rho**k))

    if f(rmax) <= target:
        return rmax
    lo, hi = 0.0, rmax
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if f(mid) <= target:
            lo = mid
        else:
            hi = mid
    return lo


def perturbation_radius(family: FormFamily, tol: float = 1e-10, samples: int = 25,
                        bisect_rtol: float = 1e-12) -> UniformSectorCertificate:
    """Certificate for a family whose ``a_0`` is sectorial with vertex 1.

    ``C_big`` is the largest generalized eigenvalue of ``gram_V`` against
    ``Re a_0``; the radius is the largest ``r`` (bisection, clamped to the
    domain) with ``sum_{k>=1} r^k ||M_k||_{V->V*} <= 1/(2 C_big)``. The
    certificate invariants are checked on ``samples`` points of ``|z| = r``.
    """
    emb = family.embedding
    space = emb.domain
    a0 = eval_family(family, 0)
    vertex = max_vertex(a0, emb)
    if vertex < 1.0 - tol * max(1.0, abs(vertex)):
        raise NotNormalized(f"a_0 has vertex {vertex:.12g}; shift the family to vertex 1 first")
    C_big, _ = highest_generalized(space.gram, a0.re_part)
    C0 = min_semiangle(a0, emb, 0.0).slope
    slope_bound = 2.0 * C0 + 1.0
    norms = np.array([op_norm(m, space, space.dual) for m in family.coeff_mats[1:]])
    target = 1.0 / (2.0 * C_big)
    degenerate = bool(norms.size == 0 or np.all(norms == 0))
    if degenerate:
        r = float(family.domain_radius)
    else:
        r = _find_radius(norms, target, float(family.domain_radius), bisect_rtol)

    zs = circle_nodes(0.0, r, samples)
    perturb = np.empty(samples)
    slopes = np.empty(samples)
    for i, z in enumerate(zs):
        az = eval_family(family, z)
        perturb[i] = op_norm(az.mat - a0.mat, space, space.dual)
        if perturb[i] > target * (1 + tol) + tol:
            raise InvariantViolation(f"||L_z - L_0|| = {perturb[i]:.6e} > 1/(2C) = {target:.6e} at z = {z}")
        if not sector_check(az, emb, 0.0, slope_bound).ok:
            raise InvariantViolation(f"a_z at z = {z} violates the sector with slope {slope_bound:.6g}")
        slopes[i] = min_semiangle(az, emb, 0.0).slope
    return UniformSectorCertificate(0j, r, float(C_big), float(C0), slope_bound, norms,
                                    degenerate, zs, perturb, slopes)


def _evaluate_nodes(fn: Callable[[complex], np.ndarray], nodes: np.ndarray) -> list:
    values = []
    for i, z in enumerate(nodes):
        try:
            values.append(np.asarray(fn(z)))
        except Exception as exc:  # reported with the offending node
            raise EvaluationFailure(i, complex(z), exc) from exc
    return values


def _default_norm(x) -> float:
    x = np.asarray(x)
    if x.ndim == 2:
        return float(np.linalg.norm(x, 2))
    return float(np.linalg.norm(x))


def cauchy_residual(fn: Callable[[complex], np.ndarray], z0: complex, r: float,
                    node_count: int = 32, norm: Callable | None = None) -> float:
    """Trapezoidal mean-value residual ``||(1/N) sum_n fn(z_n) - fn(z0)||``."""
    if node_count < 8 or node_count & (node_count - 1):
        raise ValueError("node_count must be a power of two >= 8")
    norm = norm or _default_norm
    values = _evaluate_nodes(fn, circle_nodes(z0, r, node_count))
    center = _evaluate_nodes(fn, np.array([complex(z0)]))[0]
    mean = sum(values[1:], values[0].copy()) / node_count
    return norm(mean - center)


def resolvent(family: FormFamily, z: complex, lam: complex = 0.0) -> np.ndarray:
    """``(lam - A_z)^{-1}`` in H-coordinates.

    For ``lam = 0`` this is ``-J M(z)^{-1} J^* G_H``, the inverse formula
    applied directly; otherwise a dense solve against the associated matrix.
    """
    emb = family.embedding
    mat = eval_family(family, z).mat
    n = emb.codomain.dim
    if lam == 0:
        target = mat
    else:
        try:
            op_mat, _ = associated_matrices(mat, emb)
        except SolveFailed as exc:
            raise LambdaInSpectrum(f"A_z is not defined at z = {z}: {exc}") from exc
        target = lam * np.eye(n) - op_mat
    cond = np.linalg.cond(target)
    if not np.isfinite(cond) or cond > SPECTRUM_COND:
        raise LambdaInSpectrum(f"lambda = {lam} is in the spectrum of A_z at z = {z} (cond {cond:.3e})")
    if lam == 0:
        J = emb.mat
        return -(J @ sla.solve(mat, J.conj().T @ emb.codomain.gram))
    return sla.solve(target, np.eye(n))


@dataclass(frozen=True, eq=False)
class HolomorphyReport:
    center: complex
    radius: float
    node_count: int
    mean_value_residual: float
    derivative_fd_gap: float | None
    node_conditions: np.ndarray
    passed: bool
    tolerance: float
    table: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)


def resolvent_holomorphy_check(family: FormFamily, z0: complex = 0.0, lam: complex = 0.0,
                               r: float = 0.1, node_count: int = 32, tol: float = 1e-8,
                               gap_tol: float = 1e-6) -> HolomorphyReport:
    """Cauchy certificate that ``z -> (lam - A_z)^{-1}`` is holomorphic on the disc.

    Alongside the mean-value residual the Cauchy first derivative is compared
    with a five-point central difference of step ``r/100``.
    """
    space_h = family.embedding.codomain
    nodes = circle_nodes(z0, r, node_count)
    values = []
    conds = np.empty(node_count)
    for i, z in enumerate(nodes):
        try:
            values.append(resolvent(family, z, lam))
        except (LambdaInSpectrum, SolveFailed) as exc:
            raise NodeSpectrumHit(i, complex(z)) from exc
        conds[i] = np.linalg.cond(values[-1])
    center = resolvent(family, z0, lam)
    stack = np.array(values)
    mean = stack.mean(axis=0)
    residual = space_h.operator_norm(mean - center)

    theta = 2 * np.pi * np.arange(node_count) / node_count
    d_cauchy = np.tensordot(np.exp(-1j * theta), stack, axes=1) / (node_count * r)
    h = r / 100
    f = {k: resolvent(family, z0 + k * h, lam) for k in (-2, -1, 1, 2)}
    d_fd = (-f[2] + 8 * f[1] - 8 * f[-1] + f[-2]) / (12 * h)
    denom = max(space_h.operator_norm(d_cauchy), space_h.operator_norm(center) / r, np.finfo(float).tiny)
    gap = space_h.operator_norm(d_cauchy - d_fd) / denom
    passed = bool(residual < tol and gap < gap_tol)
    return HolomorphyReport(complex(z0), float(r), node_count, float(residual), float(gap),
                            conds, passed, tol)

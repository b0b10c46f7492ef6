"""Matrix semigroups, the exponential formula and holomorphy in the parameter.

Convention: functions take the accretive operator ``A``; the semigroup is
``T(t) = exp(-tA)`` (generator ``-A``) and the exponential-formula iterate
is ``(I + (t/n) A)^{-n}``. Norms are taken in the H-metric when a Gram
matrix (or :class:`HilbertSpace`) is supplied, otherwise in the Euclidean one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg as sla

from .errors import (
    BoundViolated,
    EvaluationFailure,
    NonPositiveLambda,
    SectorTooWide,
    SingularStep,
    SolveFailed,
    UniformBoundUnverified,
)
from .hilbert import HilbertSpace, make_space, standard_space
from .holo import FormFamily, HolomorphyReport, UniformSectorCertificate, circle_nodes, eval_family
from .laxmilgram import associated_matrices

# Higham (2005) backward-error bounds for the [m/m] Pade approximant in the 1-norm
_PADE_THETA = {3: 1.495585217958292e-2, 5: 2.539398330063230e-1, 7: 9.504178996162932e-1,
               9: 2.097847961257068e0, 13: 5.371920351148152e0}
STEP_COND = 1e13


@lru_cache(maxsize=None)
def _pade_coeffs(m: int) -> tuple[float, ...]:
    return tuple(
        math.factorial(2 * m - j) * math.factorial(m)
        / (math.factorial(2 * m) * math.factorial(j) * math.factorial(m - j))
        for j in range(m + 1)
    )


def _pade(X: np.ndarray, m: int) -> np.ndarray:
    c = _pade_coeffs(m)
    n = X.shape[0]
    X2 = X @ X
    evens = [np.eye(n, dtype=X.dtype)]
    for _ in range(m // 2):
        evens.append(evens[-1] @ X2)
    odd_sum = sum(c[2 * k + 1] * evens[k] for k in range((m + 1) // 2))
    U = X @ odd_sum
    V = sum(c[2 * k] * evens[k] for k in range(m // 2 + 1))
    return sla.solve(V - U, V + U)


def expm(X) -> np.ndarray:
    """``exp(X)`` by scaling and squaring around a diagonal Pade approximant."""
    X = np.asarray(X, dtype=np.complex128)
    norm1 = np.linalg.norm(X, 1)
    if norm1 == 0:
        return np.eye(X.shape[0], dtype=np.complex128)
    for m in (3, 5, 7, 9):
        if norm1 <= _PADE_THETA[m]:
            return _pade(X, m)
    s = max(0, math.ceil(math.log2(norm1 / _PADE_THETA[13])))
    F = _pade(X / 2.0**s, 13)
    for _ in range(s):
        F = F @ F
    return F


def matrix_exponential(A, t: complex = 1.0) -> np.ndarray:
    """Semigroup value ``exp(-tA)``; ``t`` may be complex."""
    return expm(-complex(t) * np.asarray(A, dtype=np.complex128))


def _as_space(gram, dim: int) -> HilbertSpace:
    if gram is None:
        return standard_space(dim)
    if isinstance(gram, HilbertSpace):
        return gram
    return make_space(gram)


@dataclass(frozen=True, eq=False)
class EulerApprox:
    n: int
    t: float
    value: np.ndarray
    error: float


def _matrix_power(R: np.ndarray, n: int) -> np.ndarray:
    result = None
    base = R
    while n:
        if n & 1:
            result = base if result is None else result @ base
        n >>= 1
        if n:
            base = base @ base
    return result


def _euler_value(A: np.ndarray, t: complex, n: int) -> np.ndarray:
    dim = A.shape[0]
    step = np.eye(dim) + (t / n) * A
    cond = np.linalg.cond(step)
    if not np.isfinite(cond) or cond > STEP_COND:
        raise SingularStep(f"I + (t/n)A is singular for t = {t}, n = {n} (cond {cond:.3e})")
    return _matrix_power(sla.solve(step, np.eye(dim)), n)


def euler_approx(A, t: float, n: int, gram=None) -> EulerApprox:
    """Exponential-formula iterate ``(I + (t/n) A)^{-n}`` and its error against ``exp(-tA)``.

    The single-step resolvent is inverted once and raised to the ``n``-th
    power by repeated squaring.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    A = np.asarray(A, dtype=np.complex128)
    space = _as_space(gram, A.shape[0])
    value = _euler_value(A, t, n)
    error = space.operator_norm(value - matrix_exponential(A, t))
    return EulerApprox(n, t, value, error)


@dataclass(frozen=True, eq=False)
class PowerBoundResult:
    ok: bool
    worst_margin: float
    table: list


def resolvent_power_bound_check(A, M: float = 1.0, omega: float = 0.0,
                                lambdas=(0.25, 0.5, 1.0, 2.0, 4.0), n_max: int = 20,
                                gram=None, tol: float = 1e-10) -> PowerBoundResult:
    """Check ``||(lam + A)^{-n}||_H <= M / (lam - omega)^n`` for ``1 <= n <= n_max``.

    Rows of the returned table are ``(lam, n, norm, bound, margin)``.
    """
    A = np.asarray(A, dtype=np.complex128)
    space = _as_space(gram, A.shape[0])
    dim = A.shape[0]
    rows = []
    worst = math.inf
    for lam in lambdas:
        if lam - omega <= 0:
            raise NonPositiveLambda(f"lambda = {lam} must exceed omega = {omega}")
        R = sla.solve(lam * np.eye(dim) + A, np.eye(dim))
        P = np.eye(dim, dtype=np.complex128)
        for n in range(1, n_max + 1):
            P = P @ R
            value = space.operator_norm(P)
            bound = M / (lam - omega) ** n
            margin = bound - value
            rows.append((float(lam), n, value, bound, margin))
            worst = min(worst, margin)
    return PowerBoundResult(bool(worst >= -tol), float(worst), rows)


@dataclass(frozen=True, eq=False)
class ConvergenceTable:
    t1: float
    rows: list
    monotone: bool

    @property
    def ratios(self) -> list:
        errs = [e for _, e in self.rows]
        return [errs[i] / errs[i + 1] if errs[i + 1] > 0 else math.inf for i in range(len(errs) - 1)]


def exponential_formula_convergence(A, t1: float, n_list, grid: int = 21, gram=None,
                                    noise: float = 1e-12) -> ConvergenceTable:
    """Sup over an equispaced grid on ``[0, t1]`` of the exponential-formula error, per ``n``.

    The grid sup under-approximates the sup over the interval.
    """
    A = np.asarray(A, dtype=np.complex128)
    space = _as_space(gram, A.shape[0])
    times = np.linspace(0.0, t1, grid)
    exact = [matrix_exponential(A, t) for t in times]
    rows = []
    for n in sorted(n_list):
        err = max(space.operator_norm(_euler_value(A, t, n) - ex) for t, ex in zip(times, exact))
        rows.append((int(n), float(err)))
    errs = [e for _, e in rows]
    monotone = all(errs[i + 1] <= errs[i] + noise for i in range(len(errs) - 1))
    return ConvergenceTable(float(t1), rows, monotone)


def _node_operators(family: FormFamily, nodes) -> list:
    ops = []
    for i, z in enumerate(nodes):
        try:
            ops.append(associated_matrices(eval_family(family, z).mat, family.embedding)[0])
        except SolveFailed as exc:
            raise EvaluationFailure(i, complex(z), exc) from exc
    return ops


def _semigroup_sweep(family: FormFamily, z0: complex, r: float, times, node_count: int,
                     M: float, omega: float, bound_tol: float, x=None, iterate_n: int | None = None,
                     violation=UniformBoundUnverified):
    """Node sums and centre values of ``T_z(t)`` (and optionally the Euler iterate)."""
    space = family.embedding.codomain
    nodes = circle_nodes(z0, r, node_count)
    ops = _node_operators(family, nodes)
    center_op = _node_operators(family, [z0])[0]
    dim = space.dim
    sums = np.zeros((len(times), dim, dim), dtype=np.complex128)
    iter_sums = np.zeros_like(sums) if iterate_n else None
    conds = np.array([np.linalg.cond(op) for op in ops])
    for z, op in zip(nodes, ops):
        for k, t in enumerate(times):
            T = matrix_exponential(op, t)
            value = space.operator_norm(T)
            bound = M * math.exp(omega * complex(t).real)
            if value > bound + bound_tol:
                raise violation(complex(z), complex(t), value, bound)
            sums[k] += T
            if iterate_n:
                iter_sums[k] += _euler_value(op, t, iterate_n)
    centers = np.array([matrix_exponential(center_op, t) for t in times])
    iter_centers = None
    if iterate_n:
        iter_centers = np.array([_euler_value(center_op, t, iterate_n) for t in times])
    return sums / node_count, centers, conds, (None if iter_sums is None else iter_sums / node_count), iter_centers


def semigroup_holomorphy_check(family: FormFamily, z0: complex = 0.0, r: float = 0.1,
                               t1: float = 1.0, x=None, node_count: int = 32, t_grid: int = 21,
                               M: float = 1.0, omega: float = 0.0, tol: float = 1e-7,
                               bound_tol: float = 1e-10, iterate_n: int | None = None,
                               times=None) -> tuple[HolomorphyReport, HolomorphyReport]:
    """Cauchy residuals of ``z -> T_z(.)x`` (sup over the t-grid) and of ``z -> T_z(t)``.

    The uniform growth bound ``||T_z(t)||_H <= M e^{omega t}`` is verified on
    every node and grid point first. With ``iterate_n`` the same residuals
    are computed for ``(I + (t/n) A_z)^{-n}`` and stored under ``extra``.
    """
    space = family.embedding.codomain
    times = np.linspace(0.0, t1, t_grid) if times is None else np.asarray(times)
    x = np.ones(space.dim, dtype=np.complex128) if x is None else np.asarray(x, dtype=np.complex128)
    means, centers, conds, it_means, it_centers = _semigroup_sweep(
        family, z0, r, times, node_count, M, omega, bound_tol, x, iterate_n)

    def vec_norm(v):
        return float(np.sqrt(max(np.vdot(v, space.gram @ v).real, 0.0)))

    res_a = [vec_norm((m - c) @ x) for m, c in zip(means, centers)]
    res_b = [space.operator_norm(m - c) for m, c in zip(means, centers)]
    extra_a, extra_b = {}, {}
    if iterate_n:
        extra_a["iterate_residual"] = max(vec_norm((m - c) @ x) for m, c in zip(it_means, it_centers))
        extra_b["iterate_residual"] = max(space.operator_norm(m - c) for m, c in zip(it_means, it_centers))
        extra_a["iterate_n"] = extra_b["iterate_n"] = int(iterate_n)
    reports = []
    for res, extra in ((res_a, extra_a), (res_b, extra_b)):
        sup = float(max(res))
        table = [(complex(t).real, float(v), tol, tol - float(v)) for t, v in zip(times, res)]
        passed = sup <= tol and all(v <= tol for k, v in extra.items() if k == "iterate_residual")
        reports.append(HolomorphyReport(complex(z0), float(r), node_count, sup, None, conds,
                                        bool(passed), tol, table, extra))
    return reports[0], reports[1]


@dataclass(frozen=True, eq=False)
class SectorSemigroupReport:
    passed: bool
    theta: float
    theta_prime: float
    residual: float
    max_norm_ratio: float
    taus: np.ndarray
    table: list


def sector_grid(theta_prime: float, radius_tau: float, grid=(5, 5)) -> np.ndarray:
    n_rad, n_ang = grid
    radii = radius_tau * np.arange(1, n_rad + 1) / n_rad
    angles = np.linspace(-theta_prime, theta_prime, n_ang)
    return (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()


def sector_semigroup_check(family: FormFamily, certificate: UniformSectorCertificate,
                           z0: complex = 0.0, r: float = 0.1, theta_prime: float = np.pi / 4,
                           radius_tau: float = 1.0, grid=(5, 5), M: float = 1.0, omega: float = 0.0,
                           node_count: int = 32, tol: float = 1e-7, bound_tol: float = 1e-10,
                           enforce_sector: bool = True, taus=None) -> SectorSemigroupReport:
    """Complex-time extension: ``T_z(tau) = exp(-tau A_z)`` on a truncated sector.

    The admissible half-angle is ``pi/2 - arctan(slope)`` with the slope the
    certificate guarantees on ``|z - z0| <= r``. Raises :class:`SectorTooWide`
    if ``theta_prime`` is not below it (unless ``enforce_sector`` is off) and
    :class:`BoundViolated` if ``||T_z(tau)|| > M e^{omega Re tau}`` anywhere.
    """
    theta = float(np.pi / 2 - np.arctan(certificate.slope_at(abs(z0 - certificate.center) + r)))
    if enforce_sector and theta_prime >= theta:
        raise SectorTooWide(f"theta' = {theta_prime:.6g} is not below the certified half-angle {theta:.6g}")
    taus = sector_grid(theta_prime, radius_tau, grid) if taus is None else np.asarray(taus, dtype=complex)
    space = family.embedding.codomain
    means, centers, _, _, _ = _semigroup_sweep(family, z0, r, taus, node_count, M, omega,
                                               bound_tol, violation=BoundViolated)
    residuals = [space.operator_norm(m - c) for m, c in zip(means, centers)]
    ratio = max(space.operator_norm(c) / (M * math.exp(omega * tau.real)) for c, tau in zip(centers, taus))
    table = [(float(tau.real), float(tau.imag), float(v), tol, tol - float(v)) for tau, v in zip(taus, residuals)]
    residual = float(max(residuals))
    return SectorSemigroupReport(residual <= tol, theta, float(theta_prime), residual, float(ratio), taus, table)

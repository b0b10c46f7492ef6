"""Built-in scenarios with documented expected outcomes."""

from __future__ import annotations

import math

import numpy as np

from ..errors import UnknownDemo
from .config import CHECK_ORDER, Scenario

ALL_CHECKS = list(CHECK_ORDER)


def _random_pd(rng, n, spread=1.0):
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return spread * (X @ X.conj().T) / n + np.eye(n)


def affine_hermitian() -> Scenario:
    rng = np.random.default_rng(1729)
    n = 6
    J = np.eye(n) + 0.3 * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(n)
    M0 = _random_pd(rng, n, 2.0)
    B = 0.5 * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return Scenario(
        name="affine-hermitian",
        description="M(z) = M0 + zB with M0 Hermitian positive definite, random Grams and embedding.",
        dim=n,
        gram_V=_random_pd(rng, n),
        gram_H=_random_pd(rng, n),
        embedding=J,
        coeffs=[M0, B],
        domain_radius=1.0,
        checks=ALL_CHECKS,
        seed=7,
        expected={c: "pass" for c in ALL_CHECKS},
    )


def schrodinger_1d(n: int = 100) -> Scenario:
    """Dirichlet Laplacian form on (0, 1) plus ``z`` times a complex potential."""
    h = 1.0 / (n + 1)
    x = h * np.arange(1, n + 1)
    lap = (2 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)) / h
    q = (1 + 2j) * np.sin(np.pi * x) + 0.5 * np.cos(3 * np.pi * x)
    return Scenario(
        name="schrodinger-1d",
        description="a_z(u,v) = sum (Du)(conj Dv) h + z sum q u conj(v) h on a uniform grid, "
                    "H = discrete L2, V = discrete H1_0.",
        dim=n,
        gram_V=lap + h * np.eye(n),
        gram_H=h * np.eye(n),
        embedding=np.eye(n),
        coeffs=[lap, h * np.diag(q)],
        domain_radius=4.0,
        checks=ALL_CHECKS,
        seed=11,
        expected={c: "pass" for c in ALL_CHECKS},
    )


def rotated_sector(phi: float = math.pi / 3) -> Scenario:
    """Normal 2x2 family whose numerical range touches the sector edge at angle ``phi``.

    The complex-time check is run with ``theta'`` beyond ``pi/2 - phi`` and the sector
    precondition disabled, so the semigroup bound must fail.
    """
    slope = math.tan(phi)
    M0 = np.diag([1 + 1j * slope, 1 - 1j * slope])
    B = 0.2 * np.diag([1.0, -1.0])
    checks = ["laxmilgram", "sector", "uniform_sector", "resolvent_holo", "remark_a"]
    sc = Scenario(
        name="rotated-sector",
        description="Numerical range on the edge of the sector of half-angle pi/3; remark_a is a "
                    "negative control with theta' beyond the semigroup sector.",
        dim=2,
        gram_V=np.eye(2),
        gram_H=np.eye(2),
        embedding=np.eye(2),
        coeffs=[M0, B],
        domain_radius=1.0,
        checks=checks,
        seed=3,
        expected={c: "pass" for c in checks},
    )
    sc.semigroup.update(theta_prime=math.pi / 2 - phi + 0.1, enforce_sector=False)
    sc.expected["remark_a"] = "fail"
    return sc


def pole_at_r0(r0: float = 0.5) -> Scenario:
    """``M(z) = (1 - z/r0) I``: A_z^{-1} has a pole at ``z = r0``."""
    checks = ["uniform_sector", "resolvent_holo", "thm4a", "thm4b"]
    sc = Scenario(
        name="pole-at-r0",
        description="Negative control: the Cauchy circle passes through the pole at z = r0.",
        dim=2,
        gram_V=np.eye(2),
        gram_H=np.eye(2),
        embedding=np.eye(2),
        coeffs=[np.eye(2), -np.eye(2) / r0],
        domain_radius=2 * r0,
        shift=0.0,
        checks=checks,
        seed=5,
        expected={"uniform_sector": "pass", "resolvent_holo": "fail", "thm4a": "skip", "thm4b": "skip"},
    )
    sc.holo["radius"] = r0
    return sc


def jordan_nonnormal() -> Scenario:
    n = 4
    N = np.eye(n, k=1)
    M0 = 2 * np.eye(n) + 1.5 * N
    B = 0.3j * N.T
    sc = Scenario(
        name="jordan-nonnormal",
        description="Non-normal Jordan-type leading term with a nilpotent perturbation and a "
                    "diagonal H metric.",
        dim=n,
        gram_V=np.eye(n),
        gram_H=np.diag([1.0, 2.0, 3.0, 4.0]),
        embedding=np.eye(n),
        coeffs=[M0, B],
        domain_radius=1.0,
        checks=ALL_CHECKS,
        seed=13,
        expected={c: "pass" for c in ALL_CHECKS},
    )
    sc.semigroup["theta_prime"] = 0.2
    return sc


DEMOS = {
    "affine-hermitian": affine_hermitian,
    "schrodinger-1d": schrodinger_1d,
    "rotated-sector": rotated_sector,
    "pole-at-r0": pole_at_r0,
    "jordan-nonnormal": jordan_nonnormal,
}


def builtin_demo(name: str) -> Scenario:
    try:
        return DEMOS[name]()
    except KeyError:
        raise UnknownDemo(f"unknown demo {name!r}; choose from {', '.join(DEMOS)}") from None

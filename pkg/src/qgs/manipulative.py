"""Operational version of the artificial game played on a single spin.

Both players act on the spin state ``rho0`` with unitaries, player 2 after
player 1, and are paid ``Tr(P U2 U1 rho0 U1^dag U2^dag)``.  On the unitary
family U(theta) this reproduces the density-matrix payoff of the artificial
game, ``eps1 cos^2(t1 + t2) + eps2 sin^2(t1 + t2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ValidationError
from .game import Product, build_artificial_game, payoffs
from .quantum import B, S, strategy_state, unitary_strategy

__all__ = [
    "SIGMA_Y",
    "SIGMA_Z",
    "ManipulativeGame",
    "bilinear_tensor",
    "build_manipulative",
    "closed_form_payoff",
    "cross_validate",
    "evaluate_direct",
    "initial_state",
]

SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def initial_state() -> np.ndarray:
    """Projector onto (sqrt(3)/2, 1/2)."""
    r3 = math.sqrt(3.0)
    return np.array([[0.75, r3 / 4], [r3 / 4, 0.25]], dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class ManipulativeGame:
    rho0: np.ndarray
    scales: tuple  # one diagonal payoff scale per player


def build_manipulative(e1: float, e2: float) -> ManipulativeGame:
    p = 0.5 * np.diag([3 * e1 - e2, 3 * e2 - e1]).astype(np.complex128)
    return ManipulativeGame(rho0=initial_state(), scales=(p, p.copy()))


def evaluate_direct(theta1: float, theta2: float, m: ManipulativeGame) -> tuple[float, float]:
    u = unitary_strategy(theta2) @ unitary_strategy(theta1)
    out = u @ m.rho0 @ u.conj().T
    return tuple(float(np.real(np.trace(p @ out))) for p in m.scales)


def closed_form_payoff(theta1: float, theta2: float, e1: float, e2: float) -> float:
    t = theta1 + theta2
    return e1 * math.cos(t) ** 2 + e2 * math.sin(t) ** 2


def cross_validate(e1: float, e2: float, n: int = 100) -> float:
    """Largest disagreement between the two formalisms and the closed form.

    Runs an ``n x n`` grid of angles in (-pi/2, pi/2] and compares the spin
    protocol against the artificial game's payoff on product strategy states,
    and both against ``closed_form_payoff``.
    """
    if n < 2:
        raise ValidationError(f"grid size must be >= 2, got {n}")
    m = build_manipulative(e1, e2)
    g = build_artificial_game(e1, e2)
    thetas = [-math.pi / 2 + math.pi * (k + 1) / n for k in range(n)]
    states = [strategy_state(t) for t in thetas]
    worst = 0.0
    for t1, r1 in zip(thetas, states):
        for t2, r2 in zip(thetas, states):
            direct = evaluate_direct(t1, t2, m)
            dm = payoffs(Product([r1, r2]), g)
            exact = closed_form_payoff(t1, t2, e1, e2)
            for a, b in zip(direct, dm):
                worst = max(worst, abs(a - b), abs(a - exact), abs(b - exact))
    return worst


def bilinear_tensor(e1: float, e2: float, basis: Optional[Sequence] = None, player: int = 0) -> np.ndarray:
    """Payoff operator of the spin protocol over an operator basis.

    With player strategies ``A1 = sum_mu x_mu s_mu`` and ``A2 = sum_a y_a s_a``
    over ``basis`` (default ``[B, S]``), the protocol payoff is bilinear in
    ``x x^dag`` and ``y y^dag``.  The returned matrix ``H`` satisfies

        Tr(P A2 A1 rho0 A1^dag A2^dag) = Tr((x x^dag kron y y^dag) H)

    with ``H[(mu a), (nu b)] = Tr(P s_b s_nu rho0 s_mu s_a)``, player 1 being
    the major index.  This is an exploratory construction; on the ``[B, S]``
    block it differs from the artificial game's operator off the ``eps``
    pattern, while agreeing with it on the unitary family.
    """
    ops = [B, S] if basis is None else [np.asarray(b, dtype=np.complex128) for b in basis]
    if any(o.shape != (2, 2) for o in ops):
        raise ValidationError("basis operators must be 2x2")
    m = build_manipulative(e1, e2)
    p, rho0 = m.scales[player], m.rho0
    d = len(ops)
    h = np.empty((d * d, d * d), dtype=np.complex128)
    for mu in range(d):
        for a in range(d):
            for nu in range(d):
                for b in range(d):
                    h[mu * d + a, nu * d + b] = np.trace(p @ ops[b] @ ops[nu] @ rho0 @ ops[mu] @ ops[a])
    return h

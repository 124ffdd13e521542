"""Logit (pseudo-dynamical) response for the classical two-strategy game.

With ``delta = epsilon1 - epsilon2`` each player's probability of playing B
responds to the opponent's as

    p = 1 / (1 + exp(beta * delta * (1 - 2 * p_opp)))

Fixed points of the composed self-map ``g = f o f`` give the symmetric and
asymmetric equilibria; as ``beta`` grows past ``2 / |delta|`` the single
fixed point at 0.5 splits into a stable pair (pitchfork).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import ValidationError
from .game import GameDefinition, Product, classical_restriction, payoffs

__all__ = [
    "ClassicalProfile",
    "FixedPoint",
    "FixedPointReport",
    "IterationTrace",
    "TraceStep",
    "bifurcation_scan",
    "delta_of",
    "find_fixed_points",
    "iterate",
    "logit_response",
    "response_derivative",
    "self_map",
    "self_map_derivative",
]

GRID_POINTS = 10_000
MARGINAL_TOL = 1e-9


@dataclass(frozen=True)
class ClassicalProfile:
    p1_b: float
    p2_b: float

    def __post_init__(self):
        for name in ("p1_b", "p2_b"):
            p = getattr(self, name)
            if not (0.0 <= p <= 1.0):
                raise ValidationError(f"{name} must lie in [0, 1], got {p}")


def _check_beta(beta: float) -> None:
    if not beta >= 0:
        raise ValidationError(f"beta must be >= 0, got {beta}")


def logit_response(p_opp_b: float, beta: float, delta: float) -> float:
    """Probability of B given the opponent's probability of B."""
    _check_beta(beta)
    z = beta * delta * (1.0 - 2.0 * p_opp_b)
    if z >= 0:
        e = math.exp(-z)
        return e / (1.0 + e)
    return 1.0 / (1.0 + math.exp(z))


def response_derivative(p: float, beta: float, delta: float) -> float:
    f = logit_response(p, beta, delta)
    return 2.0 * beta * delta * f * (1.0 - f)


def self_map(p: float, beta: float, delta: float) -> float:
    """``f(f(p))``.  Even in ``delta``, so it is evaluated with ``|delta|``."""
    delta = abs(delta)
    return logit_response(logit_response(p, beta, delta), beta, delta)


def self_map_derivative(p: float, beta: float, delta: float) -> float:
    delta = abs(delta)
    return response_derivative(logit_response(p, beta, delta), beta, delta) * response_derivative(p, beta, delta)


def delta_of(g: GameDefinition) -> float:
    """``epsilon1 - epsilon2`` for a game with the artificial classical structure.

    Uses ``g.params`` when present, otherwise requires the diagonal bimatrix to
    be ``[[(a, a), (b, b)], [(b, b), (a, a)]]`` and returns ``a - b``.
    """
    if g.params is not None:
        return g.params[0] - g.params[1]
    if g.dims != (2, 2):
        raise ValidationError("classical solver needs a 2-player game with 2 strategies each")
    (bb, bs), (sb, ss) = classical_restriction(g)
    a, b = bb[0], bs[0]
    if not all(x == a for x in (*bb, *ss)) or not all(x == b for x in (*bs, *sb)):
        raise ValidationError("game diagonal is not of the form [[(a,a),(b,b)],[(b,b),(a,a)]]")
    return a - b


class TraceStep(NamedTuple):
    step: int
    p1_b: float
    p2_b: float
    payoff1: Optional[float]
    payoff2: Optional[float]


@dataclass(frozen=True)
class IterationTrace:
    steps: list
    converged: bool
    final: ClassicalProfile


def _diag_payoffs(g: Optional[GameDefinition], p1: float, p2: float):
    if g is None:
        return None, None
    profile = Product([np.diag([p1, 1.0 - p1]), np.diag([p2, 1.0 - p2])])
    return payoffs(profile, g)


def iterate(
    init: ClassicalProfile,
    beta: float,
    delta: float,
    tol: float = 1e-10,
    max_steps: int = 100_000,
    game: Optional[GameDefinition] = None,
    sequential: bool = False,
) -> IterationTrace:
    """Iterate the paired logit responses from ``init``.

    The default update is simultaneous: both new probabilities are computed
    from the previous step.  ``sequential=True`` lets player 2 respond to
    player 1's fresh value instead.  Payoffs are logged when ``game`` is
    given.  Running out of steps is reported through ``converged``, not raised.
    """
    _check_beta(beta)
    if not tol > 0:
        raise ValidationError(f"tol must be > 0, got {tol}")
    if max_steps < 1:
        raise ValidationError(f"max_steps must be >= 1, got {max_steps}")
    p1, p2 = init.p1_b, init.p2_b
    steps = [TraceStep(0, p1, p2, *_diag_payoffs(game, p1, p2))]
    converged = False
    for k in range(1, max_steps + 1):
        n1 = logit_response(p2, beta, delta)
        n2 = logit_response(n1 if sequential else p1, beta, delta)
        change = max(abs(n1 - p1), abs(n2 - p2))
        p1, p2 = n1, n2
        steps.append(TraceStep(k, p1, p2, *_diag_payoffs(game, p1, p2)))
        if change <= tol:
            converged = True
            break
    return IterationTrace(steps=steps, converged=converged, final=ClassicalProfile(p1, p2))


@dataclass(frozen=True)
class FixedPoint:
    p: float
    stability: str  # "stable", "unstable" or "marginal"
    derivative: float

    @property
    def stable(self) -> bool:
        return self.stability == "stable"


@dataclass(frozen=True)
class FixedPointReport:
    points: list
    delta: float
    beta: float


def _bisect(h, lo: float, hi: float, hlo: float) -> float:
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        hm = h(mid)
        if hm == 0.0:
            return mid
        if (hm > 0) == (hlo > 0):
            lo, hlo = mid, hm
        else:
            hi = mid
    return lo if abs(h(lo)) <= abs(h(hi)) else hi


def find_fixed_points(beta: float, delta: float, grid: int = GRID_POINTS) -> FixedPointReport:
    """All roots of ``g(p) - p`` on [0, 1] with their stability.

    Roots are bracketed by sign changes on a uniform grid and bisected down to
    adjacent floating-point numbers.  A root is stable when ``|g'(p)| < 1``,
    marginal when ``|g'(p)|`` is within 1e-9 of 1.
    """
    _check_beta(beta)

    def h(p):
        return self_map(p, beta, delta) - p

    xs = np.linspace(0.0, 1.0, grid + 1)
    hs = [h(float(x)) for x in xs]
    roots = []
    for k, (x, hx) in enumerate(zip(xs, hs)):
        if hx == 0.0:
            roots.append(float(x))
        elif k + 1 < len(xs) and hs[k + 1] != 0.0 and (hx > 0) != (hs[k + 1] > 0):
            roots.append(_bisect(h, float(x), float(xs[k + 1]), hx))

    points = []
    for r in roots:
        d = self_map_derivative(r, beta, delta)
        if abs(abs(d) - 1.0) <= MARGINAL_TOL:
            label = "marginal"
        else:
            label = "stable" if abs(d) < 1.0 else "unstable"
        points.append(FixedPoint(p=r, stability=label, derivative=abs(d)))
    return FixedPointReport(points=points, delta=delta, beta=beta)


def bifurcation_scan(delta: float, beta_min: float, beta_max: float, n: int) -> list[FixedPointReport]:
    """Fixed-point reports for ``n`` evenly spaced beta values, ascending."""
    if not (0 <= beta_min < beta_max):
        raise ValidationError(f"need 0 <= beta_min < beta_max, got {beta_min}, {beta_max}")
    if n < 2:
        raise ValidationError(f"n must be >= 2, got {n}")
    return [find_fixed_points(float(b), delta) for b in np.linspace(beta_min, beta_max, n)]

"""Unitary strategies U(theta) = cos(theta) B + i sin(theta) S and their best responses.

A player choosing U(theta) is represented in the ``{B, S}`` strategy basis by
the vector ``(cos theta, i sin theta)``.  Angles are only meaningful modulo
pi (U(theta + pi) = -U(theta)), so they are reported in (-pi/2, pi/2].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegeneracyError, StructuralError, ValidationError
from .game import GameDefinition, Product, density, payoffs, reduced_payoff
from .linalg import DEFAULT_TOL, as_matrix, eig_hermitian, expm_hermitian, hermiticity_defect, identity

__all__ = [
    "B",
    "S",
    "QuantumNEFamilyReport",
    "angle_distance",
    "best_response_theta",
    "canonical_angle",
    "gibbs_response",
    "strategy_state",
    "strategy_vector",
    "unitary_strategy",
    "verify_ne_family",
]

B = np.eye(2, dtype=np.complex128)
S = np.array([[0, 1], [1, 0]], dtype=np.complex128)

FAMILY_TOL = 1e-9


def canonical_angle(theta: float) -> float:
    """Representative of ``theta`` modulo pi in (-pi/2, pi/2]."""
    t = math.remainder(theta, math.pi)  # in [-pi/2, pi/2]
    return math.pi / 2 if t <= -math.pi / 2 else t


def angle_distance(a: float, b: float) -> float:
    """Distance between two angles on the circle of circumference pi."""
    return abs(math.remainder(a - b, math.pi))


def unitary_strategy(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, 1j * s], [1j * s, c]])


def strategy_vector(theta: float) -> np.ndarray:
    return np.array([math.cos(theta), 1j * math.sin(theta)])


def strategy_state(theta: float) -> np.ndarray:
    v = strategy_vector(theta)
    return np.outer(v, v.conj())


def _require_two_by_two(g: GameDefinition) -> None:
    if g.dims != (2, 2):
        raise ValidationError(f"needs a 2-player game with 2 strategies each, got dims {list(g.dims)}")


def best_response_theta(theta_opp: float, g: GameDefinition, player: int = 0) -> tuple[float, float]:
    """Best unitary reply of ``player`` to an opponent playing U(theta_opp).

    Returns ``(theta, payoff)``: the angle of the top eigenvector of the
    reduced payoff and its eigenvalue.  Raises DegeneracyError when the top
    eigenvalue is degenerate and StructuralError when the top eigenvector is
    not of the form (cos t, i sin t) up to global phase.
    """
    _require_two_by_two(g)
    hr = reduced_payoff([strategy_state(theta_opp)], g, player)
    eig = eig_hermitian(hr)
    if eig.multiplicity(0) > 1:
        raise DegeneracyError(f"reduced payoff has a degenerate top eigenvalue {eig.top_value:.12g}")
    v = eig.top_vector
    if abs(v[0]) > FAMILY_TOL:
        v = v * (abs(v[0]) / v[0])
    else:
        v = v * (1j * abs(v[1]) / v[1])
    if abs(v[1].real) > FAMILY_TOL or abs(v[0].imag) > FAMILY_TOL:
        raise StructuralError(f"best response {v} is outside the cos/i-sin family")
    theta = canonical_angle(math.atan2(v[1].imag, v[0].real))
    return theta, eig.top_value


@dataclass(frozen=True)
class QuantumNEFamilyReport:
    thetas: list
    responses: list
    payoffs: list
    max_angle_deviation: float
    max_payoff_deviation: float


def verify_ne_family(g: GameDefinition, n_samples: int = 32) -> QuantumNEFamilyReport:
    """Check the profiles (U(theta), U(-theta)) are mutual best responses.

    For ``n_samples`` angles evenly spaced in (-pi/2, pi/2], records player 1's
    best response to U(-theta) and both payoffs at (theta, -theta).  Payoff
    deviations are measured against ``epsilon1`` (``g.params[0]``), or against
    the top eigenvalue of the reduced payoff for games without parameters.
    """
    _require_two_by_two(g)
    if n_samples < 1:
        raise ValidationError(f"n_samples must be >= 1, got {n_samples}")
    thetas = [-math.pi / 2 + math.pi * (k + 1) / n_samples for k in range(n_samples)]
    responses, pays = [], []
    max_angle = max_pay = 0.0
    for theta in thetas:
        response, best = best_response_theta(-theta, g, player=0)
        target = g.params[0] if g.params is not None else best
        e = payoffs(Product([strategy_state(theta), strategy_state(-theta)]), g)
        responses.append(response)
        pays.append(e)
        max_angle = max(max_angle, angle_distance(response, theta))
        max_pay = max(max_pay, *(abs(x - target) for x in e))
    return QuantumNEFamilyReport(thetas, responses, pays, max_angle, max_pay)


def gibbs_response(hr, beta: float) -> np.ndarray:
    """Quantum logit response ``exp(beta H_R) / Tr exp(beta H_R)``.

    At beta = 0 this is the maximally mixed state; for large beta it tends to
    the projector onto the top eigenspace.  On a diagonal ``H_R`` it reduces
    to the classical logit weights.
    """
    if not beta >= 0:
        raise ValidationError(f"beta must be >= 0, got {beta}")
    hr = as_matrix(hr)
    defect, _ = hermiticity_defect(hr)
    if defect > DEFAULT_TOL:
        raise ValidationError("reduced payoff is not Hermitian")
    # shift by the top eigenvalue so large beta cannot overflow
    top = eig_hermitian(hr).top_value
    rho = expm_hermitian(hr - top * identity(hr.shape[0]), beta)
    rho = rho / np.trace(rho).real
    return density(0.5 * (rho + rho.conj().T))

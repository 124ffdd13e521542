"""Global equilibrium states: joint states that maximize every payoff at once.

A system state is a global equilibrium when each player's payoff reaches the
top eigenvalue of that player's payoff operator.  For the artificial game the
maximizer is a Bell-type state whose marginals are maximally mixed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .game import EQUILIBRIUM_TOL, GameDefinition, Joint, Product, marginal, payoff, payoffs
from .linalg import eig_hermitian, frobenius_distance, kron_all, random_density

__all__ = [
    "DEFAULT_SAMPLES",
    "DEFAULT_SEED",
    "EntanglementReport",
    "GESCheck",
    "GESReport",
    "decoherence_gap",
    "entanglement_report",
    "ges_solve",
    "is_ges",
]

DEFAULT_SAMPLES = 200
DEFAULT_SEED = 42
PRODUCT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class GESReport:
    state: Joint
    vector: np.ndarray
    payoffs: tuple
    global_margin: tuple
    degenerate: bool
    common: bool


def ges_solve(g: GameDefinition, tol: float = EQUILIBRIUM_TOL) -> GESReport:
    """Pure state on the top eigenvector of player 1's payoff operator.

    ``common`` tells whether that state also maximizes every other player's
    payoff; if so the reported payoffs are the top eigenvalues themselves,
    otherwise the payoffs the state actually achieves.  ``degenerate`` flags a
    repeated top eigenvalue, in which case the vector is the eigensolver's
    deterministic representative of the top eigenspace.
    """
    eig0 = eig_hermitian(g.payoffs[0])
    v = eig0.top_vector
    state = Joint(np.outer(v, v.conj()), g.dims)
    tops = [eig0.top_value] + [eig_hermitian(h).top_value for h in g.payoffs[1:]]
    achieved = payoffs(state, g)
    margins = tuple(e - t for e, t in zip(achieved, tops))
    common = all(m >= -tol for m in margins)
    return GESReport(
        state=state,
        vector=v,
        payoffs=tuple(tops) if common else achieved,
        global_margin=margins,
        degenerate=eig0.multiplicity(0) > 1,
        common=common,
    )


@dataclass(frozen=True, eq=False)
class GESCheck:
    is_ges: bool
    margins: tuple
    sample_max: tuple
    sample_beaten: bool


def is_ges(
    rho,
    g: GameDefinition,
    tol: float = EQUILIBRIUM_TOL,
    n_samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
) -> GESCheck:
    """Exact global-optimality test plus a random-sampling cross-check.

    The exact part compares each payoff against the top eigenvalue of the
    player's operator.  Sample ``k`` is ``random_density(dim, seed + k)``;
    ``sample_beaten`` is set when any sample pays some player more than
    ``rho`` does (beyond ``tol``).
    """
    state = rho if isinstance(rho, (Joint, Product)) else Joint(rho, g.dims)
    own = payoffs(state, g)
    margins = tuple(e - eig_hermitian(h).top_value for e, h in zip(own, g.payoffs))
    dim = g.payoffs[0].shape[0]
    best = [-np.inf] * g.n_players
    for k in range(n_samples):
        sample = Joint(random_density(dim, seed + k), g.dims)
        for i, e in enumerate(payoffs(sample, g)):
            best[i] = max(best[i], e)
    beaten = any(b > e + tol for b, e in zip(best, own))
    exact = all(m >= -tol for m in margins)
    return GESCheck(is_ges=exact and not beaten, margins=margins, sample_max=tuple(best), sample_beaten=beaten)


@dataclass(frozen=True)
class EntanglementReport:
    purities: tuple
    product_distance: float
    is_product: bool


def _as_joint(rho, dims) -> Joint:
    if isinstance(rho, Joint):
        if tuple(dims) != rho.dims:
            raise ValidationError(f"dims {list(dims)} do not match state dims {list(rho.dims)}")
        return rho
    if isinstance(rho, Product):
        return Joint(rho.matrix, rho.dims)
    return Joint(rho, dims)


def entanglement_report(rho, dims) -> EntanglementReport:
    """Marginal purities and Frobenius distance to the product of marginals."""
    state = _as_joint(rho, dims)
    margs = [marginal(state, i) for i in range(len(state.dims))]
    purities = tuple(float(np.real(np.trace(m @ m))) for m in margs)
    dist = frobenius_distance(state.matrix, kron_all(margs))
    return EntanglementReport(purities=purities, product_distance=dist, is_product=dist <= PRODUCT_TOL)


def decoherence_gap(rho, g: GameDefinition) -> tuple[float, float]:
    """Payoff lost by each player when correlations are replaced by the marginal product."""
    if g.n_players != 2:
        raise ValidationError("decoherence_gap needs a 2-player game")
    state = _as_joint(rho, g.dims)
    uncorrelated = Product([marginal(state, 0), marginal(state, 1)])
    return tuple(payoff(state, g, i) - payoff(uncorrelated, g, i) for i in range(2))

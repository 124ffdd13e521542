"""Games as Hermitian payoff operators on a joint strategy space.

Players are indexed from 0.  A system state is either a ``Product`` of
per-player density matrices or a ``Joint`` density matrix on the whole space,
which may be entangled.  Payoffs are expectation values ``Tr(rho H_i)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import NumericError, ValidationError
from .linalg import (
    DEFAULT_TOL,
    as_matrix,
    eig_hermitian,
    hermiticity_defect,
    kron_all,
    partial_trace,
)

__all__ = [
    "EQUILIBRIUM_TOL",
    "EquilibriumReport",
    "GameDefinition",
    "Joint",
    "PlayerMargin",
    "Product",
    "basis_projector",
    "build_artificial_game",
    "check_equilibrium",
    "classical_restriction",
    "density",
    "marginal",
    "payoff",
    "payoffs",
    "reduced_payoff",
]

EQUILIBRIUM_TOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128)
    a.flags.writeable = False
    return a


def density(m, tol: float = DEFAULT_TOL, name: str = "density matrix") -> np.ndarray:
    """Validate ``m`` as a density matrix and return it as a read-only array.

    Requires Hermiticity, unit trace and eigenvalues >= -tol.
    """
    a = as_matrix(m, name)
    defect, (j, k) = hermiticity_defect(a)
    if defect > tol:
        raise ValidationError(f"{name} not Hermitian at entries ({j},{k})/({k},{j})")
    tr = np.trace(a)
    if abs(tr - 1.0) > tol:
        raise ValidationError(f"{name} has trace {tr.real:.12g}, expected 1")
    lowest = float(np.linalg.eigvalsh(0.5 * (a + a.conj().T))[0])
    if lowest < -tol:
        raise ValidationError(f"{name} has negative eigenvalue {lowest:.3g}")
    return _frozen(a)


def basis_projector(dim: int, k: int) -> np.ndarray:
    p = np.zeros((dim, dim), dtype=np.complex128)
    p[k, k] = 1.0
    return p


@dataclass(frozen=True, eq=False)
class Product:
    """Uncorrelated profile: one density matrix per player."""

    states: tuple
    matrix: np.ndarray

    def __init__(self, states: Sequence):
        states = tuple(density(s, name=f"state of player {i}") for i, s in enumerate(states))
        if not states:
            raise ValidationError("a product profile needs at least one player")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "matrix", _frozen(kron_all(states)))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.shape[0] for s in self.states)


@dataclass(frozen=True, eq=False)
class Joint:
    """System density matrix on the joint space, entangled or not."""

    matrix: np.ndarray
    dims: tuple

    def __init__(self, matrix, dims: Sequence[int]):
        m = density(matrix, name="system state")
        dims = tuple(int(d) for d in dims)
        if not dims or any(d < 1 for d in dims) or math.prod(dims) != m.shape[0]:
            raise ValidationError(f"dims {list(dims)} inconsistent with state dim {m.shape[0]}")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)


Profile = Union[Product, Joint]


@dataclass(frozen=True, eq=False)
class GameDefinition:
    """N-player game with one Hermitian payoff operator per player.

    ``params`` holds ``(epsilon1, epsilon2)`` for the built-in artificial game
    and is ``None`` for user-supplied operators.
    """

    basis_labels: tuple
    payoffs: tuple
    params: Optional[tuple] = None
    dims: tuple = field(init=False)

    def __post_init__(self):
        labels = tuple(tuple(str(x) for x in player) for player in self.basis_labels)
        if not labels or any(len(p) < 1 for p in labels):
            raise ValidationError("every player needs at least one basis label")
        dims = tuple(len(p) for p in labels)
        joint = math.prod(dims)
        if len(self.payoffs) != len(labels):
            raise ValidationError(f"expected {len(labels)} payoff operators, got {len(self.payoffs)}")
        ops = []
        for i, h in enumerate(self.payoffs):
            h = as_matrix(h, f"payoff of player {i}")
            if h.shape[0] != joint:
                raise ValidationError(f"payoff of player {i} has dim {h.shape[0]}, joint space has {joint}")
            defect, (j, k) = hermiticity_defect(h)
            if defect > DEFAULT_TOL:
                raise ValidationError(f"payoff of player {i} not Hermitian at entries ({j},{k})/({k},{j})")
            ops.append(_frozen(h))
        params = self.params
        if params is not None:
            e1, e2 = (float(x) for x in params)
            _check_epsilons(e1, e2)
            params = (e1, e2)
        object.__setattr__(self, "basis_labels", labels)
        object.__setattr__(self, "payoffs", tuple(ops))
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "dims", dims)

    @property
    def n_players(self) -> int:
        return len(self.dims)

    def joint_labels(self) -> list[str]:
        labels = [""]
        for player in self.basis_labels:
            labels = [a + b for a in labels for b in player]
        return labels


def _check_epsilons(e1: float, e2: float) -> None:
    if not (math.isfinite(e1) and math.isfinite(e2)):
        raise ValidationError("epsilon1 and epsilon2 must be finite")
    if e1 <= 0 or e2 <= 0:
        raise ValidationError(f"epsilon1 and epsilon2 must be positive, got ({e1}, {e2})")
    if e1 == e2:
        raise ValidationError(f"epsilon1 must differ from epsilon2, both are {e1}")


def artificial_payoff(e1: float, e2: float) -> np.ndarray:
    """The 4x4 operator e1 |BB+SS><BB+SS| + e2 |BS+SB><BS+SB|."""
    return np.array(
        [[e1, 0, 0, e1],
         [0, e2, e2, 0],
         [0, e2, e2, 0],
         [e1, 0, 0, e1]],
        dtype=np.complex128,
    )


def build_artificial_game(e1: float, e2: float) -> GameDefinition:
    """Two players over ``{B, S}`` sharing the payoff ``artificial_payoff(e1, e2)``."""
    e1, e2 = float(e1), float(e2)
    _check_epsilons(e1, e2)
    h = artificial_payoff(e1, e2)
    return GameDefinition(basis_labels=(("B", "S"), ("B", "S")), payoffs=(h, h), params=(e1, e2))


def classical_restriction(g: GameDefinition) -> list[list[tuple[float, float]]]:
    """Traditional bimatrix read off the diagonals of a 2-player game."""
    if g.n_players != 2:
        raise ValidationError("classical_restriction needs a 2-player game")
    d1, d2 = g.dims
    diag = [np.real(np.diag(h)).reshape(d1, d2) for h in g.payoffs]
    return [[(float(diag[0][a, b]), float(diag[1][a, b])) for b in range(d2)] for a in range(d1)]


def _check_profile(profile: Profile, g: GameDefinition) -> None:
    if tuple(profile.dims) != g.dims:
        raise ValidationError(f"profile dims {list(profile.dims)} do not match game dims {list(g.dims)}")


def _check_player(g: GameDefinition, i: int) -> int:
    i = int(i)
    if not 0 <= i < g.n_players:
        raise ValidationError(f"player index {i} out of range 0..{g.n_players - 1}")
    return i


def _expectation(rho: np.ndarray, h: np.ndarray) -> float:
    # Tr(rho h) without forming the product
    value = complex(np.sum(rho * h.T))
    if abs(value.imag) > DEFAULT_TOL:
        raise NumericError(f"payoff has imaginary part {value.imag:.3g}; operators not Hermitian?")
    return value.real


def payoff(profile: Profile, g: GameDefinition, i: int) -> float:
    """E_i = Tr(rho_s H_i)."""
    _check_profile(profile, g)
    i = _check_player(g, i)
    return _expectation(profile.matrix, g.payoffs[i])


def payoffs(profile: Profile, g: GameDefinition) -> tuple[float, ...]:
    return tuple(payoff(profile, g, i) for i in range(g.n_players))


def _contract_others(h: np.ndarray, dims: Sequence[int], i: int, others: np.ndarray) -> np.ndarray:
    """Operator on player i's space: Tr over the other factors of (others * H).

    ``others`` is a (possibly correlated) state on all factors except i, in
    their original order.
    """
    n = len(dims)
    t = h.reshape(tuple(dims) * 2)
    t = np.moveaxis(t, (i, n + i), (0, 1))
    d = dims[i]
    rest = h.shape[0] // d
    t = t.reshape(d, d, rest, rest)
    return np.einsum("abjk,kj->ab", t, others)


def reduced_payoff(opponent_states, g: GameDefinition, i: int) -> np.ndarray:
    """Reduced payoff matrix of player i against fixed opponents.

    ``opponent_states`` is either a sequence with one density matrix per
    opponent (player order, skipping i) or a single joint density matrix on
    the opponents' combined space.
    """
    i = _check_player(g, i)
    other_dims = [d for k, d in enumerate(g.dims) if k != i]
    if isinstance(opponent_states, np.ndarray) and opponent_states.ndim == 2:
        others = density(opponent_states, name="opponents' state")
    else:
        states = list(opponent_states)
        if len(states) != g.n_players - 1:
            raise ValidationError(f"expected {g.n_players - 1} opponent states, got {len(states)}")
        states = [density(s, name="opponent state") for s in states]
        for s, d in zip(states, other_dims):
            if s.shape[0] != d:
                raise ValidationError(f"opponent state has dim {s.shape[0]}, expected {d}")
        others = kron_all(states) if states else np.ones((1, 1), dtype=np.complex128)
    if others.shape[0] != math.prod(other_dims):
        raise ValidationError(f"opponents' state has dim {others.shape[0]}, expected {math.prod(other_dims)}")
    hr = _contract_others(g.payoffs[i], g.dims, i, others)
    return 0.5 * (hr + hr.conj().T)


def marginal(profile: Profile, i: int) -> np.ndarray:
    """Reduced density matrix of player i."""
    if isinstance(profile, Product):
        return profile.states[i]
    return _frozen(partial_trace(profile.matrix, profile.dims, [i]))


def _opponents_state(profile: Profile, i: int) -> np.ndarray:
    n = len(profile.dims)
    if n == 1:
        return np.ones((1, 1), dtype=np.complex128)
    if isinstance(profile, Product):
        return kron_all(s for k, s in enumerate(profile.states) if k != i)
    return partial_trace(profile.matrix, profile.dims, [k for k in range(n) if k != i])


@dataclass(frozen=True)
class PlayerMargin:
    payoff: float
    best_deviation: float
    margin: float
    global_best: float


@dataclass(frozen=True)
class EquilibriumReport:
    players: tuple
    tol: float
    is_equilibrium: bool
    is_global: bool

    @property
    def margins(self) -> tuple[float, ...]:
        return tuple(p.margin for p in self.players)


def check_equilibrium(profile: Profile, g: GameDefinition, tol: float = EQUILIBRIUM_TOL) -> EquilibriumReport:
    """Unilateral-deviation test against the opponents' reduced state.

    For each player the best deviation is the top eigenvalue of the reduced
    payoff built from the other players' marginal joint state; the profile is
    an equilibrium when no player can gain more than ``tol``.  ``is_global``
    additionally requires every payoff to reach the top eigenvalue of that
    player's full payoff operator.
    """
    _check_profile(profile, g)
    rows = []
    for i in range(g.n_players):
        e = payoff(profile, g, i)
        hr = _contract_others(g.payoffs[i], g.dims, i, _opponents_state(profile, i))
        best = eig_hermitian(0.5 * (hr + hr.conj().T)).top_value
        top = eig_hermitian(g.payoffs[i]).top_value
        rows.append(PlayerMargin(payoff=e, best_deviation=best, margin=e - best, global_best=top))
    ok = all(r.margin >= -tol for r in rows)
    return EquilibriumReport(
        players=tuple(rows),
        tol=tol,
        is_equilibrium=ok,
        is_global=ok and all(r.payoff >= r.global_best - tol for r in rows),
    )


"""JSON game and state files.

Game file::

    {"players": 2,
     "basis": [["B", "S"], ["B", "S"]],
     "payoff": {"kind": "artificial", "epsilon1": 2, "epsilon2": 1}}

or with ``"payoff": {"kind": "explicit", "matrices": [[[re, im], ...], ...]}``,
one flat row-major list of ``[re, im]`` pairs per player.

State file::

    {"dims": [2, 2], "matrix": [[re, im], ...]}

Floats are written with ``repr`` precision so a save/load round trip is
bit-exact.  Every validation error carries the JSON path of the offending
value.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .game import GameDefinition, Joint, build_artificial_game
from .linalg import DEFAULT_TOL

__all__ = [
    "atomic_write_text",
    "game_from_dict",
    "game_to_dict",
    "load_game",
    "load_state",
    "save_game",
    "save_state",
    "state_from_dict",
    "state_to_dict",
]


def atomic_write_text(path, text: str) -> None:
    """Write ``text`` to a temp file next to ``path`` and rename it into place."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _flat_pairs(m: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(m).ravel()]


def _number(x, path: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ValidationError(f"expected a number, got {x!r}", path)
    x = float(x)
    if not math.isfinite(x):
        raise ValidationError("number must be finite", path)
    return x


def _matrix_from_pairs(data, dim: int, path: str) -> np.ndarray:
    if not isinstance(data, list):
        raise ValidationError("expected a list of [re, im] pairs", path)
    if len(data) != dim * dim:
        raise ValidationError(f"expected {dim * dim} entries for a {dim}x{dim} matrix, got {len(data)}", path)
    out = np.empty(dim * dim, dtype=np.complex128)
    for k, pair in enumerate(data):
        p = f"{path}[{k}]"
        if not isinstance(pair, list) or len(pair) != 2:
            raise ValidationError(f"entry ({k // dim},{k % dim}) must be a [re, im] pair", p)
        out[k] = complex(_number(pair[0], p + "[0]"), _number(pair[1], p + "[1]"))
    return out.reshape(dim, dim)


def _check_hermitian(m: np.ndarray, path: str) -> None:
    diff = np.abs(m - m.conj().T)
    if diff.max() > DEFAULT_TOL:
        j, k = (int(x) for x in np.unravel_index(int(np.argmax(diff)), diff.shape))
        raise ValidationError(
            f"matrix not Hermitian: entry ({j},{k}) = {m[j, k]} but entry ({k},{j}) = {m[k, j]}", path
        )


def game_to_dict(g: GameDefinition, explicit: bool = False) -> dict:
    if g.params is not None and not explicit:
        payoff = {"kind": "artificial", "epsilon1": g.params[0], "epsilon2": g.params[1]}
    else:
        payoff = {"kind": "explicit", "matrices": [_flat_pairs(h) for h in g.payoffs]}
    return {"players": g.n_players, "basis": [list(b) for b in g.basis_labels], "payoff": payoff}


def game_from_dict(data) -> GameDefinition:
    if not isinstance(data, dict):
        raise ValidationError("game file must hold a JSON object", "$")
    players = data.get("players")
    if isinstance(players, bool) or not isinstance(players, int) or players < 1:
        raise ValidationError(f"'players' must be a positive integer, got {players!r}", "$.players")
    basis = data.get("basis")
    if not isinstance(basis, list) or len(basis) != players:
        raise ValidationError(f"'basis' must list {players} label lists", "$.basis")
    for i, labels in enumerate(basis):
        if not isinstance(labels, list) or not labels or not all(isinstance(x, str) for x in labels):
            raise ValidationError("expected a non-empty list of strings", f"$.basis[{i}]")
    dims = [len(b) for b in basis]
    payoff = data.get("payoff")
    if not isinstance(payoff, dict):
        raise ValidationError("'payoff' must be an object", "$.payoff")
    kind = payoff.get("kind")
    if kind == "artificial":
        if players != 2 or dims != [2, 2]:
            raise ValidationError("the artificial game has 2 players with 2 strategies each", "$.basis")
        e1 = _number(payoff.get("epsilon1"), "$.payoff.epsilon1")
        e2 = _number(payoff.get("epsilon2"), "$.payoff.epsilon2")
        try:
            g = build_artificial_game(e1, e2)
        except ValidationError as exc:
            raise ValidationError(str(exc), "$.payoff") from None
        return GameDefinition(basis_labels=tuple(tuple(b) for b in basis), payoffs=g.payoffs, params=g.params)
    if kind == "explicit":
        mats = payoff.get("matrices")
        if not isinstance(mats, list) or len(mats) != players:
            raise ValidationError(f"'matrices' must hold one matrix per player ({players})", "$.payoff.matrices")
        joint = math.prod(dims)
        ops = []
        for i, flat in enumerate(mats):
            path = f"$.payoff.matrices[{i}]"
            m = _matrix_from_pairs(flat, joint, path)
            _check_hermitian(m, path)
            ops.append(m)
        return GameDefinition(basis_labels=tuple(tuple(b) for b in basis), payoffs=tuple(ops))
    raise ValidationError(f"unknown payoff kind {kind!r} (expected 'artificial' or 'explicit')", "$.payoff.kind")


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}", "$") from None


def load_game(path) -> GameDefinition:
    return game_from_dict(_read_json(path))


def save_game(g: GameDefinition, path, explicit: bool = False) -> None:
    atomic_write_text(path, json.dumps(game_to_dict(g, explicit), indent=2) + "\n")


def state_to_dict(state: Joint) -> dict:
    return {"dims": list(state.dims), "matrix": _flat_pairs(state.matrix)}


def state_from_dict(data) -> Joint:
    if not isinstance(data, dict):
        raise ValidationError("state file must hold a JSON object", "$")
    dims = data.get("dims")
    if not isinstance(dims, list) or not dims or not all(
        isinstance(d, int) and not isinstance(d, bool) and d >= 1 for d in dims
    ):
        raise ValidationError(f"'dims' must be a list of positive integers, got {dims!r}", "$.dims")
    m = _matrix_from_pairs(data.get("matrix"), math.prod(dims), "$.matrix")
    _check_hermitian(m, "$.matrix")
    try:
        return Joint(m, dims)
    except ValidationError as exc:
        raise ValidationError(str(exc), "$.matrix") from None


def load_state(path) -> Joint:
    return state_from_dict(_read_json(path))


def save_state(state: Joint, path) -> None:
    atomic_write_text(path, json.dumps(state_to_dict(state), indent=2) + "\n")

"""``qgs`` command-line interface.

Exit codes: 0 on success, 1 on invalid input (bad file, bad flag value,
degenerate game), 2 when a numerical procedure does not converge or a
verification fails its tolerance.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from typing import Optional, Sequence

from . import classical, entangled, quantum
from .errors import NumericError, ValidationError
from .files import atomic_write_text, load_game, load_state, save_game
from .game import build_artificial_game, check_equilibrium
from .linalg import eig_hermitian
from .manipulative import cross_validate

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2
CROSS_VALIDATE_TOL = 1e-9


def default_seed() -> int:
    return int(os.environ.get("QGS_SEED", entangled.DEFAULT_SEED))


def num(x: float) -> str:
    """Short human rendering; snaps round-off (e.g. 3.9999999999999996 -> 4.0)."""
    return repr(round(float(x), 10) + 0.0)


def compact(x: float) -> str:
    """Like ``num`` but drops a trailing ``.0`` (4.0 -> 4)."""
    return format(round(float(x), 10) + 0.0, "g")


def g17(x: float) -> str:
    return format(float(x), ".17g")


def ket(vector, labels: Sequence[str], cutoff: float = 1e-9) -> str:
    terms = []
    for c, label in zip(vector, labels):
        if abs(c) <= cutoff:
            continue
        if abs(c.imag) <= cutoff:
            coef, sign = f"{abs(c.real):.4f}", "-" if c.real < 0 else "+"
        elif abs(c.real) <= cutoff:
            coef, sign = f"{abs(c.imag):.4f}i", "-" if c.imag < 0 else "+"
        else:
            coef, sign = f"({c.real:.4f}{c.imag:+.4f}i)", "+"
        terms.append((sign, f"{coef}|{label}>"))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def _write_csv(path: str, header: Sequence[str], rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    atomic_write_text(path, buf.getvalue())


def cmd_eigen(args) -> int:
    g = load_game(args.game)
    labels = g.joint_labels()
    for i, h in enumerate(g.payoffs):
        eig = eig_hermitian(h)
        values = ", ".join(compact(v) for v in eig.eigenvalues)
        print(f"player {i + 1}: {values}; top: {ket(eig.top_vector, labels)}")
    return EXIT_OK


def _parse_init(text: str) -> classical.ClassicalProfile:
    try:
        p1, p2 = (float(x) for x in text.split(","))
    except ValueError:
        raise ValidationError(f"--init expects 'p1,p2', got {text!r}") from None
    return classical.ClassicalProfile(p1, p2)


def cmd_solve_classical(args) -> int:
    g = load_game(args.game)
    delta = classical.delta_of(g)
    trace = classical.iterate(
        _parse_init(args.init), args.beta, delta, tol=args.tol, max_steps=args.max_steps,
        game=g, sequential=args.sequential,
    )
    last = trace.steps[-1]
    print(f"delta {num(delta)}, beta {num(args.beta)}")
    print(f"final p1_b={last.p1_b:.10g} p2_b={last.p2_b:.10g}")
    print(f"payoffs {num(last.payoff1)}, {num(last.payoff2)}")
    print(f"converged {'yes' if trace.converged else 'no'} after {last.step} steps")
    if args.trace:
        _write_csv(
            args.trace,
            ["step", "p1_b", "p2_b", "payoff1", "payoff2"],
            ([s.step, g17(s.p1_b), g17(s.p2_b), g17(s.payoff1), g17(s.payoff2)] for s in trace.steps),
        )
    return EXIT_OK if trace.converged else EXIT_NUMERIC


def cmd_fixed_points(args) -> int:
    g = load_game(args.game)
    report = classical.find_fixed_points(args.beta, classical.delta_of(g))
    print(f"delta {num(report.delta)}, beta {num(report.beta)}: {len(report.points)} fixed point(s)")
    for fp in report.points:
        print(f"  p* = {fp.p:.10f}  {fp.stability}  |g'| = {fp.derivative:.6g}")
    return EXIT_OK


def cmd_bifurcation(args) -> int:
    g = load_game(args.game)
    delta = classical.delta_of(g)
    rows = classical.bifurcation_scan(delta, args.beta_min, args.beta_max, args.steps)
    for r in rows:
        roots = ", ".join(f"{fp.p:.6f}{'' if fp.stable else '*'}" for fp in r.points)
        print(f"beta {r.beta:.6g}: {len(r.points)} root(s) [{roots}]")
    print("(* = not stable)")
    if args.out:
        _write_csv(
            args.out,
            ["beta", "root", "stable"],
            ([g17(r.beta), g17(fp.p), "true" if fp.stable else "false"] for r in rows for fp in r.points),
        )
    return EXIT_OK


def cmd_solve_quantum(args) -> int:
    g = load_game(args.game)
    rep = quantum.verify_ne_family(g, args.samples)
    print("theta      best_response_to(-theta)  payoff1  payoff2")
    for t, r, (e1, e2) in zip(rep.thetas, rep.responses, rep.payoffs):
        print(f"{t:+.6f}  {r:+.6f}                 {num(e1):8s} {num(e2)}")
    print(f"max angle deviation {rep.max_angle_deviation:.3e}")
    print(f"max payoff deviation {rep.max_payoff_deviation:.3e}")
    holds = max(rep.max_angle_deviation, rep.max_payoff_deviation) <= quantum.FAMILY_TOL
    print(f"family (U(theta), U(-theta)) is an equilibrium: {'yes' if holds else 'no'}")
    return EXIT_OK


def cmd_best_response(args) -> int:
    g = load_game(args.game)
    theta, value = quantum.best_response_theta(args.theta, g, player=args.player - 1)
    print(f"{theta:.4f}, payoff {num(value)}")
    return EXIT_OK


def cmd_solve_ges(args) -> int:
    g = load_game(args.game)
    rep = entangled.ges_solve(g)
    ent = entanglement_line(rep.state, g.dims)
    print(f"state: {ket(rep.vector, g.joint_labels())}")
    print("payoffs: " + ", ".join(num(e) for e in rep.payoffs))
    print(f"common maximizer: {'yes' if rep.common else 'no'}; degenerate: {'yes' if rep.degenerate else 'no'}")
    print(ent)
    chk = entangled.is_ges(rep.state, g, n_samples=args.samples, seed=args.seed)
    print(f"sampling check ({args.samples} states, seed {args.seed}): "
          f"max sampled payoffs {', '.join(num(x) for x in chk.sample_max)}")
    return EXIT_OK


def entanglement_line(state, dims) -> str:
    rep = entangled.entanglement_report(state, dims)
    return (f"entangled: {'no' if rep.is_product else 'yes'}; marginal purity "
            + ", ".join(num(p) for p in rep.purities)
            + f"; distance to marginal product {rep.product_distance:.6g}")


def cmd_check(args) -> int:
    g = load_game(args.game)
    state = load_state(args.state)
    rep = check_equilibrium(state, g, tol=args.tol)
    if rep.is_equilibrium:
        print("equilibrium")
    else:
        worst = min(range(len(rep.players)), key=lambda i: rep.players[i].margin)
        print(f"not equilibrium, player {worst + 1} margin {num(rep.players[worst].margin)}")
    for i, p in enumerate(rep.players):
        print(f"  player {i + 1}: payoff {num(p.payoff)}, best deviation {num(p.best_deviation)}, "
              f"margin {num(p.margin)}, global best {num(p.global_best)}")
    print(f"global equilibrium: {'yes' if rep.is_global else 'no'}")
    print(entanglement_line(state, g.dims))
    return EXIT_OK


def cmd_decoherence_gap(args) -> int:
    g = load_game(args.game)
    state = load_state(args.state)
    gap = entangled.decoherence_gap(state, g)
    for i, x in enumerate(gap):
        print(f"player {i + 1}: gap {num(x)}")
    return EXIT_OK


def cmd_cross_validate(args) -> int:
    err = cross_validate(args.epsilon1, args.epsilon2, args.grid)
    ok = err <= CROSS_VALIDATE_TOL
    print(f"max error {err:.1e} {'<=' if ok else '>'} {CROSS_VALIDATE_TOL:g} on a {args.grid}x{args.grid} grid")
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_make_game(args) -> int:
    g = build_artificial_game(args.epsilon1, args.epsilon2)
    save_game(g, args.out, explicit=args.explicit)
    print(f"wrote {args.out}")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qgs", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def game_cmd(name, func, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("game", help="game JSON file")
        sp.set_defaults(func=func)
        return sp

    game_cmd("eigen", cmd_eigen, "spectrum and top eigenvector of each payoff operator")

    sp = game_cmd("solve-classical", cmd_solve_classical, "iterate the logit response map")
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--init", default="0.9,0.9", help="initial p1_b,p2_b (default 0.9,0.9)")
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--max-steps", type=int, default=100_000)
    sp.add_argument("--trace", help="write the iteration trace to this CSV file")
    sp.add_argument("--sequential", action="store_true", help="player 2 responds to player 1's new value")

    sp = game_cmd("fixed-points", cmd_fixed_points, "fixed points of the composed logit map")
    sp.add_argument("--beta", type=float, required=True)

    sp = game_cmd("bifurcation", cmd_bifurcation, "fixed points over a range of beta")
    sp.add_argument("--beta-min", type=float, default=0.0)
    sp.add_argument("--beta-max", type=float, default=5.0)
    sp.add_argument("--steps", type=int, default=51)
    sp.add_argument("--out", help="CSV output file")

    sp = game_cmd("solve-quantum", cmd_solve_quantum, "verify the (U(theta), U(-theta)) family")
    sp.add_argument("--samples", type=int, default=32)

    sp = game_cmd("best-response", cmd_best_response, "best unitary reply to U(theta)")
    sp.add_argument("--theta", type=float, required=True, help="opponent angle in radians")
    sp.add_argument("--player", type=int, choices=(1, 2), default=1, help="responding player")

    sp = game_cmd("solve-ges", cmd_solve_ges, "global equilibrium state")
    sp.add_argument("--samples", type=int, default=entangled.DEFAULT_SAMPLES)
    sp.add_argument("--seed", type=int, default=None, help="sampling seed (default 42 or $QGS_SEED)")

    sp = game_cmd("check", cmd_check, "equilibrium check of a system state")
    sp.add_argument("state", help="state JSON file")
    sp.add_argument("--tol", type=float, default=1e-9)

    sp = game_cmd("decoherence-gap", cmd_decoherence_gap, "payoff lost when correlations are removed")
    sp.add_argument("state", help="state JSON file")

    sp = sub.add_parser("cross-validate", help="spin protocol vs density-matrix payoffs")
    sp.add_argument("--epsilon1", type=float, required=True)
    sp.add_argument("--epsilon2", type=float, required=True)
    sp.add_argument("--grid", type=int, default=100)
    sp.set_defaults(func=cmd_cross_validate)

    sp = sub.add_parser("make-game", help="write the artificial game as JSON")
    sp.add_argument("--epsilon1", type=float, required=True)
    sp.add_argument("--epsilon2", type=float, required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--explicit", action="store_true", help="write the payoff matrices explicitly")
    sp.set_defaults(func=cmd_make_game)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "seed", 0) is None:
        args.seed = default_seed()
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

"""Command line front end.

Exit codes: 0 when Eve wins (or the command succeeded), 1 when Adam wins,
2 on errors and exhausted budgets.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional, TextIO

from . import structure as st
from .backforth import karp_levels
from .game import (ADAM, DEFAULT_NODE_BUDGET, EVE, AdamMove, Player, BudgetExceeded, GameError, GameParams,
                   Position, compose, extension_violation, move_violation, position_violation, solve,
                   verify_eve_strategy)
from .logic import Catalog, LogicError, partition, search_intransitivity
from .ordinal import OMEGA, OrdinalError, from_nat, parse as parse_ordinal, to_nat

SCHEMA_VERSION = 1
EXIT_EVE, EXIT_ADAM, EXIT_ERROR = 0, 1, 2


class CliError(Exception):
    pass


def _ordinal_arg(text: str):
    try:
        return parse_ordinal(text)
    except OrdinalError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _params(args) -> GameParams:
    params = GameParams(args.beta, args.theta, args.alpha)
    for name, v in (("beta", params.beta), ("alpha", params.alpha)):
        if v > OMEGA:
            raise CliError(f"{name}={v} is inadmissible: solving admits only finite ordinals and w")
    return params


def _emit(args, obj: dict, out: TextIO):
    obj = dict(obj)
    obj["schema_version"] = SCHEMA_VERSION
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    out.write(text)
    if args.json_out:
        with open(args.json_out, "w") as fh:
            fh.write(text)


def _winner_code(w) -> int:
    return EXIT_EVE if w is EVE else EXIT_ADAM


# gen --------------------------------------------------------------------

def cmd_gen(args, out):
    words = " ".join(args.spec).split()
    if not words:
        raise CliError("empty generator spec")
    kind, rest = words[0], words[1:]
    try:
        nums = [int(x) for x in rest]
    except ValueError:
        raise CliError(f"generator arguments must be integers: {rest}") from None
    if kind == "random":
        if len(nums) != 1:
            raise CliError("usage: gen random SIZE [--vocab JSON] [--density P]")
        vocab = st.Vocabulary(json.loads(args.vocab)) if args.vocab else st.Vocabulary({"E": 2})
        s = st.random_structure(vocab, nums[0], args.seed, args.density)
    elif kind in st.GENERATORS:
        try:
            s = st.GENERATORS[kind](*nums)
        except TypeError:
            raise CliError(f"wrong number of arguments for {kind}") from None
    else:
        raise CliError(f"unknown generator {kind!r}; expected one of {sorted(st.GENERATORS) + ['random']}")
    text = st.serialize(s) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        out.write(text)
    if args.json_out:
        with open(args.json_out, "w") as fh:
            fh.write(text)
    return 0


# solve ------------------------------------------------------------------

def cmd_solve(args, out):
    m0, m1 = st.load(args.m0), st.load(args.m1)
    params = _params(args)
    res = solve(m0, m1, params, args.mode, args.node_budget,
                strategy="reachable" if (args.strategy or args.verify) else None)
    report = res.to_json(include_strategy=args.strategy)
    if args.verify and res.strategy is not None:
        report["verified"] = verify_eve_strategy(res.strategy, params, m0, m1)
    _emit(args, report, out)
    return _winner_code(res.winner)


# karp -------------------------------------------------------------------

def cmd_karp(args, out):
    m0, m1 = st.load(args.m0), st.load(args.m1)
    up_to = args.up_to
    if args.beta is not None and up_to is not None:
        up_to = max(up_to, args.beta)
    h = karp_levels(m0, m1, args.theta, up_to, node_budget=args.node_budget)
    report = h.to_json()
    code = 0
    if args.beta is not None:
        eq = bool(h.level_encoded(args.beta))
        report["beta"] = args.beta
        report["equivalent"] = eq
        code = 0 if eq else 1
    _emit(args, report, out)
    return code


# classify ----------------------------------------------------------------

def cmd_classify(args, out):
    cat = Catalog([st.load(p) for p in args.files])
    part = partition(cat, _params(args), args.mode, args.node_budget)
    report = part.to_json()
    report["files"] = list(args.files)
    _emit(args, report, out)
    return 0


# compose -----------------------------------------------------------------

def cmd_compose(args, out):
    m0, m1, m2 = (st.load(p) for p in (args.m0, args.m1, args.m2))
    p1 = _params(args)
    p2 = GameParams(p1.beta, p1.theta, args.alpha2)
    r1 = solve(m0, m1, p1, args.mode, args.node_budget)
    r2 = solve(m1, m2, p2, args.mode, args.node_budget)
    report = {"legs": [str(r1.winner), str(r2.winner)]}
    if r1.winner is not EVE or r2.winner is not EVE:
        report["composed"] = None
        _emit(args, report, out)
        return EXIT_ADAM
    K = compose(r1.strategy, r2.strategy)
    ok, why = verify_eve_strategy(K, K.params, m0, m2, explain=True)
    direct = solve(m0, m2, K.params, args.mode, args.node_budget, strategy=None).winner
    report.update({"params": K.params.to_json(), "size": len(K), "verified": ok,
                   "direct_winner": str(direct)})
    if why:
        report["reason"] = why
    if args.strategy:
        report["strategy"] = K.to_json()
    _emit(args, report, out)
    return EXIT_EVE if ok and direct is EVE else EXIT_ERROR


# search-intransitive -----------------------------------------------------

def cmd_search(args, out):
    rep = search_intransitivity(args.family, _params(args), args.mode, args.node_budget)
    obj = rep.to_json()
    obj["family"] = args.family
    obj["result"] = "exhausted, no counterexample" if rep.exhausted else "counterexample"
    _emit(args, obj, out)
    if rep.triple is not None and not rep.verified:
        return EXIT_ERROR
    return 0


# play --------------------------------------------------------------------

def _parse_elems(text: str) -> List[str]:
    text = text.strip()
    if text in ("", "-"):
        return []
    return [e for e in text.replace(",", " ").split() if e]


def parse_adam_move(line: str) -> AdamMove:
    """``BETA ; e0,e1 ; f2`` names beta' and the new elements on each board."""
    parts = line.split(";")
    if len(parts) != 3:
        raise CliError("expected: BETA ; elements of board 0 ; elements of board 1")
    return AdamMove(parse_ordinal(parts[0].strip()), _parse_elems(parts[1]), _parse_elems(parts[2]))


def parse_eve_reply(line: str, height) -> Position:
    """``e0:1 e1:0 | f0:0 | e1>f0``: heights on each board, then the matching."""
    parts = line.split("|")
    if len(parts) != 3:
        raise CliError("expected: heights on board 0 | heights on board 1 | matches a>b")
    hs = []
    for part in parts[:2]:
        h = {}
        for item in _parse_elems(part):
            if ":" not in item:
                raise CliError(f"height entry {item!r} must look like element:height")
            e, v = item.split(":", 1)
            h[e] = parse_ordinal(v)
        hs.append(h)
    g = []
    for item in _parse_elems(parts[2]):
        if ">" not in item:
            raise CliError(f"match {item!r} must look like a>b")
        g.append(tuple(item.split(">", 1)))
    return Position(height, hs[0], hs[1], g)


class Match:
    """One game between a human and the engine, driven line by line."""

    def __init__(self, m0, m1, params: GameParams, side: str, mode: str, budget: int):
        self.m0, self.m1, self.params, self.side = m0, m1, params, side
        self.res = solve(m0, m1, params, mode, budget, strategy=None)
        self.solver = self.res.solver
        self.board = self.solver.board
        self.position = Position(params.beta)
        self.history = []
        self.winner = None
        self.pending: Optional[AdamMove] = None

    # engine helpers ------------------------------------------------------
    def _core(self, p: Position):
        return self.board.encode(p.core)

    def _move_internal(self, p: Position, move: AdamMove):
        u0 = [self.m0.index(e) for e in sorted(move.b0 - p.a0)]
        u1 = [self.m1.index(e) for e in sorted(move.b1 - p.a1)]
        return to_nat(move.beta), u0, u1

    def engine_reply(self, move: AdamMove) -> Optional[Position]:
        p = self.position
        core = self._core(p)
        bp, n0, n1 = self._move_internal(p, move)
        q = self.solver.winning_reply(core, (bp, n0, n1))
        if q is None:
            q = next(iter(self.solver.replies(core, bp, n0, n1)), None)
        return None if q is None else self.board.position(bp, q)

    def engine_move(self) -> AdamMove:
        p = self.position
        core = self._core(p)
        r = to_nat(p.height)
        if r is None:
            top = getattr(self.solver, "stabilization_rank", 0) + 2
            for bp in range(top):
                for m in self.solver.adam_moves(core, bp + 1, full=False):
                    if self.solver.winning_reply(core, m) is None:
                        return self.solver.move_object(core, m)
            m = next(iter(self.solver.adam_moves(core, 1, full=False)))
            return self.solver.move_object(core, m)
        m = self.solver.refuting_move(core, r)
        if m is None:
            m = next(iter(self.solver.adam_moves(core, r, full=False)))
        return self.solver.move_object(core, m)

    # protocol ------------------------------------------------------------
    def adam_can_move(self) -> bool:
        return not self.position.height.is_zero()

    def apply_adam(self, move: AdamMove) -> Optional[str]:
        full = AdamMove(move.beta, self.position.a0 | move.b0, self.position.a1 | move.b1)
        why = move_violation(self.position, full, self.params, self.m0, self.m1)
        if why:
            return why
        if not move.beta.is_finite():
            return "beta' must be finite"
        self.pending = full
        return None

    def apply_eve(self, q: Position) -> Optional[str]:
        move = self.pending
        if q.height != move.beta:
            return f"the reply must have height {move.beta}"
        for e, _ in q.h0:
            if e not in self.m0:
                return f"unknown element {e!r} on board 0"
        for e, _ in q.h1:
            if e not in self.m1:
                return f"unknown element {e!r} on board 1"
        for a, b in q.g:
            if a not in self.m0 or b not in self.m1:
                return f"unknown element in match {a}>{b}"
        why = position_violation(q, self.params, self.m0, self.m1)
        if why:
            return f"not a position: condition {why}"
        why = extension_violation(q, self.position)
        if why:
            return f"does not extend the current position: condition {why}"
        if not (move.b0 <= q.a0 and move.b1 <= q.a1):
            return "the reply must contain every challenged element"
        self.history.append({"adam": move.to_json(), "eve": q.to_json()})
        self.position = q
        self.pending = None
        return None

    def eve_stuck(self):
        self.history.append({"adam": self.pending.to_json(), "eve": None})
        self.winner = ADAM

    def transcript(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "m0": st.to_dict(self.m0), "m1": st.to_dict(self.m1),
                "params": self.params.to_json(), "side": self.side, "mode": self.solver.mode,
                "moves": self.history, "winner": None if self.winner is None else str(self.winner)}


def _run_play(match: Match, lines, say) -> Player:
    """Drive a match; ``lines`` yields the human's input lines (None at end of input)."""
    say(f"engine verdict: {match.res.winner} wins from the start with perfect play")
    while True:
        say(f"position {match.position}")
        if not match.adam_can_move():
            say("Adam cannot move at height 0: Adam loses, Eve wins")
            match.winner = EVE
            return EVE
        if match.side == "adam":
            while True:
                line = next(lines, None)
                if line is None or line.strip() == "quit":
                    raise CliError("input ended before the game finished")
                try:
                    why = match.apply_adam(parse_adam_move(line))
                except (CliError, OrdinalError, st.StructureError) as exc:
                    why = str(exc)
                if why is None:
                    break
                say(f"illegal move: {why}")
            say(f"Adam plays {match.pending}")
            q = match.engine_reply(match.pending)
            if q is None:
                say("Eve has no legal reply: Eve loses, Adam wins")
                match.eve_stuck()
                return ADAM
            why = match.apply_eve(q)
            assert why is None, why
            say(f"Eve replies {q}")
        else:
            move = match.engine_move()
            match.pending = move
            say(f"Adam plays {move}")
            while True:
                line = next(lines, None)
                if line is None or line.strip() == "quit":
                    raise CliError("input ended before the game finished")
                if line.strip() == "resign":
                    say("Eve resigns: Adam wins")
                    match.eve_stuck()
                    return ADAM
                try:
                    why = match.apply_eve(parse_eve_reply(line, move.beta))
                except (CliError, OrdinalError, GameError, st.StructureError) as exc:
                    why = str(exc)
                if why is None:
                    break
                say(f"rejected: {why}")


def _line_iter(stream: TextIO, prompt, say):
    while True:
        prompt()
        line = stream.readline()
        if not line:
            yield None
            return
        line = line.strip()
        if line and not line.startswith("#"):
            yield line


def cmd_play(args, out, stdin=None):
    stdin = stdin or sys.stdin
    if args.replay:
        return cmd_replay(args, out)
    m0, m1 = st.load(args.m0), st.load(args.m1)
    params = _params(args)
    match = Match(m0, m1, params, args.side, args.mode, args.node_budget)

    def say(msg):
        out.write(msg + "\n")

    if args.side == "adam":
        say("you are Adam; enter moves as: BETA ; new elements of board 0 ; new elements of board 1")
    else:
        say("you are Eve; enter replies as: e:h ... | f:h ... | a>b ...  (or 'resign')")
    lines = _line_iter(stdin, lambda: out.write("> ") if stdin.isatty() else None, say)
    winner = _run_play(match, iter(lines), say)
    out.write(f"winner: {winner}\n")
    if args.transcript:
        with open(args.transcript, "w") as fh:
            json.dump(match.transcript(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    if args.json_out:
        with open(args.json_out, "w") as fh:
            json.dump(match.transcript(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return _winner_code(winner)


def replay(transcript: dict, node_budget: int = DEFAULT_NODE_BUDGET):
    """Re-run a transcript in batch mode; returns (winner, list of problems)."""
    m0, m1 = st.from_dict(transcript["m0"]), st.from_dict(transcript["m1"])
    p = transcript["params"]
    params = GameParams(p["beta"], p["theta"], p["alpha"])
    match = Match(m0, m1, params, transcript["side"], transcript.get("mode", "normalized"), node_budget)
    problems = []
    for k, step in enumerate(transcript["moves"]):
        a = step["adam"]
        move = AdamMove(a["beta"], a["b0"], a["b1"])
        if not match.adam_can_move():
            problems.append(f"step {k}: Adam moved at height 0")
            break
        why = match.apply_adam(AdamMove(move.beta, move.b0 - match.position.a0, move.b1 - match.position.a1))
        if why:
            problems.append(f"step {k}: illegal Adam move: {why}")
            break
        if transcript["side"] == "eve":
            engine = match.engine_move()
            if engine != match.pending:
                problems.append(f"step {k}: engine now plays {engine}, transcript has {match.pending}")
        if step["eve"] is None:
            if transcript["side"] == "adam" and match.engine_reply(match.pending) is not None:
                problems.append(f"step {k}: engine has a reply the transcript lacks")
            match.eve_stuck()
            break
        q = Position.from_json(step["eve"])
        if transcript["side"] == "adam":
            engine = match.engine_reply(match.pending)
            if engine != q:
                problems.append(f"step {k}: engine now replies {engine}, transcript has {q}")
        why = match.apply_eve(q)
        if why:
            problems.append(f"step {k}: illegal Eve reply: {why}")
            break
    if match.winner is None and not match.adam_can_move():
        match.winner = EVE
    if match.winner is None:
        problems.append("transcript ends before the game does")
    recorded = transcript.get("winner")
    if recorded is not None and match.winner is not None and str(match.winner) != recorded:
        problems.append(f"replay ends with {match.winner}, transcript records {recorded}")
    return match.winner, problems


def cmd_replay(args, out):
    with open(args.replay) as fh:
        transcript = json.load(fh)
    winner, problems = replay(transcript, args.node_budget)
    _emit(args, {"winner": None if winner is None else str(winner), "problems": problems,
                 "consistent": not problems}, out)
    if problems or winner is None:
        return EXIT_ERROR
    return _winner_code(winner)


# parser ------------------------------------------------------------------

def _common(p: argparse.ArgumentParser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--node-budget", type=_positive, default=d(DEFAULT_NODE_BUDGET),
                   help="abort after this many expanded solver nodes (exit code 2)")
    p.add_argument("--mode", choices=["normalized", "full", "lazy"], default=d("normalized"),
                   help="move spaces: normalized (default), lazy (all Adam moves), full (all moves)")
    p.add_argument("--seed", type=int, default=d(0), help="seed for random generators")
    p.add_argument("--json-out", metavar="PATH", default=d(None), help="also write the JSON result here")


def _game_args(p, alpha_default="1"):
    p.add_argument("--beta", type=_ordinal_arg, required=True, help="game height, e.g. 3 or w")
    p.add_argument("--theta", type=_positive, required=True, help="new elements per challenge")
    p.add_argument("--alpha", type=_ordinal_arg, default=parse_ordinal(alpha_default),
                   help="element heights stay below alpha (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="simgame", description="Solve similarity games between finite structures.")
    _common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a structure as JSON")
    _common(p, True)
    p.add_argument("spec", nargs="+", help="e.g. 'linear_order 4', 'full_tree 2 2', 'random 3'")
    p.add_argument("-o", "--output")
    p.add_argument("--vocab", help='vocabulary JSON for random structures, e.g. {"E": 2}')
    p.add_argument("--density", type=float, default=0.5)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="decide a game")
    _common(p, True)
    p.add_argument("m0")
    p.add_argument("m1")
    _game_args(p)
    p.add_argument("--strategy", action="store_true", help="include Eve's strategy or Adam's move table")
    p.add_argument("--verify", action="store_true", help="verify Eve's extracted strategy")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("karp", help="back-and-forth levels")
    _common(p, True)
    p.add_argument("m0")
    p.add_argument("m1")
    p.add_argument("--theta", type=_positive, required=True)
    p.add_argument("--up-to", type=int, default=None, help="last level to compute (default: until stable)")
    p.add_argument("--beta", type=int, default=None, help="report equivalence at this level")
    p.set_defaults(func=cmd_karp)

    p = sub.add_parser("classify", help="partition a catalog into classes")
    _common(p, True)
    p.add_argument("files", nargs="+")
    _game_args(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("compose", help="compose strategies for (m0,m1) and (m1,m2)")
    _common(p, True)
    p.add_argument("m0")
    p.add_argument("m1")
    p.add_argument("m2")
    _game_args(p)
    p.add_argument("--alpha2", type=_ordinal_arg, default=parse_ordinal("1"), help="alpha of the second leg")
    p.add_argument("--strategy", action="store_true")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("search-intransitive", help="look for E(a,b), E(b,c), not E(a,c)")
    _common(p, True)
    p.add_argument("--family", required=True, help="e.g. 'graphs 3', 'pure 3', 'tree 2 1'")
    _game_args(p, alpha_default="2")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("play", help="play against the engine")
    _common(p, True)
    p.add_argument("m0", nargs="?")
    p.add_argument("m1", nargs="?")
    p.add_argument("--beta", type=_ordinal_arg)
    p.add_argument("--theta", type=_positive)
    p.add_argument("--alpha", type=_ordinal_arg, default=parse_ordinal("1"))
    p.add_argument("--side", choices=["adam", "eve"], default="adam", help="the side you play")
    p.add_argument("--transcript", metavar="PATH", help="write the session transcript here")
    p.add_argument("--replay", metavar="PATH", help="replay a transcript in batch mode")
    p.set_defaults(func=cmd_play)
    return parser


def main(argv: Optional[List[str]] = None, out: Optional[TextIO] = None, stdin: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else 0
    try:
        if args.func is cmd_play:
            if not args.replay and (args.m0 is None or args.m1 is None or args.beta is None or args.theta is None):
                raise CliError("play needs M0 M1 --beta --theta, or --replay PATH")
            return cmd_play(args, out, stdin)
        return args.func(args, out)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (CliError, GameError, LogicError, st.StructureError, OrdinalError, OSError,
            json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

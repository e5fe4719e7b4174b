"""Command-line driver.

    vgw <command> [--input FILE] [--format text|machine] [--window R]
                  [--degree d1,...,dr] [--sigma s1,...,sr] [--jobs N]

Commands: walls (GIT wall table), pair (endpoint pairings), cross
(per-wall terms; on fixed-point-data documents, the localization sum and
its residue), crepant (per-wall crepancy), verify (classical crossing
identity), qcross (quantum crossing per degree, plus degree windows),
and repro <id> (a built-in reproduction, no document needed).

Exit status: 0 on success, 1 for any input or computation error, 2 when
a crossing identity fails to close.  Reports are byte-deterministic for
a fixed input; ``--jobs`` (default from the VGW_JOBS environment
variable) only bounds the worker pool and never changes the output.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from .ring import VgwError, xi
from .geometry import FullConeError, PolPath, TorusAction, Wall, enumerate_walls
from .crossing import (
    KalkmanReport,
    abstract_localization,
    abstract_wall_term,
    classical_pairing,
    wall_term,
)
from .quantum import (
    NegativeMultiplicityError,
    QuantumKalkmanReport,
    novikov_window,
    quantum_pairing,
    quantum_wall_term,
)
from .problems import ProblemDoc, ProblemError, _one_rat, parse_problem
from .repro import open_identities, repro_ids, run_repro
from .reports import (
    Tree,
    action_block,
    finish,
    indexed,
    ivec,
    kalkman_block,
    new_report,
    path_block,
    quantum_block,
    render_report,
    walls_block,
)

COMMANDS = ("walls", "pair", "cross", "qcross", "crepant", "verify", "repro")


class _Overrides:
    """Flag values that take precedence over [options] in the document."""

    def __init__(self, degree=None, sigma=None, window=None, jobs=None, fmt=None):
        self.degree = degree
        self.sigma = sigma
        self.window = window
        self.jobs = jobs
        self.fmt = fmt


def _pmap(fn: Callable, items: Sequence, jobs: int) -> List:
    items = list(items)
    if jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _need(condition: bool, message: str) -> None:
    if not condition:
        raise VgwError(message)


def _guarded_terms(walls: Sequence[Wall], fn: Callable[[Wall], Fraction],
                   jobs: int, origin: str = "") -> List[Fraction]:
    def one(iw):
        i, w = iw
        try:
            return fn(w)
        except VgwError as err:
            where = f"wall {i} (t* = {w.t_star})"
            if origin:
                where = f"{origin}, {where}"
            raise VgwError(f"{where}: {err}") from err

    return _pmap(one, list(enumerate(walls)), jobs)


def _endpoint(action: TorusAction, chi, d, alpha) -> Tuple[Fraction, str]:
    try:
        return quantum_pairing(action, chi, d, alpha), "ok"
    except NegativeMultiplicityError:
        return Fraction(0), "absent-virtual"
    except FullConeError:
        return Fraction(0), "no-empty-chamber"


# ---------------------------------------------------------------------------
# document commands
# ---------------------------------------------------------------------------

def _engine_inputs(doc: ProblemDoc, need_insertion: bool):
    _need(doc.action is not None, "this command needs an [action] section")
    _need(doc.path is not None, "this command needs a [path] section")
    if need_insertion:
        _need(doc.insertion is not None,
              "this command needs an [insertion] section")
    return doc.action, doc.path, doc.insertion


def _moving_sum(action: TorusAction, wall: Wall) -> int:
    sup = set(wall.support)
    return sum(sum(a * b for a, b in zip(w, wall.zeta))
               for i, w in enumerate(action.weights) if i not in sup)


def _cmd_walls(doc: ProblemDoc, ov: _Overrides, jobs: int) -> Tuple[Tree, int]:
    action, path, _ = _engine_inputs(doc, need_insertion=False)
    tree = new_report("walls")
    tree["action"] = action_block(action)
    tree["path"] = path_block(path)
    tree["walls"] = walls_block(action, enumerate_walls(action, path))
    return finish(tree), 0


def _cmd_crepant(doc: ProblemDoc, ov: _Overrides, jobs: int) -> Tuple[Tree, int]:
    action, path, _ = _engine_inputs(doc, need_insertion=False)
    walls = enumerate_walls(action, path)
    tree = new_report("crepant")
    tree["action"] = action_block(action)
    tree["path"] = path_block(path)
    block = walls_block(action, walls)
    for i, w in enumerate(walls):
        block[str(i)]["moving_sum"] = _moving_sum(action, w)
    tree["walls"] = block
    tree["all_crepant"] = all(block[str(i)]["crepant"] for i in range(len(walls)))
    return finish(tree), 0


def _cmd_pair(doc: ProblemDoc, ov: _Overrides, jobs: int) -> Tuple[Tree, int]:
    action, path, alpha = _engine_inputs(doc, need_insertion=True)
    tree = new_report("pair")
    tree["action"] = action_block(action)
    tree["insertion"] = doc.insertion_text
    rows = [
        {"chi": " ".join(str(x) for x in path.chi_minus),
         "value": classical_pairing(action, path.chi_minus, alpha)},
        {"chi": " ".join(str(x) for x in path.chi_plus),
         "value": classical_pairing(action, path.chi_plus, alpha)},
    ]
    tree["pairings"] = indexed(rows)
    return finish(tree), 0


def _cmd_cross_abstract(doc: ProblemDoc, ov: _Overrides) -> Tuple[Tree, int]:
    _need(bool(doc.residue_name),
          "fixed-point data need an [abstract] section naming the residue parameter")
    tree = new_report("cross")
    rows = []
    for d in doc.data:
        row: Tree = {"label": d.label}
        if d.t_star is not None:
            row["t_star"] = d.t_star
        row["contribution"] = d.contribution().render()
        rows.append(row)
    tree["data"] = indexed(rows)
    tree["localization_sum"] = abstract_localization(doc.data).render()
    tree["wall_term"] = abstract_wall_term(doc.data, xi(doc.residue_name))
    return finish(tree), 0


def _cmd_cross(doc: ProblemDoc, ov: _Overrides, jobs: int) -> Tuple[Tree, int]:
    if doc.data:
        return _cmd_cross_abstract(doc, ov)
    action, path, alpha = _engine_inputs(doc, need_insertion=True)
    sigma = ov.sigma if ov.sigma is not None else doc.sigma
    walls = enumerate_walls(action, path)
    terms = _guarded_terms(
        walls, lambda w: wall_term(action, w, alpha, sigma), jobs)
    tree = new_report("cross")
    tree["action"] = action_block(action)
    tree["path"] = path_block(path)
    tree["insertion"] = doc.insertion_text
    tree["walls"] = walls_block(action, walls)
    tree["terms"] = indexed([
        {"wall": i, "t_star": w.t_star, "value": t}
        for i, (w, t) in enumerate(zip(walls, terms))
    ])
    tree["sum_of_terms"] = sum(terms, Fraction(0))
    return finish(tree), 0


def _cmd_verify(doc: ProblemDoc, ov: _Overrides, jobs: int) -> Tuple[Tree, int]:
    _need(not doc.data,
          "fixed-point data documents support only the cross command")
    action, path, alpha = _engine_inputs(doc, need_insertion=True)
    sigma = ov.sigma if ov.sigma is not None else doc.sigma
    walls = tuple(enumerate_walls(action, path))
    terms = tuple(_guarded_terms(
        walls, lambda w: wall_term(action, w, alpha, sigma), jobs))
    rep = KalkmanReport(
        walls=walls, terms=terms,
        tau_minus=classical_pairing(action, path.chi_minus, alpha),
        tau_plus=classical_pairing(action, path.chi_plus, alpha))
    tree = new_report("verify")
    tree["action"] = action_block(action)
    tree["path"] = path_block(path)
    tree["insertion"] = doc.insertion_text
    tree["walls"] = walls_block(action, walls)
    tree["crossing"] = kalkman_block(rep)
    return finish(tree), 0 if rep.holds else 2


def _cmd_qcross(doc: ProblemDoc, ov: _Overrides, jobs: int) -> Tuple[Tree, int]:
    _need(not doc.data,
          "fixed-point data documents support only the cross command")
    action, path, alpha = _engine_inputs(doc, need_insertion=True)
    sigma = ov.sigma if ov.sigma is not None else doc.sigma
    degrees = [ov.degree] if ov.degree is not None else list(doc.degrees)
    radius = ov.window if ov.window is not None else doc.window_radius
    _need(bool(degrees) or radius is not None,
          "qcross needs degrees (a [quantum] section or --degree) "
          "or a window radius")
    walls = tuple(enumerate_walls(action, path))

    tree = new_report("qcross")
    tree["action"] = action_block(action)
    tree["path"] = path_block(path)
    tree["insertion"] = doc.insertion_text
    tree["walls"] = walls_block(action, walls)

    failed = False
    errored = False
    blocks: List[Tree] = []
    for d in degrees:
        try:
            terms = tuple(_guarded_terms(
                walls,
                lambda w: quantum_wall_term(action, w, d, alpha, sigma),
                jobs, origin=f"degree {ivec(d)}"))
        except VgwError as err:
            blocks.append({"degree": ivec(d), "status": "error",
                           "error": str(err)})
            errored = True
            continue
        tau_minus, status_minus = _endpoint(action, path.chi_minus, d, alpha)
        tau_plus, status_plus = _endpoint(action, path.chi_plus, d, alpha)
        rep = QuantumKalkmanReport(
            degree=tuple(d), walls=walls, terms=terms,
            tau_minus=tau_minus, tau_plus=tau_plus,
            status_minus=status_minus, status_plus=status_plus)
        blocks.append(quantum_block(rep))
        if rep.holds is False:
            failed = True
    if degrees:
        tree["degrees"] = indexed(blocks)

    if radius is not None:
        base = doc.window_base if doc.window_base is not None else (0,) * action.rank
        rows = []
        for i, w in enumerate(walls):
            try:
                win = novikov_window(action, w, base, radius, alpha, sigma)
            except VgwError as err:
                raise VgwError(f"wall {i} (t* = {w.t_star}): {err}") from err
            rows.append({
                "wall": i,
                "direction": ivec(win.direction),
                "base": ivec(win.base),
                "picard_base": win.picard_base,
                "isolated": win.isolated,
                "tag": win.tag,
                "values": indexed([{"shift": str(r), "value": v}
                                   for r, v in win.values]),
            })
        tree["windows"] = indexed(rows)

    code = 1 if errored else (2 if failed else 0)
    return finish(tree), code


_RUNNERS = {
    "walls": _cmd_walls,
    "pair": _cmd_pair,
    "cross": _cmd_cross,
    "qcross": _cmd_qcross,
    "crepant": _cmd_crepant,
    "verify": _cmd_verify,
}


def run_command(doc: ProblemDoc, command: str,
                ov: Optional[_Overrides] = None) -> Tuple[Tree, int]:
    """Execute one document command; returns (report tree, exit code)."""
    if command not in _RUNNERS:
        raise VgwError(f"unknown command {command!r}")
    ov = ov or _Overrides()
    jobs = _resolve_jobs(ov, doc)
    return _RUNNERS[command](doc, ov, jobs)


def _resolve_jobs(ov: _Overrides, doc: ProblemDoc) -> int:
    if ov.jobs is not None:
        jobs = ov.jobs
    elif doc.jobs is not None:
        jobs = doc.jobs
    else:
        env = os.environ.get("VGW_JOBS", "").strip()
        if env:
            try:
                jobs = int(env)
            except ValueError:
                raise VgwError(f"VGW_JOBS must be an integer, got {env!r}")
        else:
            jobs = 1
    if jobs < 1:
        raise VgwError("jobs must be a positive integer")
    return jobs


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _csv_ints(text: str) -> Tuple[int, ...]:
    return tuple(int(p.strip()) for p in text.split(","))


def _csv_rats(text: str) -> Tuple[Fraction, ...]:
    return tuple(_one_rat(p.strip()) for p in text.split(","))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vgw",
        description="exact wall-crossing computations for linear circle "
                    "and torus quotients")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("repro_id", nargs="?", default=None,
                        help="reproduction id (repro command only)")
    parser.add_argument("--input", "-i", metavar="FILE",
                        help="problem document; '-' reads standard input")
    parser.add_argument("--format", choices=("text", "machine"), default=None)
    parser.add_argument("--window", type=int, default=None, metavar="R",
                        help="degree window radius for qcross")
    parser.add_argument("--degree", default=None, metavar="d1,...,dr")
    parser.add_argument("--sigma", default=None, metavar="s1,...,sr",
                        help="descent section override")
    parser.add_argument("--jobs", type=int, default=None, metavar="N",
                        help="worker pool bound (default: VGW_JOBS or 1)")
    return parser


def _error_report(command: str, message: str) -> Tree:
    tree = new_report(command)
    tree["status"] = "error"
    tree["error"] = message
    return finish(tree)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return 0 if exit_.code == 0 else 1

    if args.command == "repro":
        if args.input is not None:
            sys.stderr.write("vgw: repro takes no --input\n")
            return 1
        if not args.repro_id:
            sys.stderr.write("vgw: repro needs an id; available: "
                             + ", ".join(repro_ids()) + "\n")
            return 1
        try:
            tree = run_repro(args.repro_id)
        except VgwError as err:
            sys.stderr.write(f"vgw: {err}\n")
            return 1
        sys.stdout.write(render_report(tree, args.format or "text"))
        return 2 if open_identities(tree) else 0

    if args.repro_id is not None:
        sys.stderr.write(f"vgw: unexpected argument {args.repro_id!r}\n")
        return 1
    if args.input is None:
        sys.stderr.write("vgw: this command needs --input FILE "
                         "('-' for standard input)\n")
        return 1
    if args.input == "-":
        text = sys.stdin.read()
        source = "<stdin>"
    else:
        try:
            with open(args.input, "r", encoding="utf-8") as handle:
                text = handle.read()
        except OSError as err:
            sys.stderr.write(f"vgw: cannot read {args.input}: {err}\n")
            return 1
        source = args.input

    try:
        doc = parse_problem(text)
    except ProblemError as err:
        for line, col, message in err.diagnostics:
            sys.stderr.write(f"{source}:{line}:{col}: {message}\n")
        return 1

    try:
        ov = _Overrides(
            degree=_csv_ints(args.degree) if args.degree else None,
            sigma=_csv_rats(args.sigma) if args.sigma else None,
            window=args.window, jobs=args.jobs, fmt=args.format)
    except ValueError as err:
        sys.stderr.write(f"vgw: bad flag value: {err}\n")
        return 1

    fmt = ov.fmt or doc.format or "text"
    try:
        tree, code = run_command(doc, args.command, ov)
    except VgwError as err:
        sys.stdout.write(render_report(_error_report(args.command, str(err)), fmt))
        return 1
    sys.stdout.write(render_report(tree, fmt))
    return code

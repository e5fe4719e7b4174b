"""Report trees and their two renderings.

A report is a nested dict whose leaves are str, int, bool, or Fraction;
a list value means a repeated key (an array).  The same tree renders
either as an indented human-readable text document or as a sectioned
machine document (``schema = vgw-report/1``) whose rational leaves are
always written ``p/q``.  Both renderings are byte-deterministic: trees
are built in a fixed order and contain no measured quantities (the
``timing`` field is the constant ``exact-arithmetic/not-measured``).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Sequence, Union

from .geometry import TorusAction, Wall
from .quantum import crepant_check

Scalar = Union[str, int, bool, Fraction]
Tree = Dict[str, object]

SCHEMA = "vgw-report/1"
TIMING = "exact-arithmetic/not-measured"


# ---------------------------------------------------------------------------
# leaf formatting
# ---------------------------------------------------------------------------

def ivec(v: Sequence[int]) -> str:
    """Integer vector as a space-joined string; empty renders as 'none'."""
    return " ".join(str(int(x)) for x in v) if v else "none"


def qvec(v) -> str:
    return " ".join(str(Fraction(x)) for x in v) if v else "none"


def _machine_scalar(v: Scalar) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return str(v)


def _text_scalar(v: Scalar) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


# ---------------------------------------------------------------------------
# common blocks
# ---------------------------------------------------------------------------

def new_report(command: str) -> Tree:
    return {"schema": SCHEMA, "command": command, "status": "ok"}


def finish(tree: Tree) -> Tree:
    tree["timing"] = TIMING
    return tree


def action_block(action: TorusAction) -> Tree:
    return {
        "rank": action.rank,
        "params": " ".join(action.param_names),
        "weight": [ivec(w) for w in action.weights],
    }


def wall_block(action: TorusAction, wall: Wall) -> Tree:
    return {
        "t_star": wall.t_star,
        "zeta": ivec(wall.zeta),
        "support": ivec(wall.support),
        "chi_star": qvec(wall.chi_star),
        "crepant": crepant_check(action, wall),
    }


def walls_block(action: TorusAction, walls: Sequence[Wall]) -> Tree:
    out: Tree = {"count": len(walls)}
    for i, w in enumerate(walls):
        out[str(i)] = wall_block(action, w)
    return out


def indexed(items: Sequence[Tree]) -> Tree:
    out: Tree = {"count": len(items)}
    for i, item in enumerate(items):
        out[str(i)] = item
    return out


def path_block(path) -> Tree:
    return {"chi_minus": qvec(path.chi_minus), "chi_plus": qvec(path.chi_plus)}


def identity_block(statement: str, lhs: Fraction, rhs: Fraction) -> Tree:
    return {"statement": statement, "lhs": lhs, "rhs": rhs, "closed": lhs == rhs}


def kalkman_block(rep) -> Tree:
    """Crossing summary for a classical two-sided report."""
    return {
        "term": list(rep.terms),
        "tau_minus": rep.tau_minus,
        "tau_plus": rep.tau_plus,
        "identity": identity_block("tau_plus - tau_minus = sum of wall terms",
                                   rep.tau_plus - rep.tau_minus, rep.sum_terms),
    }


def quantum_block(rep) -> Tree:
    """Crossing summary for one degree, endpoint statuses included."""
    out: Tree = {
        "degree": ivec(rep.degree),
        "term": list(rep.terms),
        "status_minus": rep.status_minus,
        "status_plus": rep.status_plus,
    }
    if rep.status_minus == "ok":
        out["tau_minus"] = rep.tau_minus
    if rep.status_plus == "ok":
        out["tau_plus"] = rep.tau_plus
    if rep.holds is None:
        out["identity"] = {"statement": "an endpoint pairing is undefined",
                           "closed": "indeterminate"}
    else:
        out["identity"] = identity_block(
            "tau_plus - tau_minus = sum of wall terms",
            rep.tau_plus - rep.tau_minus, rep.sum_terms)
    return out


# ---------------------------------------------------------------------------
# renderers
# ---------------------------------------------------------------------------

def render_machine(tree: Tree) -> str:
    lines: List[str] = []

    def walk(prefix: str, node: Tree) -> None:
        scalars = []
        nested = []
        for key, value in node.items():
            if isinstance(value, dict):
                nested.append((key, value))
            else:
                scalars.append((key, value))
        if prefix:
            lines.append(f"[{prefix}]")
        for key, value in scalars:
            if isinstance(value, (list, tuple)):
                for item in value:
                    lines.append(f"{key} = {_machine_scalar(item)}")
            else:
                lines.append(f"{key} = {_machine_scalar(value)}")
        for key, value in nested:
            walk(f"{prefix}.{key}" if prefix else key, value)

    walk("", tree)
    return "\n".join(lines) + "\n"


def render_text(tree: Tree) -> str:
    lines: List[str] = []

    def walk(indent: int, node: Tree) -> None:
        pad = "  " * indent
        for key, value in node.items():
            if key == "schema":
                continue
            if isinstance(value, dict):
                lines.append(f"{pad}{key}:")
                walk(indent + 1, value)
            elif isinstance(value, (list, tuple)):
                for item in value:
                    lines.append(f"{pad}{key}: {_text_scalar(item)}")
            else:
                lines.append(f"{pad}{key}: {_text_scalar(value)}")

    walk(0, tree)
    return "\n".join(lines) + "\n"


def render_report(tree: Tree, fmt: str) -> str:
    return render_machine(tree) if fmt == "machine" else render_text(tree)

"""Built-in reproductions: nine pinned computations with known answers.

Each builder assembles its input data in code (no document needed), runs
the engine, and returns a report tree.  Identity blocks carry a
``closed`` flag; a report with any open identity signals failure.

Ids: projspace, blowup-p1cubed, blowup-c4, crepant-res(k), delpezzo,
threepoint(k), c1-blowup, flop, nodal.  The parametrized ids take an
explicit integer, e.g. ``crepant-res(3)`` or ``threepoint(2)``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Callable, Dict, List, Tuple

from .ring import LinForm, NilpotentSpec, VgwError, const, omega, theta, var, xi
from .geometry import PolPath, TorusAction, enumerate_walls
from .crossing import (
    FixedPointDatum,
    abstract_wall_term,
    c1,
    chern,
    classical_pairing,
    kalkman_verify,
)
from .quantum import (
    novikov_window,
    picard_ratio,
    quantum_kalkman_verify,
    quantum_wall_term,
)
from .reports import (
    Tree,
    action_block,
    finish,
    identity_block as _identity,
    indexed,
    ivec,
    kalkman_block as _kalkman_block,
    new_report,
    path_block as _path_block,
    quantum_block as _quantum_block,
    walls_block,
)

BLOWUP = TorusAction(2, ((1, 0), (1, 0), (1, 1), (0, 1)))
BLOWUP_PATH = PolPath((-1, 2), (2, -1))


# ---------------------------------------------------------------------------
# the nine reproductions
# ---------------------------------------------------------------------------

def _projspace() -> Tree:
    k = 4
    action = TorusAction(1, ((1,),) * k)
    path = PolPath((-1,), (1,))
    z = action.ambient_params()[0]
    tree = new_report("repro projspace")
    tree["description"] = ("projective 3-space as a circle quotient of C^4: "
                           "a single crossing from the empty chamber")
    tree["action"] = action_block(action)
    tree["path"] = _path_block(path)
    tree["walls"] = walls_block(action, enumerate_walls(action, path))
    rows: List[Tree] = []
    for a in range(2 * k - 2):
        value = classical_pairing(action, (1,), var(z) ** a)
        rows.append({"insertion": f"{z.name}^{a}", "pairing": value,
                     "reference": Fraction(int(a == k - 1))})
    tree["pairing_sweep"] = indexed(rows)
    tree["crossing"] = _kalkman_block(kalkman_verify(action, path, var(z) ** (k - 1)))
    return finish(tree)


def _blowup_p1cubed() -> Tree:
    s = xi("s")
    one = LinForm.make({s: 1})
    plane = FixedPointDatum(
        label="plane-fixed-point",
        restriction=(var(s) * 3) ** 2,
        den_weights=(one, one, one))
    exceptional = FixedPointDatum(
        label="exceptional-locus",
        restriction=var(s) ** 2,
        den_weights=(LinForm.make({s: -1}), one, one))
    before = abstract_wall_term([plane], s)
    term = abstract_wall_term([exceptional], s)
    after = classical_pairing(BLOWUP, (2, 1), c1(BLOWUP) ** 2)
    tree = new_report("repro blowup-p1cubed")
    tree["description"] = ("degree drop of the squared first Chern class under "
                           "a point blow-up, from hand-supplied fixed-point data")
    data_rows = [
        {"label": plane.label, "contribution": plane.contribution().render()},
        {"label": exceptional.label,
         "contribution": exceptional.contribution().render()},
    ]
    tree["data"] = indexed(data_rows)
    tree["pairing_before"] = before
    tree["wall_term"] = term
    tree["pairing_after"] = after
    tree["identity"] = _identity("8 - 9 = -1", after - before, term)
    return finish(tree)


def _blowup_c4() -> Tree:
    action, path = BLOWUP, BLOWUP_PATH
    alpha = c1(action) ** 2
    rep = kalkman_verify(action, path, alpha)
    tree = new_report("repro blowup-c4")
    tree["description"] = ("rank-2 action on C^4 sweeping plane -> blow-up -> "
                           "plane: three walls, closed loop")
    tree["action"] = action_block(action)
    tree["path"] = _path_block(path)
    tree["insertion"] = "c1^2"
    tree["walls"] = walls_block(action, rep.walls)
    tree["crossing"] = _kalkman_block(rep)
    tree["chamber_pairings"] = indexed([
        {"chi": "1 2", "value": classical_pairing(action, (1, 2), alpha)},
        {"chi": "2 1", "value": classical_pairing(action, (2, 1), alpha)},
    ])
    return finish(tree)


def _crepant_res(k: int) -> Tree:
    action = TorusAction(1, ((1,),) * k + ((-k,),), ("s",))
    path = PolPath((-1,), (1,))
    walls = enumerate_walls(action, path)
    s = xi("s")
    one = LinForm.make({s: 1})
    resolution = FixedPointDatum(
        label="resolution-chart",
        restriction=chern(action, k),
        den_weights=(one,) * k + (LinForm.make({s: -k}),))
    q = theta("q")
    orbifold = FixedPointDatum(
        label="orbifold-point",
        restriction=var(q) ** k,
        den_weights=(LinForm.make({q: 1}),) * k,
        orbifold_order=k)
    term = abstract_wall_term([resolution], s)
    orb = orbifold.contribution().as_rat()
    res = orb + term
    tree = new_report(f"repro crepant-res({k})")
    tree["description"] = ("crepant resolution of the cyclic cone singularity: "
                           "orbifold pairing plus wall term")
    tree["action"] = action_block(action)
    tree["walls"] = walls_block(action, walls)
    tree["orbifold_pairing"] = orb
    tree["wall_term"] = term
    tree["resolution_pairing"] = res
    tree["identity"] = _identity(
        f"resolution {res} minus orbifold 1/{k} is the wall term",
        res - orb, term)
    tree["reference"] = {"wall_term": Fraction(k * k - 1, k),
                         "orbifold_pairing": Fraction(1, k)}
    return finish(tree)


def _delpezzo() -> Tree:
    s = xi("s")
    one = LinForm.make({s: 1})
    data = [
        FixedPointDatum(
            label=f"exceptional-point-{i}",
            restriction=var(s) ** 2,
            den_weights=(one, one, LinForm.make({s: -1})),
            weyl_factor=Fraction(1, 2))
        for i in range(1, 9)
    ]
    plane = FixedPointDatum(label="plane-fixed-point",
                            restriction=(var(s) * 3) ** 2,
                            den_weights=(one, one, one))
    before = abstract_wall_term([plane], s)
    term = abstract_wall_term(data, s)
    after = before + term
    tree = new_report("repro delpezzo")
    tree["description"] = ("four-point blow-up of the plane: eight half-weight "
                           "fixed points drop the self-intersection to five")
    tree["data"] = indexed([{"label": d.label,
                             "contribution": d.contribution().render()}
                            for d in data])
    tree["pairing_before"] = before
    tree["wall_term"] = term
    tree["pairing_after"] = after
    tree["identity"] = _identity("9 - 4 = 5", after, Fraction(5))
    return finish(tree)


def _nodal() -> Tree:
    s = xi("s")
    node = FixedPointDatum(
        label="node",
        restriction=const(1),
        num_weights=(LinForm.make({}),),
        den_weights=(LinForm.make({s: 1}), LinForm.make({s: -1})))
    term = abstract_wall_term([node], s)
    before = Fraction(1)
    after = before + term
    tree = new_report("repro nodal")
    tree["description"] = ("nodal degeneration: a vanishing normal weight "
                           "kills the wall term, the pairing is unchanged")
    tree["data"] = indexed([{"label": node.label,
                             "contribution": node.contribution().render()}])
    tree["pairing_before"] = before
    tree["wall_term"] = term
    tree["pairing_after"] = after
    tree["identity"] = _identity("1 - 1 = 0", after - before, term)
    return finish(tree)


def _threepoint(k: int) -> Tree:
    action = TorusAction(1, ((1,),) * k)
    path = PolPath((-1,), (1,))
    walls = enumerate_walls(action, path)
    z = action.ambient_params()[0]
    tree = new_report(f"repro threepoint({k})")
    tree["description"] = ("degree-one three-point quantum numbers on "
                           f"projective {k - 1}-space")
    tree["action"] = action_block(action)
    tree["walls"] = walls_block(action, walls)
    rows: List[Tree] = []
    for a in range(k):
        for b in range(k):
            for c in range(k):
                value = quantum_wall_term(action, walls[0], (1,),
                                          var(z) ** (a + b + c))
                rows.append({
                    "insertion": f"{z.name}^{a} * {z.name}^{b} * {z.name}^{c}",
                    "value": value,
                    "reference": Fraction(int(a + b + c == 2 * k - 1)),
                })
    tree["sweep"] = indexed(rows)
    rep = quantum_kalkman_verify(action, path, (1,), var(z) ** (2 * k - 1))
    tree["crossing"] = _quantum_block(rep)
    return finish(tree)


def _c1_blowup() -> Tree:
    action, path = BLOWUP, BLOWUP_PATH
    tree = new_report("repro c1-blowup")
    tree["description"] = ("quantum crossing of the plane blow-up at degree "
                           "(1,0), with the degree-zero classical check")
    tree["action"] = action_block(action)
    tree["path"] = _path_block(path)
    tree["walls"] = walls_block(action, enumerate_walls(action, path))
    quantum = quantum_kalkman_verify(action, path, (1, 0), c1(action) ** 5)
    q_block = _quantum_block(quantum)
    q_block["insertion"] = "c1^5"
    classical_deg = quantum_kalkman_verify(action, path, (0, 0), c1(action) ** 2)
    classical = kalkman_verify(action, path, c1(action) ** 2)
    c_block = _quantum_block(classical_deg)
    c_block["insertion"] = "c1^2"
    c_block["matches_classical"] = (classical_deg.terms == classical.terms
                                    and classical_deg.tau_minus == classical.tau_minus
                                    and classical_deg.tau_plus == classical.tau_plus)
    tree["degrees"] = indexed([q_block, c_block])
    return finish(tree)


def _flop() -> Tree:
    action = TorusAction(1, ((1,), (1,), (-1,), (-1,)))
    path = PolPath((-1,), (1,))
    walls = enumerate_walls(action, path)
    wall = walls[0]
    z = action.ambient_params()[0]
    alpha = var(z) ** 3

    base = NilpotentSpec(bounds=(("w", 1),))
    w, q = omega("w"), theta("q")

    def side(sign: int) -> FixedPointDatum:
        return FixedPointDatum(
            label="side-plus" if sign > 0 else "side-minus",
            restriction=(var(w, base) * sign + var(q, base)) ** 3,
            den_weights=(LinForm.make({w: -1, q: -2 * sign}),) * 2,
            base=base)

    i_plus = side(1).contribution().as_rat()
    i_minus = side(-1).contribution().as_rat()

    tree = new_report("repro flop")
    tree["description"] = ("the simple flop: equal-and-opposite side integrals, "
                           "wall term one in every degree, almost-everywhere-zero "
                           "Novikov distribution")
    tree["action"] = action_block(action)
    tree["path"] = _path_block(path)
    tree["insertion"] = f"{z.name}^3"
    tree["walls"] = walls_block(action, walls)
    tree["side_integrals"] = {
        "plus": i_plus,
        "minus": i_minus,
        "identity": _identity("the two side integrals cancel",
                              i_plus + i_minus, Fraction(0)),
    }
    tree["wall_terms"] = indexed([
        {"degree": str(d), "value": quantum_wall_term(action, wall, (d,), alpha)}
        for d in range(-5, 6)
    ])
    tree["picard_ratios"] = indexed([
        {"shift": str(r), "value": picard_ratio(action, wall, (0,), r, alpha)}
        for r in range(-3, 4)
    ])
    window = novikov_window(action, wall, (0,), 5, alpha)
    tree["window"] = {
        "direction": ivec(window.direction),
        "base": ivec(window.base),
        "radius": 5,
        "picard_base": window.picard_base,
        "isolated": window.isolated,
        "tag": window.tag,
    }
    rep = quantum_kalkman_verify(action, path, (0,), alpha)
    tree["crossing"] = _quantum_block(rep)
    return finish(tree)


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

_FIXED: Dict[str, Callable[[], Tree]] = {
    "projspace": _projspace,
    "blowup-p1cubed": _blowup_p1cubed,
    "blowup-c4": _blowup_c4,
    "delpezzo": _delpezzo,
    "c1-blowup": _c1_blowup,
    "flop": _flop,
    "nodal": _nodal,
}

_PARAM = re.compile(r"^(crepant-res|threepoint)\((\d+)\)$")


def repro_ids() -> List[str]:
    return sorted(_FIXED) + ["crepant-res(k)", "threepoint(k)"]


def run_repro(rid: str) -> Tree:
    if rid in _FIXED:
        return _FIXED[rid]()
    m = _PARAM.match(rid)
    if m:
        k = int(m.group(2))
        if k < 2:
            raise VgwError(f"{m.group(1)} needs k >= 2, got {k}")
        return _crepant_res(k) if m.group(1) == "crepant-res" else _threepoint(k)
    raise VgwError(
        f"unknown reproduction {rid!r}; available: " + ", ".join(repro_ids()))


def open_identities(tree) -> bool:
    """True when some identity block in the tree has closed = false."""
    if isinstance(tree, dict):
        if tree.get("closed") is False:
            return True
        return any(open_identities(v) for v in tree.values())
    if isinstance(tree, (list, tuple)):
        return any(open_identities(v) for v in tree)
    return False

"""Acceptance suite: one test per shipped guarantee, exact equality only.

Run ``pytest -v tests/test_acceptance.py`` for one pass/fail line per
criterion.  Every value is an exact rational; nothing here is allowed to
compare within tolerance.
"""

from __future__ import annotations

import random
import sys
from fractions import Fraction as F
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))
import helpers  # noqa: E402

from vgw import (  # noqa: E402
    DegenerateWallError,
    FixedPointDatum,
    FullConeError,
    LinForm,
    NilpotentSpec,
    PolPath,
    TorusAction,
    abstract_wall_term,
    c1,
    chern,
    classical_pairing,
    classify_distribution,
    crepant_check,
    enumerate_walls,
    kalkman_verify,
    novikov_window,
    omega,
    picard_ratio,
    quantum_kalkman_verify,
    quantum_pairing,
    quantum_wall_term,
    quotient_nonempty,
    residue_at_zero,
    theta,
    var,
    wall_term,
    xi,
)

BLOWUP = TorusAction(2, ((1, 0), (1, 0), (1, 1), (0, 1)))
FULL_PATH = PolPath((-1, 2), (2, -1))
FLOP = TorusAction(1, ((1,), (1,), (-1,), (-1,)))
SEGMENT = PolPath((-1,), (1,))


def projective(k: int) -> TorusAction:
    return TorusAction(1, ((1,),) * k)


def test_criterion_01_projspace_pairing_sweep():
    for k in range(1, 7):
        action = projective(k)
        z = action.ambient_params()[0]
        for a in range(k + 2):
            value = classical_pairing(action, (1,), var(z) ** a)
            assert value == F(int(a == k - 1)), (k, a, value)


def test_criterion_02_point_blowup_from_fixed_point_data():
    s = xi("s")
    one = LinForm.make({s: 1})
    plane = FixedPointDatum(label="plane", restriction=(var(s) * 3) ** 2,
                            den_weights=(one, one, one))
    exceptional = FixedPointDatum(label="exceptional",
                                  restriction=var(s) ** 2,
                                  den_weights=(LinForm.make({s: -1}), one, one))
    term = abstract_wall_term([exceptional], s)
    before = abstract_wall_term([plane], s)
    after = classical_pairing(BLOWUP, (2, 1), c1(BLOWUP) ** 2)
    assert term == -1
    assert before == 9
    assert after == 8
    assert after - before == term


def test_criterion_03_rank_two_blowup_walls_and_loop():
    alpha = c1(BLOWUP) ** 2
    rep = kalkman_verify(BLOWUP, FULL_PATH, alpha)
    assert [w.t_star for w in rep.walls] == [F(-1, 3), F(0), F(1, 3)]
    assert rep.terms == (F(9), F(-1), F(-8))
    assert classical_pairing(BLOWUP, (1, 2), alpha) == 9
    assert classical_pairing(BLOWUP, (2, 1), alpha) == 8
    assert rep.tau_minus == 0 and rep.tau_plus == 0
    assert rep.holds and rep.sum_terms == 0


def test_criterion_04_crepant_resolution_family():
    for k in range(2, 6):
        action = TorusAction(1, ((1,),) * k + ((-k,),), ("s",))
        wall = enumerate_walls(action, SEGMENT)[0]
        assert crepant_check(action, wall) is True
        s = xi("s")
        one = LinForm.make({s: 1})
        resolution = FixedPointDatum(
            label="resolution", restriction=chern(action, k),
            den_weights=(one,) * k + (LinForm.make({s: -k}),))
        q = theta("q")
        orbifold = FixedPointDatum(
            label="orbifold", restriction=var(q) ** k,
            den_weights=(LinForm.make({q: 1}),) * k,
            orbifold_order=k)
        assert abstract_wall_term([resolution], s) == F(k * k - 1, k)
        assert orbifold.contribution().as_rat() == F(1, k)


def test_criterion_05_del_pezzo_degree_drop():
    s = xi("s")
    one = LinForm.make({s: 1})
    data = [FixedPointDatum(label=f"p{i}", restriction=var(s) ** 2,
                            den_weights=(one, one, LinForm.make({s: -1})),
                            weyl_factor=F(1, 2))
            for i in range(8)]
    term = abstract_wall_term(data, s)
    assert term == -4
    assert F(9) + term == 5


def test_criterion_06_nodal_wall_term_vanishes():
    s = xi("s")
    node = FixedPointDatum(label="node", restriction=var(s) * 0 + 1,
                           num_weights=(LinForm.make({}),),
                           den_weights=(LinForm.make({s: 1}),
                                        LinForm.make({s: -1})))
    term = abstract_wall_term([node], s)
    assert term == 0
    assert F(1) + term == 1


def test_criterion_07_three_point_quantum_numbers():
    for k in range(2, 6):
        action = projective(k)
        wall = enumerate_walls(action, SEGMENT)[0]
        z = action.ambient_params()[0]
        for a in range(k):
            for b in range(k):
                for c in range(k):
                    value = quantum_wall_term(action, wall, (1,),
                                              var(z) ** (a + b + c))
                    assert value == F(int(a + b + c == 2 * k - 1)), (k, a, b, c)
        rep = quantum_kalkman_verify(action, SEGMENT, (1,),
                                     var(z) ** (2 * k - 1))
        assert rep.status_minus == "ok" and rep.status_plus == "ok"
        assert (rep.tau_minus, rep.tau_plus) == (0, 1)
        assert rep.holds


def test_criterion_08_quantum_blowup_degree_one_zero():
    rep = quantum_kalkman_verify(BLOWUP, FULL_PATH, (1, 0), c1(BLOWUP) ** 5)
    assert rep.terms == (F(243), F(-11), F(-232))
    assert rep.status_minus == "ok" and rep.status_plus == "ok"
    assert rep.tau_minus == 0 and rep.tau_plus == 0
    assert rep.holds and rep.sum_terms == 0
    quantum0 = quantum_kalkman_verify(BLOWUP, FULL_PATH, (0, 0), c1(BLOWUP) ** 2)
    classical = kalkman_verify(BLOWUP, FULL_PATH, c1(BLOWUP) ** 2)
    assert quantum0.terms == classical.terms == (F(9), F(-1), F(-8))
    assert (quantum0.tau_minus, quantum0.tau_plus) == \
        (classical.tau_minus, classical.tau_plus)


def test_criterion_09_flop_side_integrals_and_window():
    base = NilpotentSpec(bounds=(("w", 1),))
    w, q = omega("w"), theta("q")

    def side(sign):
        return FixedPointDatum(
            label="side", base=base,
            restriction=(var(w, base) * sign + var(q, base)) ** 3,
            den_weights=(LinForm.make({w: -1, q: -2 * sign}),) * 2)

    assert side(1).contribution().as_rat() == F(1, 2)
    assert side(-1).contribution().as_rat() == F(-1, 2)

    wall = enumerate_walls(FLOP, SEGMENT)[0]
    z = FLOP.ambient_params()[0]
    alpha = var(z) ** 3
    assert crepant_check(FLOP, wall) is True
    for d in range(-5, 6):
        assert quantum_wall_term(FLOP, wall, (d,), alpha) == 1
    for r in range(-3, 4):
        assert picard_ratio(FLOP, wall, (0,), r, alpha) == 1
    window = novikov_window(FLOP, wall, (0,), 4, alpha)
    assert window.tag == "ae-zero"
    assert classify_distribution(window) == "ae-zero"


def test_criterion_10a_residue_oracle_sweep():
    rng = random.Random(20260816)
    done = 0
    while done < 200:
        cls, v = helpers.random_residue_instance(rng)
        out = residue_at_zero(cls, v)
        names = sorted({p.name for p in cls.params if p.name != v.name})
        avoid = [key for key, _ in cls.den] + [key for key, _ in out.den]
        point = helpers.choose_point(rng, names, avoid)
        if point is None:
            continue
        assert helpers.residue_oracle(cls, v.name, point) == \
            helpers.eval_class(out, point)
        done += 1


def test_criterion_10b_path_independence_rank_two():
    rng = random.Random(5150)
    references = ((-1, 0), (-1, 1), (-1, -1), (-2, 3))
    accepted = 0
    attempts = 0
    while accepted < 20 and attempts < 300:
        attempts += 1
        n = rng.randint(3, 5)
        weights = tuple((rng.randint(1, 3), rng.randint(-2, 3)) for _ in range(n))
        action = TorusAction(2, weights)
        for chi0 in references:
            assert not quotient_nonempty(action, chi0)
        chi = tuple(sum(col) for col in zip(*weights))
        z1, z2 = (var(p) for p in action.ambient_params())
        alpha = sum((z1 ** rng.randint(0, 2) * z2 ** rng.randint(0, 2)
                     * rng.randint(-3, 3) for _ in range(3)),
                    z1 * 0)
        values = []
        for chi0 in references:
            try:
                values.append(classical_pairing(action, chi, alpha, chi0=chi0))
            except DegenerateWallError:
                continue
        if len(values) < 2:
            continue
        assert len(set(values)) == 1, (weights, values)
        accepted += 1
    assert accepted >= 20


def test_criterion_10c_descent_section_independence():
    wall = enumerate_walls(BLOWUP, FULL_PATH)[1]
    assert wall.t_star == 0
    alpha2 = c1(BLOWUP) ** 2
    alpha5 = c1(BLOWUP) ** 5
    sections = ((2, 1), (F(1, 2), F(0)), (F(3, 2), F(-5, 2)))
    for sigma in sections:
        assert wall_term(BLOWUP, wall, alpha2, sigma=sigma) == -1
        assert quantum_wall_term(BLOWUP, wall, (1, 0), alpha5, sigma=sigma) == -11


def test_criterion_10d_random_rank_one_crossings():
    rng = random.Random(90125)
    for _ in range(50):
        dim = rng.randint(2, 5)
        action = TorusAction(1, tuple((rng.randint(1, 4),) for _ in range(dim)))
        z = var(action.ambient_params()[0])
        alpha = sum((z ** e * rng.randint(-4, 4) for e in range(dim)), z * 0)
        rep = kalkman_verify(action, SEGMENT, alpha)
        assert rep.tau_minus == 0
        assert rep.holds, (action.weights, rep.terms, rep.tau_plus)


def test_criterion_10e_degree_zero_matches_classical_everywhere():
    inputs = [
        (projective(4), SEGMENT, None, 3),
        (BLOWUP, FULL_PATH, c1(BLOWUP) ** 2, None),
        (BLOWUP, FULL_PATH, c1(BLOWUP) ** 5, None),
        (TorusAction(1, ((1,), (1,), (-2,))), SEGMENT, None, 2),
        (TorusAction(1, ((1,), (1,), (1,), (-3,))), SEGMENT, None, 3),
        (projective(2), SEGMENT, None, 1),
        (projective(3), SEGMENT, None, 2),
        (FLOP, SEGMENT, None, 3),
    ]
    for action, path, alpha, exponent in inputs:
        if alpha is None:
            alpha = var(action.ambient_params()[0]) ** exponent
        zero = (0,) * action.rank
        walls = enumerate_walls(action, path)
        for wall in walls:
            assert quantum_wall_term(action, wall, zero, alpha) == \
                wall_term(action, wall, alpha)
        for chi in (path.chi_minus, path.chi_plus):
            try:
                expected = classical_pairing(action, chi, alpha)
            except FullConeError:
                with pytest.raises(FullConeError):
                    quantum_pairing(action, chi, zero, alpha)
                continue
            assert quantum_pairing(action, chi, zero, alpha) == expected

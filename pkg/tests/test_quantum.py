import random
from fractions import Fraction

import pytest

from vgw.crossing import c1, classical_pairing, wall_term
from vgw.geometry import FullConeError, PolPath, TorusAction, enumerate_walls
from vgw.quantum import (
    NegativeMultiplicityError,
    NovikovWindow,
    QuantumKalkmanReport,
    WindowError,
    classify_distribution,
    crepant_check,
    index_weights,
    novikov_window,
    picard_ratio,
    quantum_kalkman_verify,
    quantum_pairing,
    quantum_wall_term,
    section_action,
)
from vgw.ring import VgwError, var, xi

BLOWUP = TorusAction(2, ((1, 0), (1, 0), (1, 1), (0, 1)))
FULL_PATH = PolPath((-1, 2), (2, -1))
FLOP = TorusAction(1, ((1,), (1,), (-1,), (-1,)))


def flop_wall():
    (wall,) = enumerate_walls(FLOP, PolPath((-1,), (1,)))
    return wall


def test_index_weights():
    act = TorusAction(1, ((1,),) * 4)
    assert index_weights(act, (1,)) == (((1,), 2),) * 4
    assert index_weights(act, (0,)) == (((1,), 1),) * 4
    assert index_weights(FLOP, (1,)) == (
        ((1,), 2), ((1,), 2), ((-1,), 0), ((-1,), 0))
    assert index_weights(BLOWUP, (1, 0)) == (
        ((1, 0), 2), ((1, 0), 2), ((1, 1), 2), ((0, 1), 1))
    with pytest.raises(VgwError):
        index_weights(BLOWUP, (1,))


def test_index_additivity():
    # Riemann-Roch: multiplicities at d + d' are m(d) + m(d') - 1
    rng = random.Random(52)
    for _ in range(40):
        weights = tuple((rng.randint(-2, 2), rng.randint(-2, 2))
                        for _ in range(rng.randint(1, 5)))
        act = TorusAction(2, weights)
        d1 = (rng.randint(-3, 3), rng.randint(-3, 3))
        d2 = (rng.randint(-3, 3), rng.randint(-3, 3))
        total = tuple(a + b for a, b in zip(d1, d2))
        for (w, m12), (_, m1), (_, m2) in zip(
                index_weights(act, total), index_weights(act, d1),
                index_weights(act, d2)):
            assert m12 == m1 + m2 - 1


def test_section_action():
    sec = section_action(BLOWUP, (1, 0))
    assert sec.weights == ((1, 0),) * 4 + ((1, 1),) * 2 + ((0, 1),)
    assert sec.rank == 2 and sec.dim == 7
    assert sec.param_names == BLOWUP.param_names
    for k in (1, 2, 3):
        act = TorusAction(1, ((1,),) * k)
        assert section_action(act, (2,)).dim == 3 * k
    assert section_action(BLOWUP, (0, 0)) == BLOWUP
    with pytest.raises(NegativeMultiplicityError):
        section_action(FLOP, (2,))


def test_degree_zero_matches_classical():
    alpha = c1(BLOWUP) ** 2
    for w in enumerate_walls(BLOWUP, FULL_PATH):
        assert quantum_wall_term(BLOWUP, w, (0, 0), alpha) == \
            wall_term(BLOWUP, w, alpha)
    for chi in ((1, 2), (2, 1), (-1, 2)):
        assert quantum_pairing(BLOWUP, chi, (0, 0), alpha) == \
            classical_pairing(BLOWUP, chi, alpha)
    z = var(xi("z1"))
    assert quantum_wall_term(FLOP, flop_wall(), (0,), z ** 3) == \
        wall_term(FLOP, flop_wall(), z ** 3)


def test_quantum_pairings_on_blowup():
    alpha = c1(BLOWUP) ** 5
    assert quantum_pairing(BLOWUP, (1, 2), (1, 0), alpha) == 243
    assert quantum_pairing(BLOWUP, (2, 1), (1, 0), alpha) == 232
    assert quantum_pairing(BLOWUP, (-1, 2), (1, 0), alpha) == 0


def test_quantum_wall_terms_on_blowup():
    alpha = c1(BLOWUP) ** 5
    walls = enumerate_walls(BLOWUP, FULL_PATH)
    values = [quantum_wall_term(BLOWUP, w, (1, 0), alpha) for w in walls]
    assert values == [Fraction(243), Fraction(-11), Fraction(-232)]


def test_quantum_kalkman_ledger_blowup():
    report = quantum_kalkman_verify(BLOWUP, FULL_PATH, (1, 0), c1(BLOWUP) ** 5)
    assert report.terms == (Fraction(243), Fraction(-11), Fraction(-232))
    assert (report.status_minus, report.status_plus) == ("ok", "ok")
    assert report.tau_minus == 0 and report.tau_plus == 0
    assert report.sum_terms == 0
    assert report.holds is True
    assert not report.one_sided


def test_quantum_three_marked_points():
    for k in (2, 3):
        act = TorusAction(1, ((1,),) * k)
        (wall,) = enumerate_walls(act, PolPath((-1,), (1,)))
        z = var(xi("z1"))
        for m in range(3 * k):
            expected = Fraction(1) if m == 2 * k - 1 else Fraction(0)
            assert quantum_wall_term(act, wall, (1,), z ** m) == expected
        report = quantum_kalkman_verify(
            act, PolPath((-1,), (1,)), (1,), z ** (2 * k - 1))
        assert report.holds is True
        assert (report.tau_minus, report.tau_plus) == (0, 1)


def test_flop_wall_terms_all_degrees():
    z = var(xi("z1"))
    wall = flop_wall()
    for d in range(-5, 6):
        assert quantum_wall_term(FLOP, wall, (d,), z ** 3) == 1
    # degree mismatch kills the term
    for d in range(-3, 4):
        assert quantum_wall_term(FLOP, wall, (d,), z ** 2) == 0


def test_flop_has_no_reference_chamber():
    z = var(xi("z1"))
    with pytest.raises(FullConeError):
        quantum_pairing(FLOP, (1,), (0,), z ** 3)
    report = quantum_kalkman_verify(FLOP, PolPath((-1,), (1,)), (0,), z ** 3)
    assert (report.status_minus, report.status_plus) == (
        "no-empty-chamber", "no-empty-chamber")
    assert report.holds is None
    assert not report.one_sided
    assert report.terms == (Fraction(1),)


def test_absent_virtual_endpoints():
    # a path crossing only the wall supported on the last weight
    path = PolPath((-1, 2), (1, 2))
    walls = enumerate_walls(BLOWUP, path)
    assert len(walls) == 1 and walls[0].support == (3,)
    alpha = c1(BLOWUP) ** 2
    report = quantum_kalkman_verify(BLOWUP, path, (-2, 0), alpha)
    assert (report.status_minus, report.status_plus) == (
        "absent-virtual", "absent-virtual")
    assert report.holds is None and not report.one_sided


def test_one_sided_report_shape():
    report = QuantumKalkmanReport(
        degree=(1,), walls=(), terms=(Fraction(2),),
        tau_minus=Fraction(0), tau_plus=None,
        status_minus="ok", status_plus="absent-virtual")
    assert report.one_sided
    assert report.holds is None
    assert report.sum_terms == 2


def test_wall_with_negative_support_multiplicity():
    walls = enumerate_walls(BLOWUP, FULL_PATH)
    middle = walls[1]  # supported on weight (1,1)
    with pytest.raises(NegativeMultiplicityError):
        quantum_wall_term(BLOWUP, middle, (-2, 0), c1(BLOWUP) ** 2)


def test_crepant_check():
    assert crepant_check(FLOP, flop_wall())
    for w in enumerate_walls(BLOWUP, FULL_PATH):
        assert not crepant_check(BLOWUP, w)
    act = TorusAction(1, ((1,), (2,), (-3,)))
    (wall,) = enumerate_walls(act, PolPath((-1,), (1,)))
    assert crepant_check(act, wall)


def test_picard_ratio_flop():
    z = var(xi("z1"))
    wall = flop_wall()
    for r in range(-3, 4):
        assert picard_ratio(FLOP, wall, (0,), r, z ** 3) == 1
        assert picard_ratio(FLOP, wall, (1,), r, z ** 3) == 1


def test_picard_ratio_needs_isolated_moduli():
    walls = enumerate_walls(BLOWUP, FULL_PATH)
    with pytest.raises(VgwError):
        picard_ratio(BLOWUP, walls[1], (1, 0), 1, c1(BLOWUP) ** 5)


def test_novikov_window_flop():
    z = var(xi("z1"))
    window = novikov_window(FLOP, flop_wall(), (0,), 4, z ** 3)
    assert window.radius == 4
    assert window.isolated
    assert window.picard_base == 1
    assert dict(window.values) == {r: Fraction(1) for r in range(-4, 5)}
    assert window.tag == "ae-zero"
    assert classify_distribution(window) == "ae-zero"


def test_novikov_window_non_isolated():
    walls = enumerate_walls(BLOWUP, FULL_PATH)
    window = novikov_window(BLOWUP, walls[1], (1, 0), 3, c1(BLOWUP) ** 5)
    assert not window.isolated
    assert dict(window.values)[0] == -11
    assert window.tag == "inconclusive"


def test_classify_identically_zero():
    vals = tuple((r, Fraction(0)) for r in range(-3, 4))
    window = NovikovWindow(direction=(1,), base=(0,), radius=3,
                           values=vals, picard_base=Fraction(1), isolated=True)
    assert classify_distribution(window) == "identically-zero"
    # all-zero wins even without isolated moduli
    window2 = NovikovWindow(direction=(1,), base=(0,), radius=3,
                            values=vals, picard_base=Fraction(1), isolated=False)
    assert classify_distribution(window2) == "identically-zero"


def test_classify_geometric_growth_inconclusive():
    vals = tuple((r, Fraction(2) ** r) for r in range(-3, 4))
    window = NovikovWindow(direction=(1,), base=(0,), radius=3,
                           values=vals, picard_base=Fraction(1), isolated=True)
    assert classify_distribution(window) == "inconclusive"


def test_classify_depends_on_picard_rescaling():
    # values r^2 * 3^r look exponential raw but are polynomial once rescaled
    vals = tuple((r, Fraction(r * r) * Fraction(3) ** r) for r in range(-4, 5))
    good = NovikovWindow(direction=(1,), base=(0,), radius=4,
                         values=vals, picard_base=Fraction(3), isolated=True)
    assert classify_distribution(good) == "ae-zero"
    bad = NovikovWindow(direction=(1,), base=(0,), radius=4,
                        values=vals, picard_base=Fraction(1), isolated=True)
    assert classify_distribution(bad) == "inconclusive"


def test_classify_single_spike_inconclusive():
    # one lonely nonzero value: a genuine function, not a point mass
    vals = tuple((r, Fraction(1) if r == 1 else Fraction(0))
                 for r in range(-3, 4))
    window = NovikovWindow(direction=(1,), base=(0,), radius=3,
                           values=vals, picard_base=Fraction(1), isolated=True)
    assert classify_distribution(window) == "inconclusive"


def test_window_errors():
    z = var(xi("z1"))
    with pytest.raises(WindowError):
        novikov_window(FLOP, flop_wall(), (0,), 2, z ** 3)
    small = NovikovWindow(direction=(1,), base=(0,), radius=2,
                          values=tuple((r, Fraction(0)) for r in range(-2, 3)),
                          picard_base=Fraction(1), isolated=True)
    with pytest.raises(WindowError):
        classify_distribution(small)
    gap = NovikovWindow(direction=(1,), base=(0,), radius=3,
                        values=tuple((r, Fraction(0))
                                     for r in range(-3, 4) if r != 0),
                        picard_base=Fraction(1), isolated=True)
    with pytest.raises(WindowError):
        classify_distribution(gap)


def test_degree_validation():
    z = var(xi("z1"))
    with pytest.raises(VgwError):
        quantum_pairing(BLOWUP, (1, 2), (1,), c1(BLOWUP))
    with pytest.raises(VgwError):
        quantum_wall_term(FLOP, flop_wall(), (1, 0), z ** 3)

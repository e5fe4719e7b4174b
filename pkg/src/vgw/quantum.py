"""Quantum (degree-indexed) wall-crossing for linear torus models.

Degree-``d`` gauged invariants are computed on the section space of the
associated bundle over the projective line: each weight ``mu`` of the
action contributes ``<mu, d> + 1`` copies of itself (Riemann-Roch), and
the invariant is the classical pairing on that enlarged action.  Wall
terms follow the same pattern: moving weights enter the Euler
denominator with their virtual multiplicities (negative ones fold into
the numerator as honest factors), and the fixed moduli on the wall is
the section-space quotient of the supported weights.

On top of the per-degree terms this module provides the crepancy test
for a wall (sum of moving pairings vanishes), the Picard-shift ratio
that controls how wall terms vary along a degree ray, and an exact
finite-window classifier that recognizes when the formal Novikov sum of
wall terms is a distribution supported at zero (almost-everywhere zero).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .ring import VgwError, rat
from .geometry import FullConeError, PolPath, TorusAction, Wall, enumerate_walls
from .crossing import (
    Insertion,
    _require_polynomial,
    _wall_term_class,
    classical_pairing,
)

Degree = Tuple[int, ...]


class NegativeMultiplicityError(VgwError):
    """A virtual multiplicity is negative where a variety is required."""


class WindowError(VgwError):
    """A Novikov window is too small to support classification."""


def _check_degree(action: TorusAction, d: Sequence[int]) -> Degree:
    dd = tuple(int(x) for x in d)
    if len(dd) != action.rank:
        raise VgwError(f"degree {dd} does not match rank {action.rank}")
    return dd


def index_weights(action: TorusAction, d: Sequence[int]):
    """Per-weight virtual multiplicity <mu, d> + 1 (may be negative)."""
    dd = _check_degree(action, d)
    return tuple((w, sum(a * b for a, b in zip(w, dd)) + 1)
                 for w in action.weights)


def section_action(action: TorusAction, d: Sequence[int]) -> TorusAction:
    """The action on degree-``d`` sections: each weight repeated by its
    multiplicity.  Requires all multiplicities nonnegative."""
    weights: List[Tuple[int, ...]] = []
    for w, m in index_weights(action, d):
        if m < 0:
            raise NegativeMultiplicityError(
                f"weight {w} has virtual multiplicity {m} < 0 at degree "
                f"{tuple(d)}; only wall terms handle virtual indices")
        weights.extend([w] * m)
    return TorusAction(action.rank, tuple(weights), action.param_names)


def quantum_pairing(action: TorusAction, chi, d: Sequence[int],
                    alpha: Insertion) -> Fraction:
    """Degree-``d`` gauged invariant: classical pairing on section space."""
    return classical_pairing(section_action(action, d), chi, alpha)


def quantum_wall_term(action: TorusAction, wall: Wall, d: Sequence[int],
                      alpha: Insertion, sigma=None) -> Fraction:
    """Degree-``d`` wall contribution.

    Moving weights appear with exponent <mu,d>+1 in the Euler
    denominator (negative exponents become numerator factors); the wall's
    fixed moduli is the section-space quotient of the supported weights,
    which must have nonnegative multiplicities.
    """
    _require_polynomial(alpha)
    dd = _check_degree(action, d)
    return _wall_term_class(action, wall, alpha, sigma, "", dd).as_rat()


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuantumKalkmanReport:
    """Ledger for one degree: wall terms vs difference of endpoint pairings.

    An endpoint whose section-space pairing cannot be formed is reported
    by status instead of a value: "absent-virtual" when the degree gives
    a negative multiplicity (that side's Novikov ring has no such term)
    and "no-empty-chamber" when the classical recursion has no starting
    point.  ``holds`` is None unless both sides exist.
    """

    degree: Degree
    walls: Tuple[Wall, ...]
    terms: Tuple[Fraction, ...]
    tau_minus: Optional[Fraction]
    tau_plus: Optional[Fraction]
    status_minus: str
    status_plus: str

    @property
    def sum_terms(self) -> Fraction:
        return sum(self.terms, Fraction(0))

    @property
    def one_sided(self) -> bool:
        return (self.status_minus == "ok") != (self.status_plus == "ok")

    @property
    def holds(self) -> Optional[bool]:
        if self.status_minus != "ok" or self.status_plus != "ok":
            return None
        return self.tau_plus - self.tau_minus == self.sum_terms


def _endpoint_pairing(action, chi, d, alpha):
    try:
        return quantum_pairing(action, chi, d, alpha), "ok"
    except NegativeMultiplicityError:
        return None, "absent-virtual"
    except FullConeError:
        return None, "no-empty-chamber"


def quantum_kalkman_verify(action: TorusAction, path: PolPath,
                           d: Sequence[int], alpha: Insertion,
                           ) -> QuantumKalkmanReport:
    _require_polynomial(alpha)
    dd = _check_degree(action, d)
    walls = tuple(enumerate_walls(action, path))
    terms = tuple(quantum_wall_term(action, w, dd, alpha) for w in walls)
    tau_minus, status_minus = _endpoint_pairing(action, path.chi_minus, dd, alpha)
    tau_plus, status_plus = _endpoint_pairing(action, path.chi_plus, dd, alpha)
    return QuantumKalkmanReport(dd, walls, terms, tau_minus, tau_plus,
                                status_minus, status_plus)


# ---------------------------------------------------------------------------
# crepancy and Novikov windows
# ---------------------------------------------------------------------------

def crepant_check(action: TorusAction, wall: Wall) -> bool:
    """True when the moving weights' pairings with the normal sum to zero."""
    sup = set(wall.support)
    total = 0
    for i, w in enumerate(action.weights):
        if i not in sup:
            total += sum(a * b for a, b in zip(w, wall.zeta))
    return total == 0


def _moving_pairings(action: TorusAction, wall: Wall) -> List[int]:
    sup = set(wall.support)
    return [sum(a * b for a, b in zip(w, wall.zeta))
            for i, w in enumerate(action.weights) if i not in sup]


def _picard_base(action: TorusAction, wall: Wall) -> Fraction:
    rho = Fraction(1)
    for a in _moving_pairings(action, wall):
        rho *= Fraction(a) ** a
    return rho


def picard_ratio(action: TorusAction, wall: Wall, d: Sequence[int], r: int,
                 alpha: Insertion) -> Fraction:
    """Wall term at the degree shifted ``r`` steps along the wall normal,
    rescaled by the Euler-class ratio of the shift.

    Crepant walls with isolated fixed moduli make this a polynomial in
    ``r``; the rescaling factor is prod of <mu,zeta>^(<mu,zeta>*r) over
    moving weights.
    """
    if wall.support:
        raise VgwError(
            "Picard-shift ratio needs isolated fixed moduli (no supported weights)")
    dd = _check_degree(action, d)
    shifted = tuple(a + r * z for a, z in zip(dd, wall.zeta))
    value = quantum_wall_term(action, wall, shifted, alpha)
    return value * _picard_base(action, wall) ** (-r)


@dataclass(frozen=True)
class NovikovWindow:
    """Exact wall-term values on a symmetric window of degrees.

    ``values`` lists (step r, value at base + r*direction) for r in
    [-radius, radius].  ``picard_base`` is the Euler-ratio geometric
    factor used by the classifier; ``isolated`` records whether the wall
    moduli was isolated (the automated classification only applies then).
    """

    direction: Degree
    base: Degree
    radius: int
    values: Tuple[Tuple[int, Fraction], ...]
    picard_base: Fraction
    isolated: bool
    tag: str = ""


def classify_distribution(window: NovikovWindow) -> str:
    """Classify the Novikov sum of the window's wall terms.

    "identically-zero" when every value vanishes; "ae-zero" when the
    rescaled values r -> value(r) * picard_base**(-r) agree exactly with
    the polynomial interpolated through the inner half of the window
    (the sum is then a finite combination of delta-derivatives at zero:
    zero almost everywhere); "inconclusive" otherwise.
    """
    if window.radius < 3:
        raise WindowError(
            f"window radius {window.radius} < 3 cannot support classification")
    vals = dict(window.values)
    for r in range(-window.radius, window.radius + 1):
        if r not in vals:
            raise WindowError(f"window is missing the value at step {r}")
    if all(v == 0 for v in vals.values()):
        return "identically-zero"
    if not window.isolated:
        return "inconclusive"
    g = {r: v * window.picard_base ** (-r) for r, v in vals.items()}
    h = window.radius // 2
    inner = list(range(-h, h + 1))
    outer = [r for r in range(-window.radius, window.radius + 1)
             if r not in set(inner)]

    def interp(x: int) -> Fraction:
        total = Fraction(0)
        for i in inner:
            term = g[i]
            for j in inner:
                if j != i:
                    term = term * Fraction(x - j, i - j)
            total += term
        return total

    for r in outer:
        if interp(r) != g[r]:
            return "inconclusive"
    return "ae-zero"


def novikov_window(action: TorusAction, wall: Wall, d0: Sequence[int],
                   radius: int, alpha: Insertion, sigma=None) -> NovikovWindow:
    """Evaluate one wall's terms on degrees d0 + r*zeta, r in [-R, R],
    and classify the resulting Novikov distribution."""
    dd = _check_degree(action, d0)
    if radius < 3:
        raise WindowError(f"window radius {radius} < 3 cannot support classification")
    values = []
    for r in range(-radius, radius + 1):
        shifted = tuple(a + r * z for a, z in zip(dd, wall.zeta))
        values.append((r, quantum_wall_term(action, wall, shifted, alpha, sigma)))
    window = NovikovWindow(
        direction=wall.zeta, base=dd, radius=radius, values=tuple(values),
        picard_base=_picard_base(action, wall), isolated=not wall.support)
    return NovikovWindow(
        direction=window.direction, base=window.base, radius=window.radius,
        values=window.values, picard_base=window.picard_base,
        isolated=window.isolated, tag=classify_distribution(window))

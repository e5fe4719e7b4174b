"""Classical wall-crossing: residue terms, pairings, localization data.

The central identity computed here relates integrals over the two GIT
quotients on either side of a wall to a residue localized on the wall:

    pairing(chi_plus) - pairing(chi_minus)  =  sum over walls of
        Resid_{xi}[ descended insertion * inverse Euler class of the
                    moving weights, integrated over the wall moduli ].

Pairings themselves are defined by the same machinery: start at a
polarization with no semistable points (value 0) and add up the wall
terms along a straight path.  The integral over each wall's fixed moduli
is the same kind of pairing for the residual, one-rank-smaller action,
so the whole computation is a recursion that bottoms out at rank 0.

For geometries the linear model does not cover directly (orbifold
points, Weyl-folded loci, virtual normal complexes, noncompact targets
needing an auxiliary parameter) the same residue arithmetic is exposed
through user-supplied :class:`FixedPointDatum` records.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .ring import (
    CohClass,
    EMPTY_SPEC,
    LinForm,
    NilpotentSpec,
    Param,
    VgwError,
    const,
    integrate_fiber,
    rat,
    residue_at_zero,
    substitute,
)
from .geometry import (
    DegenerateWallError,
    DescentData,
    PolPath,
    TorusAction,
    Wall,
    enumerate_walls,
    find_empty_chamber,
    quotient_nonempty,
    residual_action,
)

# An insertion is just a polynomial class in the ambient parameters.
Insertion = CohClass


class NoncompactFixedModuliError(VgwError):
    """A wall's fixed moduli is a positive-dimensional affine space."""


# ---------------------------------------------------------------------------
# insertion helpers
# ---------------------------------------------------------------------------

def c1(action: TorusAction, spec: NilpotentSpec = EMPTY_SPEC) -> CohClass:
    """Sum of the weight forms (first Chern class of the model)."""
    out = const(0, spec, action.ambient_params())
    for i in range(action.dim):
        out = out + action.weight_class(i, spec)
    return out


def chern(action: TorusAction, j: int, spec: NilpotentSpec = EMPTY_SPEC) -> CohClass:
    """j-th elementary symmetric polynomial of the weight forms."""
    if j < 0 or j > action.dim:
        raise VgwError(f"chern index {j} out of range 0..{action.dim}")
    e = [const(0, spec, action.ambient_params()) for _ in range(j + 1)]
    e[0] = const(1, spec, action.ambient_params())
    for i in range(action.dim):
        w = action.weight_class(i, spec)
        for m in range(min(i + 1, j), 0, -1):
            e[m] = e[m] + e[m - 1] * w
    return e[j]


def chern_total(action: TorusAction, spec: NilpotentSpec = EMPTY_SPEC) -> CohClass:
    """Product of (1 + weight form) over all weights."""
    out = const(1, spec, action.ambient_params())
    for i in range(action.dim):
        out = out * (const(1, spec) + action.weight_class(i, spec))
    return out


def _require_polynomial(alpha: CohClass) -> None:
    if alpha.den:
        raise VgwError("insertions must be polynomial (no denominators)")


# ---------------------------------------------------------------------------
# wall terms and pairings
# ---------------------------------------------------------------------------

def _moving_multiplicities(action: TorusAction, wall: Wall, d=None):
    """(index, multiplicity) for weights off the wall; classical mult = 1."""
    sup = set(wall.support)
    out = []
    for i in range(action.dim):
        if i in sup:
            continue
        if d is None:
            out.append((i, 1))
        else:
            m = sum(a * b for a, b in zip(action.weights[i], d)) + 1
            out.append((i, m))
    return out


def _wall_term_class(action: TorusAction, wall: Wall, alpha: CohClass,
                     sigma=None, scope: str = "", d=None) -> CohClass:
    """Shared classical/quantum wall contribution, as a class in any
    spectator parameters alpha carries.

    ``d is None`` is the classical case: every moving weight appears once
    in the Euler denominator and the fixed moduli is the plain quotient of
    the supported weights.  With a degree, moving weights get their
    virtual multiplicities (negatives fold into the numerator) and the
    fixed moduli becomes the section-space quotient of the supported
    weights.
    """
    from .quantum import NegativeMultiplicityError  # local: avoid a cycle

    tag = f"{scope}t{wall.index}"
    residual, descent = residual_action(
        action, wall, sigma,
        zeta_name=f"zeta_{tag}", residual_prefix=f"{tag}_")
    body = substitute(alpha, descent.sub)
    for i, mult in _moving_multiplicities(action, wall, d):
        form = descent.form_of(action.weights[i])
        if mult > 0:
            body = body.div_form(form, mult)
        elif mult < 0:
            body = body.mul_form(form, -mult)
    fixed = residual
    if d is not None:
        fixed_weights: List[Tuple[int, ...]] = []
        for pos, i in enumerate(wall.support):
            m = sum(a * b for a, b in zip(action.weights[i], d)) + 1
            if m < 0:
                raise NegativeMultiplicityError(
                    f"weight {action.weights[i]} on the wall has virtual "
                    f"multiplicity {m} < 0; the fixed moduli is not a variety")
            fixed_weights.extend([residual.weights[pos]] * m)
        fixed = TorusAction(residual.rank, tuple(fixed_weights),
                            residual.param_names)
    inner = _pairing_class(fixed, descent.chi_residual, body,
                           scope=f"{tag}_")
    return residue_at_zero(inner, descent.zeta_param)


def wall_term(action: TorusAction, wall: Wall, alpha: Insertion,
              sigma=None) -> Fraction:
    """The wall's contribution to the crossing, as an exact rational."""
    _require_polynomial(alpha)
    return _wall_term_class(action, wall, alpha, sigma).as_rat()


def _chi0_candidates(action: TorusAction, chi0: Sequence[int]):
    yield tuple(chi0)
    r = action.rank
    for k in (1, 3, 7, 13, 29, 61):
        for j in range(r):
            for s in (1, -1, 2, -2):
                cand = tuple(k * c + (s if i == j else 0)
                             for i, c in enumerate(chi0))
                if any(cand):
                    yield cand


def _walls_from_empty(action: TorusAction, chi0, chi) -> List[Wall]:
    """Walls along a path from an empty chamber to chi, nudging the start
    deterministically when the straight path happens to be degenerate."""
    last: Optional[DegenerateWallError] = None
    for cand in _chi0_candidates(action, chi0):
        if quotient_nonempty(action, cand):
            continue
        try:
            return enumerate_walls(action, PolPath(cand, chi))
        except DegenerateWallError as err:
            last = err
    if last is not None:
        raise last
    raise DegenerateWallError("no usable path from an empty chamber")


def _pairing_class(action: TorusAction, chi, alpha: CohClass,
                   chi0=None, scope: str = "") -> CohClass:
    if not quotient_nonempty(action, chi):
        return const(0, alpha.spec, alpha.params)
    if action.rank == 0:
        if action.dim == 0:
            return alpha
        raise NoncompactFixedModuliError(
            "residual torus is trivial but coordinates remain: "
            "the fixed moduli is a noncompact affine space")
    if chi0 is None:
        chi0 = find_empty_chamber(action)
    elif quotient_nonempty(action, chi0):
        raise VgwError("provided reference polarization is not in an empty chamber")
    total = const(0, alpha.spec, alpha.params)
    for wall in _walls_from_empty(action, chi0, chi):
        total = total + _wall_term_class(action, wall, alpha, None, scope)
    return total


def classical_pairing(action: TorusAction, chi, alpha: Insertion,
                      chi0=None) -> Fraction:
    """Integral of the descended insertion over the GIT quotient at chi.

    Computed as the accumulated wall terms along a straight path from a
    polarization with empty semistable locus; 0 when the quotient at chi
    is itself empty.  ``chi0`` optionally fixes the reference
    polarization (it must sit in an empty chamber); the result does not
    depend on that choice.
    """
    _require_polynomial(alpha)
    return _pairing_class(action, chi, alpha, chi0).as_rat()


# ---------------------------------------------------------------------------
# abstract fixed-point data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FixedPointDatum:
    """Localization data for one fixed component, supplied by hand.

    ``num_weights``/``den_weights`` describe the Euler class of the
    virtual normal complex as prod(num)/prod(den); ``restriction`` is the
    insertion restricted to the component, expressed in the residue/theta
    parameters and the nilpotent generators of ``base``.  ``weyl_factor``
    and ``orbifold_order`` rescale the contribution.  The wall time may
    be given directly or through a pair of moment weights (w_minus,
    w_plus), in which case t* solves (1-t)/2*w_minus + (1+t)/2*w_plus = 0.
    """

    label: str
    restriction: CohClass
    num_weights: Tuple[LinForm, ...] = ()
    den_weights: Tuple[LinForm, ...] = ()
    weyl_factor: Fraction = Fraction(1)
    orbifold_order: int = 1
    base: NilpotentSpec = EMPTY_SPEC
    t_star: Optional[Fraction] = None
    weight_pair: Optional[Tuple[Fraction, Fraction]] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "weyl_factor", rat(self.weyl_factor))
        if self.orbifold_order < 1:
            raise VgwError("orbifold_order must be a positive integer")
        if self.weight_pair is not None:
            wm, wp = (rat(x) for x in self.weight_pair)
            if wm == wp:
                raise VgwError(
                    "weight pair must have distinct moment values")
            t = (wm + wp) / (wm - wp)
            object.__setattr__(self, "weight_pair", (wm, wp))
            if self.t_star is not None and rat(self.t_star) != t:
                raise VgwError("wall time disagrees with the weight pair")
            object.__setattr__(self, "t_star", t)
        elif self.t_star is not None:
            object.__setattr__(self, "t_star", rat(self.t_star))
        if self.restriction.spec != self.base:
            raise VgwError("restriction must be built over the datum's base spec")
        for w in self.den_weights:
            if w.is_zero():
                raise VgwError(f"datum {self.label!r} has a zero denominator weight")

    def contribution(self) -> CohClass:
        """weyl/orbifold * fiber integral of restriction * prod(num)/prod(den),
        a Laurent class in the equivariant parameters of the datum."""
        cls = self.restriction
        for w in self.num_weights:
            cls = cls.mul_form(w)
        for w in self.den_weights:
            cls = cls.div_form(w)
        out = integrate_fiber(cls, self.base)
        return out * (self.weyl_factor / self.orbifold_order)


def abstract_wall_term(data: Sequence[FixedPointDatum],
                       residue_param: Param) -> Fraction:
    """Residue of the summed fixed-component contributions at one wall."""
    if not data:
        return Fraction(0)
    times = {d.t_star for d in data if d.t_star is not None}
    if len(times) > 1:
        raise VgwError(f"data mix distinct wall times {sorted(times)}")
    total = const(0, EMPTY_SPEC)
    for d in data:
        total = total + d.contribution()
    return residue_at_zero(total, residue_param).as_rat()


def abstract_localization(data: Sequence[FixedPointDatum]) -> CohClass:
    """Summed fixed-component contributions, kept as a Laurent class.

    This is the route for integrals over noncompact targets that are only
    defined equivariantly: the answer may legitimately retain the
    auxiliary parameters.
    """
    total = const(0, EMPTY_SPEC)
    for d in data:
        total = total + d.contribution()
    return total


# ---------------------------------------------------------------------------
# verification report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KalkmanReport:
    """Both sides of the crossing identity for one action/path/insertion."""

    walls: Tuple[Wall, ...]
    terms: Tuple[Fraction, ...]
    tau_minus: Fraction
    tau_plus: Fraction

    @property
    def sum_terms(self) -> Fraction:
        return sum(self.terms, Fraction(0))

    @property
    def holds(self) -> bool:
        return self.tau_plus - self.tau_minus == self.sum_terms


def kalkman_verify(action: TorusAction, path: PolPath,
                   alpha: Insertion) -> KalkmanReport:
    """Compute endpoint pairings and wall terms independently and compare."""
    _require_polynomial(alpha)
    walls = tuple(enumerate_walls(action, path))
    terms = tuple(wall_term(action, w, alpha) for w in walls)
    tau_minus = classical_pairing(action, path.chi_minus, alpha)
    tau_plus = classical_pairing(action, path.chi_plus, alpha)
    return KalkmanReport(walls, terms, tau_minus, tau_plus)

"""Wall-and-chamber geometry for linear torus actions.

A rank-``r`` torus acting linearly on ``C**k`` is recorded by its integer
weight vectors.  A straight segment of polarizations

    chi(t) = (1-t)/2 * chi_minus + (1+t)/2 * chi_plus,   t in [-1, 1]

meets finitely many walls: hyperplanes spanned by weights, crossed at a
parameter ``t*`` strictly inside the segment, such that the polarization
at the crossing lies in the cone of the weights on the hyperplane.  This
module enumerates those walls, decides cone membership questions exactly
(Fourier-Motzkin elimination), and builds the descent data used to push
computations down to the wall: a distinguished equivariant parameter for
the normal direction plus a lattice basis of the hyperplane itself.

Everything is exact integer/rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

from .ring import (
    CohClass,
    EMPTY_SPEC,
    LinForm,
    Param,
    VgwError,
    const,
    rat,
    var,
    xi,
)

Vec = Tuple[int, ...]
QVec = Tuple[Fraction, ...]


class DegenerateWallError(VgwError):
    """The path meets the wall structure in a non-generic way."""


class FullConeError(VgwError):
    """The weights span every direction; no empty chamber exists."""


def _dot(a: Sequence, b: Sequence) -> Fraction:
    return sum((rat(x) * rat(y) for x, y in zip(a, b)), Fraction(0))


def _primitive(v: Sequence[int]) -> Vec:
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    if g == 0:
        raise VgwError("zero vector has no primitive representative")
    return tuple(x // g for x in v)


def _canon_sign(v: Vec) -> Vec:
    for x in v:
        if x > 0:
            return v
        if x < 0:
            return tuple(-y for y in v)
    return v


def _ext_gcd(a: int, b: int) -> Tuple[int, int, int]:
    """(g, u, v) with u*a + v*b == g == gcd(a, b) >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _integer_kernel(rows: Sequence[Sequence[int]], r: int) -> List[Vec]:
    """Lattice basis of { x in Z**r : <row, x> = 0 for every row }.

    Column reduction with unimodular operations; the returned vectors are
    a basis of the full kernel lattice (saturated, not just finite index).
    """
    cols = [[1 if i == j else 0 for i in range(r)] for j in range(r)]
    start = 0
    for row in rows:
        vals = [sum(row[i] * c[i] for i in range(r)) for c in cols]
        pivot = None
        for j in range(start, r):
            if vals[j]:
                pivot = j
                break
        if pivot is None:
            continue
        cols[start], cols[pivot] = cols[pivot], cols[start]
        vals[start], vals[pivot] = vals[pivot], vals[start]
        for j in range(start + 1, r):
            if not vals[j]:
                continue
            a, b = vals[start], vals[j]
            g, u, v = _ext_gcd(a, b)
            ca, cb = cols[start], cols[j]
            new_a = [u * ca[i] + v * cb[i] for i in range(r)]
            new_b = [(-b // g) * ca[i] + (a // g) * cb[i] for i in range(r)]
            cols[start], cols[j] = new_a, new_b
            vals[start], vals[j] = g, 0
        start += 1
    return [tuple(c) for c in cols[start:]]


def _lattice_section(zeta: Vec) -> Tuple[Vec, List[Vec]]:
    """For primitive ``zeta`` return (sigma, basis): an integer vector with
    <sigma, zeta> == 1 and a lattice basis of the orthogonal hyperplane."""
    r = len(zeta)
    cols = [[1 if i == j else 0 for i in range(r)] for j in range(r)]
    vals = list(zeta)
    piv = None
    for j in range(r):
        if vals[j]:
            piv = j
            break
    if piv is None:
        raise VgwError("zero vector cannot define a wall")
    cols[0], cols[piv] = cols[piv], cols[0]
    vals[0], vals[piv] = vals[piv], vals[0]
    for j in range(1, r):
        if not vals[j]:
            continue
        a, b = vals[0], vals[j]
        g, u, v = _ext_gcd(a, b)
        ca, cb = cols[0], cols[j]
        cols[0] = [u * ca[i] + v * cb[i] for i in range(r)]
        cols[j] = [(-b // g) * ca[i] + (a // g) * cb[i] for i in range(r)]
        vals[0], vals[j] = g, 0
    if vals[0] < 0:
        cols[0] = [-x for x in cols[0]]
        vals[0] = -vals[0]
    if vals[0] != 1:
        raise VgwError("wall normal is not primitive")
    return tuple(cols[0]), [tuple(c) for c in cols[1:]]


def _solve_coords(basis: Sequence[Vec], w: Sequence) -> QVec:
    """Coordinates of ``w`` in the span of ``basis`` (must be consistent)."""
    r = len(w)
    m = len(basis)
    if m == 0:
        if any(rat(x) != 0 for x in w):
            raise VgwError("vector outside the span of an empty basis")
        return ()
    aug = [[rat(basis[j][i]) for j in range(m)] + [rat(w[i])] for i in range(r)]
    pivots = []
    row = 0
    for col in range(m):
        sel = None
        for i in range(row, r):
            if aug[i][col]:
                sel = i
                break
        if sel is None:
            continue
        aug[row], aug[sel] = aug[sel], aug[row]
        pv = aug[row][col]
        aug[row] = [x / pv for x in aug[row]]
        for i in range(r):
            if i != row and aug[i][col]:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[row])]
        pivots.append(col)
        row += 1
    for i in range(row, r):
        if aug[i][m]:
            raise VgwError("vector does not lie in the wall hyperplane")
    out = [Fraction(0)] * m
    for i, col in enumerate(pivots):
        out[col] = aug[i][m]
    return tuple(out)


# ---------------------------------------------------------------------------
# cone membership (Fourier-Motzkin)
# ---------------------------------------------------------------------------

def _fm_eliminate(ineqs: List[List[Fraction]], nvars: int) -> bool:
    """Feasibility of the system ``c[0] + sum c[j+1]*x_j >= 0``.

    Eliminates variables one at a time; returns True when a rational
    solution exists.  Inequalities are normalized and deduplicated to keep
    the blowup in check (problem sizes here are tiny).
    """

    def normed(v: List[Fraction]) -> Tuple[Fraction, ...]:
        lead = next((abs(x) for x in v if x), None)
        if lead is None:
            return tuple(v)
        return tuple(x / lead for x in v)

    cur = {normed(v) for v in ineqs}
    for j in range(nvars, 0, -1):
        lowers, uppers, keep = [], [], []
        for v in cur:
            c = v[j]
            if c > 0:
                lowers.append(v)
            elif c < 0:
                uppers.append(v)
            else:
                keep.append(v)
        nxt = {normed([x for i, x in enumerate(v) if i != j]) for v in keep}
        for lo in lowers:
            for up in uppers:
                comb_v = [lo[i] * (-up[j]) + up[i] * lo[j] for i in range(len(lo))]
                del comb_v[j]
                nxt.add(normed(comb_v))
        cur = nxt
    return all(v[0] >= 0 for v in cur)


def cone_contains(generators: Sequence[Sequence[int]], chi: Sequence) -> bool:
    """Is ``chi`` a nonnegative rational combination of the generators?"""
    chi = tuple(rat(x) for x in chi)
    r = len(chi)
    gens = [tuple(g) for g in generators]
    k = len(gens)
    if k == 0:
        return all(x == 0 for x in chi)
    if r == 0:
        return True
    aug = [[rat(gens[j][i]) for j in range(k)] + [chi[i]] for i in range(r)]
    pivots: List[int] = []
    row = 0
    for col in range(k):
        sel = None
        for i in range(row, r):
            if aug[i][col]:
                sel = i
                break
        if sel is None:
            continue
        aug[row], aug[sel] = aug[sel], aug[row]
        pv = aug[row][col]
        aug[row] = [x / pv for x in aug[row]]
        for i in range(r):
            if i != row and aug[i][col]:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[row])]
        pivots.append(col)
        row += 1
    for i in range(row, r):
        if aug[i][k]:
            return False
    free = [c for c in range(k) if c not in pivots]
    # lambda_pivot = rhs - sum(coeff * lambda_free) >= 0, lambda_free >= 0
    ineqs: List[List[Fraction]] = []
    for i, col in enumerate(pivots):
        v = [aug[i][k]] + [-aug[i][f] for f in free]
        ineqs.append(v)
    for idx in range(len(free)):
        v = [Fraction(0)] * (len(free) + 1)
        v[idx + 1] = Fraction(1)
        ineqs.append(v)
    return _fm_eliminate(ineqs, len(free))


# ---------------------------------------------------------------------------
# actions, paths, walls
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TorusAction:
    """A linear torus action: ``rank`` and one integer weight per coordinate.

    ``param_names`` are the ambient equivariant parameter names used when
    weights are turned into linear forms; residual actions produced by
    descent carry their own names so nested computations never collide.
    """

    rank: int
    weights: Tuple[Vec, ...]
    param_names: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.rank < 0:
            raise VgwError("rank must be >= 0")
        ws = tuple(tuple(int(x) for x in w) for w in self.weights)
        for w in ws:
            if len(w) != self.rank:
                raise VgwError(f"weight {w} does not match rank {self.rank}")
        object.__setattr__(self, "weights", ws)
        if not self.param_names:
            object.__setattr__(
                self, "param_names",
                tuple(f"z{i+1}" for i in range(self.rank)))
        if len(self.param_names) != self.rank:
            raise VgwError("need one parameter name per rank")

    @property
    def dim(self) -> int:
        return len(self.weights)

    def ambient_params(self) -> Tuple[Param, ...]:
        return tuple(xi(n) for n in self.param_names)

    def weight_form(self, i: int) -> LinForm:
        return LinForm.make({p: c for p, c in
                             zip(self.ambient_params(), self.weights[i])})

    def weight_class(self, i: int, spec=EMPTY_SPEC) -> CohClass:
        out = const(0, spec, self.ambient_params())
        for p, c in zip(self.ambient_params(), self.weights[i]):
            if c:
                out = out + var(p, spec) * Fraction(c)
        return out


@dataclass(frozen=True)
class PolPath:
    """A straight segment of polarizations from chi_minus to chi_plus."""

    chi_minus: QVec
    chi_plus: QVec

    def __post_init__(self) -> None:
        object.__setattr__(self, "chi_minus", tuple(rat(x) for x in self.chi_minus))
        object.__setattr__(self, "chi_plus", tuple(rat(x) for x in self.chi_plus))
        if len(self.chi_minus) != len(self.chi_plus):
            raise VgwError("path endpoints have different ranks")

    def at(self, t) -> QVec:
        t = rat(t)
        a = (1 - t) / 2
        b = (1 + t) / 2
        return tuple(a * m + b * p for m, p in zip(self.chi_minus, self.chi_plus))


@dataclass(frozen=True)
class Wall:
    """One wall crossing: parameter, oriented primitive normal, support.

    ``support`` holds the 0-based indices of the weights lying on the wall;
    ``chi_star`` is the polarization at the crossing.  The normal is
    oriented so the pairing with the path direction is positive.
    """

    index: int
    t_star: Fraction
    zeta: Vec
    support: Tuple[int, ...]
    chi_star: QVec


def is_semistable_support(action: TorusAction, chi: Sequence,
                          support: Sequence[int]) -> bool:
    """Can ``chi`` be written inside the cone of the supported weights?"""
    gens = [action.weights[i] for i in support]
    return cone_contains(gens, chi)


def quotient_nonempty(action: TorusAction, chi: Sequence) -> bool:
    """A point with full support is semistable iff chi lies in the weight cone."""
    return cone_contains(action.weights, chi)


def _hyperplane_normals(action: TorusAction) -> List[Vec]:
    r = action.rank
    if r == 1:
        return [(1,)]
    distinct = sorted({w for w in action.weights if any(w)})
    normals = set()
    for subset in combinations(distinct, r - 1):
        ker = _integer_kernel(subset, r)
        if len(ker) != 1:
            continue
        normals.add(_canon_sign(_primitive(ker[0])))
    return sorted(normals)


def enumerate_walls(action: TorusAction, path: PolPath) -> List[Wall]:
    """All walls met by the open segment, sorted by crossing parameter.

    Raises DegenerateWallError when the segment is not generic: two walls
    at the same parameter, a vanishing polarization at a crossing (rank at
    least 2), or a whole sub-interval of strictly semistable points.
    """
    r = action.rank
    if len(path.chi_minus) != r:
        raise VgwError("path rank does not match the action")
    found: List[Tuple[Fraction, Vec, Tuple[int, ...], QVec]] = []
    for normal in _hyperplane_normals(action):
        support = tuple(i for i, w in enumerate(action.weights)
                        if _dot(w, normal) == 0)
        a = _dot([(p - m) / 2 for m, p in zip(path.chi_minus, path.chi_plus)], normal)
        b = _dot([(p + m) / 2 for m, p in zip(path.chi_minus, path.chi_plus)], normal)
        if a == 0:
            if b == 0:
                gens = [action.weights[i] for i in support]
                for t in (Fraction(0), Fraction(1, 2), Fraction(-1, 2)):
                    if cone_contains(gens, path.at(t)):
                        raise DegenerateWallError(
                            "path runs inside a wall through semistable points")
            continue
        zeta = normal if a > 0 else tuple(-x for x in normal)
        t_star = -b / a if a > 0 else -(-b) / (-a)
        if not (Fraction(-1) < t_star < Fraction(1)):
            continue
        chi_star = path.at(t_star)
        if r >= 2 and all(x == 0 for x in chi_star):
            raise DegenerateWallError(
                "polarization vanishes at a crossing; split the path")
        if not cone_contains([action.weights[i] for i in support], chi_star):
            continue
        found.append((t_star, zeta, support, chi_star))
    found.sort(key=lambda w: (w[0], w[1]))
    walls: List[Wall] = []
    for idx, (t_star, zeta, support, chi_star) in enumerate(found):
        if idx and walls[-1].t_star == t_star:
            raise DegenerateWallError(
                f"two distinct walls cross at t = {t_star}; perturb the path")
        walls.append(Wall(idx, t_star, zeta, support, chi_star))
    return walls


# ---------------------------------------------------------------------------
# descent to a wall
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DescentData:
    """How to rewrite classes on the wall.

    ``zeta_param`` is the new equivariant parameter for the normal
    direction, ``residual`` the induced action of the perpendicular torus
    on the wall coordinates, ``sigma`` the chosen splitting (any rational
    vector pairing nonzero with the normal), ``basis`` the lattice basis
    of the wall hyperplane, ``sub`` the substitution sending each ambient
    parameter to its expression in the new ones, and ``chi_residual`` the
    crossing polarization in wall coordinates.
    """

    zeta_param: Param
    zeta: Vec
    residual: TorusAction
    sigma: QVec
    basis: Tuple[Vec, ...]
    sub: Dict[str, CohClass]
    chi_residual: QVec

    def split(self, v: Sequence) -> Tuple[Fraction, QVec]:
        """Pairing with the normal plus wall-hyperplane coordinates of the
        sigma-projected remainder."""
        pairing = _dot(v, self.zeta)
        s_pair = _dot(self.sigma, self.zeta)
        perp = [rat(x) - pairing * s / s_pair
                for x, s in zip(v, self.sigma)]
        return pairing, _solve_coords(self.basis, perp)

    def form_of(self, v: Sequence) -> Dict[Param, Fraction]:
        """The descended linear form of an ambient weight vector."""
        pairing, coords = self.split(v)
        out: Dict[Param, Fraction] = {}
        if pairing:
            out[self.zeta_param] = pairing
        for p, c in zip(self.residual.ambient_params(), coords):
            if c:
                out[p] = c
        return out


def residual_action(action: TorusAction, wall: Wall,
                    sigma: Optional[Sequence] = None,
                    zeta_name: Optional[str] = None,
                    residual_prefix: Optional[str] = None,
                    ) -> Tuple[TorusAction, DescentData]:
    """Split the torus along a wall.

    Returns the residual action of the wall torus on the supported
    coordinates plus the :class:`DescentData` needed to descend classes.
    A custom ``sigma`` may be any rational vector pairing nonzero with
    the wall normal; the computed quantities do not depend on the choice.
    """
    r = action.rank
    zeta = wall.zeta
    sigma_default, basis = _lattice_section(zeta)
    if sigma is not None:
        sigma_t = tuple(rat(x) for x in sigma)
        if _dot(sigma_t, zeta) == 0:
            raise VgwError("sigma must pair nonzero with the wall normal")
    else:
        sigma_t = tuple(Fraction(x) for x in sigma_default)
    if zeta_name is None:
        zeta_name = f"zeta_t{wall.index}"
    if residual_prefix is None:
        residual_prefix = f"t{wall.index}_"
    res_names = tuple(f"{residual_prefix}x{j+1}" for j in range(r - 1))
    zeta_param = xi(zeta_name)
    res_params = tuple(xi(n) for n in res_names)

    res_weights = []
    for i in wall.support:
        if _dot(action.weights[i], zeta) != 0:
            raise VgwError("support weight does not lie on the wall")
        coords = _solve_coords(basis, action.weights[i])
        w = []
        for c in coords:
            if c.denominator != 1:
                raise VgwError("wall basis failed to be a lattice basis")
            w.append(int(c))
        res_weights.append(tuple(w))
    residual = TorusAction(r - 1, tuple(res_weights), res_names)
    chi_res = _solve_coords(basis, wall.chi_star)
    descent = DescentData(zeta_param, zeta, residual, sigma_t, tuple(basis),
                          {}, chi_res)

    sub: Dict[str, CohClass] = {}
    all_params = (zeta_param,) + res_params
    for i, name in enumerate(action.param_names):
        e_i = [1 if j == i else 0 for j in range(r)]
        pairing, coords = descent.split(e_i)
        img = const(0, EMPTY_SPEC, all_params)
        if pairing:
            img = img + var(zeta_param) * pairing
        for p, c in zip(res_params, coords):
            if c:
                img = img + var(p) * c
        sub[name] = img
    object.__setattr__(descent, "sub", sub)
    return residual, descent


# ---------------------------------------------------------------------------
# empty chamber
# ---------------------------------------------------------------------------

def find_empty_chamber(action: TorusAction) -> Vec:
    """An integral polarization with no semistable points.

    Looks for a nonzero integer vector pairing nonnegatively with every
    weight; its negative then provably lies outside the weight cone.
    Raises FullConeError when the weights positively span everything.
    """
    r = action.rank
    candidates: List[Vec] = []
    for j in range(r):
        e = tuple(1 if i == j else 0 for i in range(r))
        candidates.append(e)
        candidates.append(tuple(-x for x in e))
    for n in _hyperplane_normals(action):
        candidates.append(n)
        candidates.append(tuple(-x for x in n))
    if action.weights:
        ker = _integer_kernel(action.weights, r)
        for v in ker:
            candidates.append(v)
            candidates.append(tuple(-x for x in v))
    seen = set()
    for eta in candidates:
        if eta in seen or not any(eta):
            continue
        seen.add(eta)
        if all(_dot(w, eta) >= 0 for w in action.weights):
            chi0 = tuple(-x for x in eta)
            if not quotient_nonempty(action, chi0):
                return chi0
    raise FullConeError(
        "weights positively span the whole space; no empty chamber exists")

"""Exact arithmetic on equivariant cohomology classes.

The working objects are quotients

    numerator / product of linear forms

where the numerator is a multivariate polynomial with rational
coefficients and every denominator factor is a nonzero linear form in
"equivariant" parameters.  Three kinds of parameter exist:

* ``xi``    -- equivariant parameters (invertible, Laurent behaviour),
* ``theta`` -- auxiliary equivariant parameters (same algebra as ``xi``,
               kept separate so callers can tell residue variables from
               localization variables),
* ``omega`` -- nilpotent generators truncated by a :class:`NilpotentSpec`
               (``omega**(n+1) == 0``).

Denominator factors never contain nilpotent parameters: dividing by a
form ``P + N`` with ``N`` nilpotent is expanded exactly as the finite sum

    1/(P+N)**m  ==  sum_k  C(m+k-1, k) * (-N)**k / P**(m+k)

so the representation is closed under every operation used here,
including residues, which are computed by the derivative formula

    Res_{v=0} F/v**m  ==  (1/(m-1)!) * (d/dv)**(m-1) F |_{v=0}.

All values are immutable after construction and all operations are pure
functions, so instances can be shared freely across worker processes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Dict, Iterable, Mapping, Tuple, Union


Rat = Fraction
RatLike = Union[int, str, Fraction]

# A monomial is a sorted tuple of (parameter name, positive exponent).
Mono = Tuple[Tuple[str, int], ...]
Poly = Dict[Mono, Fraction]
# A canonical linear form: sorted (name, coefficient) pairs, leading
# coefficient +1, no zero coefficients.
FormKey = Tuple[Tuple[str, Fraction], ...]

KIND_XI = "xi"
KIND_OMEGA = "omega"
KIND_THETA = "theta"
_KINDS = (KIND_XI, KIND_OMEGA, KIND_THETA)


class VgwError(Exception):
    """Base class for every error raised by this package."""


class ContextError(VgwError):
    """Operands disagree on parameter kinds or nilpotent truncation."""


class DenominatorError(VgwError):
    """A denominator form is zero or has no equivariant part."""


class SubstitutionError(VgwError):
    """A substitution image is not usable where it was applied."""


class ResidueError(VgwError):
    """Residue extraction was asked of an unsuitable variable."""


class IntegrationError(VgwError):
    """integrate_top preconditions were violated."""


def rat(x: RatLike) -> Fraction:
    """Coerce ``x`` (int, Fraction or a string like ``"3/2"``) to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


@dataclass(frozen=True)
class Param:
    """A named generator of the ring; ``kind`` fixes its algebra."""

    name: str
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ContextError(f"unknown parameter kind {self.kind!r}")
        if not self.name:
            raise ContextError("parameter name must be nonempty")


def xi(name: str) -> Param:
    return Param(name, KIND_XI)


def omega(name: str) -> Param:
    return Param(name, KIND_OMEGA)


def theta(name: str) -> Param:
    return Param(name, KIND_THETA)


@dataclass(frozen=True)
class NilpotentSpec:
    """Truncation data for the nilpotent generators.

    ``bounds`` maps each omega-parameter name to its top exponent ``n``
    (meaning ``omega**(n+1) == 0``); ``normalization`` is the value of the
    integral of the top monomial ``prod omega_j**n_j``.
    """

    bounds: Tuple[Tuple[str, int], ...] = ()
    normalization: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        names = [n for n, _ in self.bounds]
        if len(set(names)) != len(names):
            raise ContextError("duplicate nilpotent parameter in spec")
        if sorted(self.bounds) != list(self.bounds):
            object.__setattr__(self, "bounds", tuple(sorted(self.bounds)))
        for n, b in self.bounds:
            if b < 0:
                raise ContextError(f"negative truncation exponent for {n}")
        object.__setattr__(self, "normalization", rat(self.normalization))
        if self.bounds and self.normalization == 0:
            raise ContextError("normalization must be nonzero for a nonempty spec")

    def bound(self, name: str):
        for n, b in self.bounds:
            if n == name:
                return b
        return None

    def top_mono(self) -> Mono:
        return tuple((n, b) for n, b in self.bounds if b >= 1)


EMPTY_SPEC = NilpotentSpec()


@dataclass(frozen=True)
class LinForm:
    """A rational linear form in named parameters (no constant term)."""

    terms: Tuple[Tuple[Param, Fraction], ...]

    @classmethod
    def make(cls, coeffs: Mapping[Param, RatLike]) -> "LinForm":
        items = []
        for p, c in coeffs.items():
            c = rat(c)
            if c != 0:
                items.append((p, c))
        items.sort(key=lambda t: t[0].name)
        return cls(tuple(items))

    def is_zero(self) -> bool:
        return not self.terms

    def coeff_dict(self) -> Dict[str, Fraction]:
        return {p.name: c for p, c in self.terms}

    def params(self) -> Tuple[Param, ...]:
        return tuple(p for p, _ in self.terms)

    def scaled(self, c: RatLike) -> "LinForm":
        c = rat(c)
        return LinForm.make({p: c * v for p, v in self.terms})


# ---------------------------------------------------------------------------
# plain polynomial helpers (dict of monomial -> Fraction)
# ---------------------------------------------------------------------------

def _mono_mul(m1: Mono, m2: Mono) -> Mono:
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for n, e in m2:
        d[n] = d.get(n, 0) + e
    return tuple(sorted(d.items()))


def _poly_add(a: Poly, b: Poly) -> Poly:
    out = dict(a)
    for m, c in b.items():
        s = out.get(m, Fraction(0)) + c
        if s:
            out[m] = s
        elif m in out:
            del out[m]
    return out


def _poly_scale(a: Poly, c: Fraction) -> Poly:
    if c == 0:
        return {}
    return {m: v * c for m, v in a.items()}


def _poly_mul_plain(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = _mono_mul(m1, m2)
            s = out.get(m, Fraction(0)) + c1 * c2
            if s:
                out[m] = s
            elif m in out:
                del out[m]
    return out


def _truncate(a: Poly, spec: NilpotentSpec) -> Poly:
    if not spec.bounds:
        return a
    out = {}
    for m, c in a.items():
        dead = False
        for n, e in m:
            b = spec.bound(n)
            if b is not None and e > b:
                dead = True
                break
        if not dead:
            out[m] = c
    return out


def _poly_mul(a: Poly, b: Poly, spec: NilpotentSpec) -> Poly:
    return _truncate(_poly_mul_plain(a, b), spec)


def _poly_deriv(a: Poly, name: str) -> Poly:
    out: Poly = {}
    for m, c in a.items():
        d = dict(m)
        e = d.get(name, 0)
        if e == 0:
            continue
        if e == 1:
            del d[name]
        else:
            d[name] = e - 1
        out[tuple(sorted(d.items()))] = c * e
    return out


def _form_as_poly(coeffs: Mapping[str, Fraction]) -> Poly:
    return {((n, 1),): c for n, c in coeffs.items() if c != 0}


def _canon_form(coeffs: Mapping[str, Fraction]):
    """Canonicalize a nonzero linear form.

    Returns ``(key, scale)`` with ``form == scale * key`` and the first
    (name-ordered) coefficient of ``key`` equal to +1.
    """
    items = sorted((n, c) for n, c in coeffs.items() if c != 0)
    if not items:
        raise DenominatorError("denominator form is identically zero")
    scale = items[0][1]
    key = tuple((n, c / scale) for n, c in items)
    return key, scale


def _den_merge(*dens) -> Tuple[Tuple[FormKey, int], ...]:
    acc: Dict[FormKey, int] = {}
    for den in dens:
        for key, mult in den:
            acc[key] = acc.get(key, 0) + mult
    return tuple(sorted((k, m) for k, m in acc.items() if m > 0))


def _poly_div_form(num: Poly, key: FormKey):
    """Exact polynomial division of ``num`` by the linear form ``key``.

    Returns the quotient, or None when the division leaves a remainder.
    Plain polynomial arithmetic; sound for classes because an identity of
    plain polynomials still holds modulo the truncation ideal.
    """
    if not num:
        return {}
    (x0, c0), rest = key[0], key[1:]
    rest_poly = _form_as_poly(dict(rest))
    layers: Dict[int, Poly] = {}
    for m, c in num.items():
        d = dict(m)
        e = d.pop(x0, 0)
        layers.setdefault(e, {})[tuple(sorted(d.items()))] = c
    maxd = max(layers)
    if maxd == 0:
        return None
    carry = {d: dict(p) for d, p in layers.items()}
    quot: Dict[int, Poly] = {}
    for d in range(maxd, 0, -1):
        a_d = carry.get(d, {})
        q = _poly_scale(a_d, Fraction(1) / c0)
        quot[d - 1] = q
        if q and rest_poly:
            prod = _poly_mul_plain(q, rest_poly)
            carry[d - 1] = _poly_add(carry.get(d - 1, {}), _poly_scale(prod, Fraction(-1)))
    a0 = carry.get(0, {})
    check = _poly_mul_plain(quot.get(0, {}), rest_poly) if rest_poly else {}
    if _poly_add(a0, _poly_scale(check, Fraction(-1))):
        return None
    out: Poly = {}
    for d, p in quot.items():
        for m, c in p.items():
            if c == 0:
                continue
            mm = _mono_mul(m, ((x0, d),)) if d else m
            out[mm] = out.get(mm, Fraction(0)) + c
    return {m: c for m, c in out.items() if c != 0}


def _merge_params(*groups: Iterable[Param]) -> Tuple[Param, ...]:
    by_name: Dict[str, Param] = {}
    for g in groups:
        for p in g:
            q = by_name.get(p.name)
            if q is None:
                by_name[p.name] = p
            elif q.kind != p.kind:
                raise ContextError(
                    f"parameter {p.name!r} used with kinds {q.kind!r} and {p.kind!r}"
                )
    return tuple(sorted(by_name.values(), key=lambda p: p.name))


# ---------------------------------------------------------------------------
# CohClass
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CohClass:
    """numerator / product of canonical linear forms, see module docstring.

    Do not build instances directly; use :func:`make_class` or the
    constructors :func:`const`, :func:`var`, :func:`from_linform`.
    """

    num: Tuple[Tuple[Mono, Fraction], ...]
    den: Tuple[Tuple[FormKey, int], ...]
    params: Tuple[Param, ...]
    spec: NilpotentSpec

    # -- inspection ---------------------------------------------------------

    def num_poly(self) -> Poly:
        return dict(self.num)

    def kind_of(self, name: str):
        for p in self.params:
            if p.name == name:
                return p.kind
        return None

    def is_zero(self) -> bool:
        return not self.num

    def as_rat(self) -> Fraction:
        """The class as a plain rational; error if it is not constant."""
        if self.den:
            raise VgwError("class is not constant: denominators remain")
        if not self.num:
            return Fraction(0)
        if len(self.num) == 1 and self.num[0][0] == ():
            return self.num[0][1]
        raise VgwError("class is not constant")

    # -- ring operations ----------------------------------------------------

    def _check(self, other: "CohClass") -> None:
        if self.spec != other.spec:
            raise ContextError("mismatched nilpotent contexts")

    def __add__(self, other):
        other = _coerce(other, self)
        if other is NotImplemented:
            return NotImplemented
        self._check(other)
        params = _merge_params(self.params, other.params)
        den = _den_merge(self.den, other.den)
        na = _scale_to_common(self.num_poly(), self.den, den, self.spec)
        nb = _scale_to_common(other.num_poly(), other.den, den, self.spec)
        return make_class(_poly_add(na, nb), den, params, self.spec)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return make_class(_poly_scale(self.num_poly(), Fraction(-1)),
                          self.den, self.params, self.spec)

    def __sub__(self, other):
        other = _coerce(other, self)
        if other is NotImplemented:
            return NotImplemented
        return self.__add__(other.__neg__())

    def __rsub__(self, other):
        other = _coerce(other, self)
        if other is NotImplemented:
            return NotImplemented
        return other.__sub__(self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return make_class(_poly_scale(self.num_poly(), rat(other)),
                              self.den, self.params, self.spec)
        other = _coerce(other, self)
        if other is NotImplemented:
            return NotImplemented
        self._check(other)
        params = _merge_params(self.params, other.params)
        num = _poly_mul(self.num_poly(), other.num_poly(), self.spec)
        return make_class(num, _den_merge(self.den, other.den), params, self.spec)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            q = rat(other)
            if q == 0:
                raise ZeroDivisionError("division of a class by zero")
            return self * (Fraction(1) / q)
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise VgwError("classes support integer powers n >= 0 only")
        out = const(1, self.spec, self.params)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = const(other, self.spec)
        if not isinstance(other, CohClass):
            return NotImplemented
        if self.spec != other.spec:
            return False
        _merge_params(self.params, other.params)  # kind conflicts are real errors
        den = _den_merge(self.den, other.den)
        common = tuple((k, max(_mult(self.den, k), _mult(other.den, k))) for k, _ in den)
        na = _scale_to_common(self.num_poly(), self.den, common, self.spec)
        nb = _scale_to_common(other.num_poly(), other.den, common, self.spec)
        return na == nb

    __hash__ = None  # type: ignore[assignment]

    # -- division by forms --------------------------------------------------

    def div_form(self, form, mult: int = 1) -> "CohClass":
        """Divide by ``form**mult`` (``mult >= 1``).

        ``form`` may be a LinForm or a mapping ``Param -> coefficient``.
        The nilpotent part of the form is folded into the numerator by the
        exact geometric expansion; the equivariant part must be nonzero.
        """
        if mult < 1:
            raise VgwError("div_form needs mult >= 1; use mul_form to fold")
        coeffs, fparams = _form_input(form)
        params = _merge_params(self.params, fparams)
        kinds = {p.name: p.kind for p in params}
        main = {n: c for n, c in coeffs.items() if kinds[n] != KIND_OMEGA and c != 0}
        nil = {((n, 1),): c for n, c in coeffs.items()
               if kinds[n] == KIND_OMEGA and c != 0}
        if not main and not nil:
            raise DenominatorError("denominator form is identically zero")
        return _div_split(self, main, nil, mult, params)

    def mul_form(self, form, mult: int = 1) -> "CohClass":
        """Multiply by ``form**mult`` (numerator side; folds virtual factors)."""
        if mult < 0:
            raise VgwError("mul_form needs mult >= 0")
        coeffs, fparams = _form_input(form)
        params = _merge_params(self.params, fparams)
        poly = _form_as_poly(coeffs)
        num = self.num_poly()
        for _ in range(mult):
            num = _poly_mul(num, poly, self.spec)
        return make_class(num, self.den, params, self.spec)

    # -- rendering ----------------------------------------------------------

    def render(self) -> str:
        return render(self)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"CohClass({render(self)})"


def _mult(den, key) -> int:
    for k, m in den:
        if k == key:
            return m
    return 0


def _coerce(other, like: CohClass):
    if isinstance(other, CohClass):
        return other
    if isinstance(other, (int, Fraction)):
        return const(other, like.spec)
    return NotImplemented


def _scale_to_common(num: Poly, den, common, spec: NilpotentSpec) -> Poly:
    """Multiply ``num`` by the forms missing from ``den`` relative to ``common``."""
    for key, m in common:
        extra = m - _mult(den, key)
        fp = _form_as_poly(dict(key))
        for _ in range(extra):
            num = _poly_mul(num, fp, spec)
    return num


def _form_input(form):
    """Normalize a LinForm / mapping into (name->coeff dict, params)."""
    if isinstance(form, LinForm):
        return {p.name: c for p, c in form.terms}, form.params()
    if isinstance(form, Mapping):
        coeffs = {}
        params = []
        for p, c in form.items():
            if not isinstance(p, Param):
                raise TypeError("form mappings must be keyed by Param")
            c = rat(c)
            if c != 0:
                coeffs[p.name] = c
                params.append(p)
        return coeffs, tuple(params)
    raise TypeError(f"not a linear form: {form!r}")


def make_class(num: Poly, den, params, spec: NilpotentSpec) -> CohClass:
    """Normalize and build a CohClass.

    Applies truncation, drops zero coefficients, cancels denominator forms
    that divide the numerator exactly, and sorts everything canonically.
    """
    num = {m: c for m, c in _truncate(num, spec).items() if c != 0}
    den = _den_merge(den)
    if not num:
        return CohClass((), (), tuple(params), spec)
    if den:
        newden = []
        for key, m in den:
            while m > 0:
                q = _poly_div_form(num, key)
                if q is None:
                    break
                num = q
                m -= 1
            if m > 0:
                newden.append((key, m))
        den = tuple(newden)
    return CohClass(tuple(sorted(num.items())), den, tuple(params), spec)


def const(value: RatLike, spec: NilpotentSpec = EMPTY_SPEC,
          params: Tuple[Param, ...] = ()) -> CohClass:
    v = rat(value)
    num = {(): v} if v else {}
    return make_class(num, (), params, spec)


def var(p: Param, spec: NilpotentSpec = EMPTY_SPEC) -> CohClass:
    return make_class({((p.name, 1),): Fraction(1)}, (), (p,), spec)


def from_linform(form: LinForm, spec: NilpotentSpec = EMPTY_SPEC) -> CohClass:
    num = {((p.name, 1),): c for p, c in form.terms}
    return make_class(num, (), form.params(), spec)


def from_terms(terms, spec: NilpotentSpec = EMPTY_SPEC) -> CohClass:
    """Build a polynomial class from (coefficient, ((Param, exp), ...)) pairs."""
    num: Poly = {}
    params = []
    for coeff, factors in terms:
        mono: Dict[str, int] = {}
        for p, e in factors:
            params.append(p)
            if e:
                mono[p.name] = mono.get(p.name, 0) + e
        key = tuple(sorted(mono.items()))
        c = rat(coeff)
        if c:
            num[key] = num.get(key, Fraction(0)) + c
    num = {m: c for m, c in num.items() if c != 0}
    return make_class(num, (), _merge_params(params), spec)


def _div_split(c: CohClass, main: Dict[str, Fraction], nil: Poly,
               mult: int, params) -> CohClass:
    """Divide ``c`` by ``(P + N)**mult`` where P = main (pure xi/theta
    linear form) and N = nil (nilpotent polynomial)."""
    if not main:
        raise DenominatorError(
            "denominator form has no equivariant part (nilpotent-only or zero)")
    key, scale = _canon_form(main)
    total = const(0, c.spec, params)
    power: Poly = {(): Fraction(1)}  # (-N)**k, truncated
    k = 0
    while power:
        coeff = Fraction(comb(mult + k - 1, k)) / scale ** (mult + k)
        num = _poly_scale(_poly_mul(c.num_poly(), power, c.spec), coeff)
        den = _den_merge(c.den, ((key, mult + k),))
        total = total + make_class(num, den, params, c.spec)
        k += 1
        power = _poly_mul(power, _poly_scale(nil, Fraction(-1)), c.spec)
    return total


# ---------------------------------------------------------------------------
# residues
# ---------------------------------------------------------------------------

def _ddv(c: CohClass, name: str) -> CohClass:
    parts = [make_class(_poly_deriv(c.num_poly(), name), c.den, c.params, c.spec)]
    for key, m in c.den:
        cv = dict(key).get(name, Fraction(0))
        if cv == 0:
            continue
        num = _poly_scale(c.num_poly(), Fraction(-m) * cv)
        den = _den_merge(c.den, ((key, 1),))
        parts.append(make_class(num, den, c.params, c.spec))
    out = parts[0]
    for p in parts[1:]:
        out = out + p
    return out


def residue_at_zero(c: CohClass, v: Param) -> CohClass:
    """Coefficient of ``v**-1`` in the Laurent expansion of ``c`` at v = 0.

    The expansion branch treats ``v`` as the smallest quantity: every
    denominator form with a nonzero part independent of ``v`` is expanded
    as a geometric series in ``v``.  The result is again a CohClass and is
    free of ``v``.
    """
    if v.kind == KIND_OMEGA:
        raise ResidueError("residues are defined for xi/theta parameters only")
    have = c.kind_of(v.name)
    if have is not None and have != v.kind:
        raise ContextError(f"parameter {v.name!r} has kind {have!r} here")
    pure_key: FormKey = ((v.name, Fraction(1)),)
    m = 0
    plain = []
    mixed = []
    for key, mult in c.den:
        if key == pure_key:
            m += mult
            continue
        coeffs = dict(key)
        cv = coeffs.pop(v.name, Fraction(0))
        if cv != 0 and not coeffs:
            # cannot happen for canonical keys, but guard the contract
            raise ResidueError("denominator form is a bare multiple of the variable")
        if cv == 0:
            plain.append((key, mult))
        else:
            mixed.append((cv, coeffs, mult))
    params = tuple(p for p in c.params if p.name != v.name)
    if m == 0:
        return const(0, c.spec, params)

    # We need the coefficient of v**(m-1) in num(v) times the product of
    # the expansions 1/(R + cv*v)**k = sum_j C(k+j-1,j) (-cv)**j v**j / R**(k+j).
    top = m - 1
    layers: Dict[int, Poly] = {}
    for mono, coeff in c.num:
        d = dict(mono)
        e = d.pop(v.name, 0)
        if e > top:
            continue
        lay = layers.setdefault(e, {})
        rest = tuple(sorted(d.items()))
        lay[rest] = lay.get(rest, Fraction(0)) + coeff
    # Each expansion is held over the uniform denominator R**(k+top), so the
    # truncated series have plain polynomial coefficients and the final class
    # is assembled (and reduced) in a single pass.
    prod: Dict[int, Poly] = {0: {(): Fraction(1)}}
    scale = Fraction(1)
    den = list(plain)
    for cv, rest, mult in mixed:
        rkey, rscale = _canon_form(rest)
        scale /= rscale ** (mult + top)
        den.append((rkey, mult + top))
        rpoly = _form_as_poly(rest)
        rpow: Dict[int, Poly] = {top: {(): Fraction(1)}}
        for j in range(top - 1, -1, -1):
            rpow[j] = _poly_mul(rpow[j + 1], rpoly, c.spec)
        series = {
            j: _poly_scale(rpow[j], Fraction(comb(mult + j - 1, j)) * (-cv) ** j)
            for j in range(top + 1)
        }
        nxt: Dict[int, Poly] = {}
        for a, pa in prod.items():
            for b, pb in series.items():
                if a + b > top:
                    continue
                nxt[a + b] = _poly_add(nxt.get(a + b, {}),
                                       _poly_mul(pa, pb, c.spec))
        prod = nxt
    total: Poly = {}
    for e, lay in layers.items():
        part = prod.get(top - e)
        if part:
            total = _poly_add(total, _poly_mul(lay, part, c.spec))
    return make_class(_poly_scale(total, scale), den, params, c.spec)


def iterated_residue(c: CohClass, vars: Iterable[Param]) -> CohClass:
    """Apply :func:`residue_at_zero` sequentially, innermost variable first."""
    out = c
    for v in vars:
        out = residue_at_zero(out, v)
    return out


# ---------------------------------------------------------------------------
# substitution
# ---------------------------------------------------------------------------

def substitute(c: CohClass, mapping: Mapping[Union[str, Param], CohClass]) -> CohClass:
    """Apply a parameter substitution.

    Image classes must be denominator-free (linear form plus nilpotent
    polynomial is the intended shape).  Substitution into a denominator
    form is permitted only when the image form is again invertible: it
    must keep a nonzero linear equivariant part.
    """
    images: Dict[str, CohClass] = {}
    for kkey, img in mapping.items():
        name = kkey.name if isinstance(kkey, Param) else kkey
        if not isinstance(img, CohClass):
            raise SubstitutionError(f"image of {name!r} is not a class")
        if img.den:
            raise SubstitutionError(f"image of {name!r} carries denominators")
        if img.spec != c.spec:
            raise ContextError("substitution image lives in another nilpotent context")
        images[name] = img

    param_groups = [tuple(p for p in c.params if p.name not in images)]
    for img in images.values():
        param_groups.append(img.params)
    params = _merge_params(*param_groups)

    def image_of(name: str) -> CohClass:
        if name in images:
            return images[name]
        kind = c.kind_of(name) or KIND_XI
        return var(Param(name, kind), c.spec)

    out = const(0, c.spec, params)
    for mono, coeff in c.num:
        term = const(coeff, c.spec, params)
        for name, e in mono:
            term = term * image_of(name) ** e
        out = out + term

    kinds = {p.name: p.kind for p in params}
    for key, mult in c.den:
        img = const(0, c.spec, params)
        for name, coeff in key:
            img = img + image_of(name) * coeff
        main: Dict[str, Fraction] = {}
        nil: Poly = {}
        for mono, coeff in img.num:
            has_omega = any(kinds[n] == KIND_OMEGA for n, _ in mono)
            if has_omega:
                nil[mono] = coeff
            elif len(mono) == 1 and mono[0][1] == 1:
                main[mono[0][0]] = coeff
            else:
                raise SubstitutionError(
                    "denominator image must stay linear in equivariant parameters")
        if not main:
            raise SubstitutionError(
                "denominator form maps to a zero or nilpotent-only class")
        out = _div_split(out, main, nil, mult, params)
    return out


# ---------------------------------------------------------------------------
# integration
# ---------------------------------------------------------------------------

def integrate_top(c: CohClass, spec: NilpotentSpec) -> Fraction:
    """Integrate over the compact fixed component the spec describes.

    The class must contain no equivariant parameters and no denominators;
    the value is the coefficient of the top nilpotent monomial times the
    normalization constant.  With an empty spec the class must be constant
    and is returned as-is.
    """
    if spec != c.spec:
        raise ContextError("class was built for a different nilpotent spec")
    if c.den:
        raise IntegrationError("cannot integrate a class with denominators")
    for p in c.params:
        if p.kind != KIND_OMEGA and any(n == p.name for mono, _ in c.num for n, _ in mono):
            raise IntegrationError(f"equivariant parameter {p.name!r} remains")
    num = c.num_poly()
    if not spec.bounds:
        if not num:
            return Fraction(0)
        if list(num) == [()]:
            return num[()]
        raise IntegrationError("nonconstant class over a point")
    top = spec.top_mono()
    return num.get(top, Fraction(0)) * spec.normalization


def integrate_fiber(c: CohClass, spec: NilpotentSpec) -> CohClass:
    """Integrate out the nilpotent generators, keeping everything else.

    Equivariant parameters and denominators ride along (denominators never
    contain nilpotent names by construction).  Used for localization-style
    integrals whose answer is a Laurent class in auxiliary parameters.
    """
    if spec != c.spec:
        raise ContextError("class was built for a different nilpotent spec")
    top = dict(spec.top_mono())
    onames = {n for n, _ in spec.bounds}
    out: Poly = {}
    for mono, coeff in c.num:
        opart = {n: e for n, e in mono if n in onames}
        if opart != top:
            continue
        rest = tuple((n, e) for n, e in mono if n not in onames)
        out[rest] = out.get(rest, Fraction(0)) + coeff
    params = tuple(p for p in c.params if p.name not in onames)
    return make_class(_poly_scale(out, spec.normalization), c.den, params, EMPTY_SPEC)


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def render_rat(q: Fraction) -> str:
    return str(q)


def _render_mono(mono: Mono, coeff: Fraction) -> str:
    facs = [n if e == 1 else f"{n}^{e}" for n, e in mono]
    if not facs:
        return render_rat(coeff)
    if coeff == 1:
        return "*".join(facs)
    if coeff == -1:
        return "-" + "*".join(facs)
    return "*".join([render_rat(coeff)] + facs)


def render_form(key: FormKey) -> str:
    parts = []
    for i, (n, cf) in enumerate(key):
        s = _render_mono(((n, 1),), cf)
        if i == 0:
            parts.append(s)
        elif s.startswith("-"):
            parts.append("- " + s[1:])
        else:
            parts.append("+ " + s)
    return " ".join(parts)


def _mono_render_key(mono: Mono):
    # highest total degree first, then lexicographic in the variable names
    return (-sum(e for _, e in mono), tuple((n, -e) for n, e in mono))


def render(c: CohClass) -> str:
    if not c.num:
        return "0"
    parts = []
    ordered = sorted(c.num, key=lambda t: _mono_render_key(t[0]))
    for i, (mono, coeff) in enumerate(ordered):
        s = _render_mono(mono, coeff)
        if i == 0:
            parts.append(s)
        elif s.startswith("-"):
            parts.append("- " + s[1:])
        else:
            parts.append("+ " + s)
    num = " ".join(parts)
    if not c.den:
        return num
    dens = []
    for key, m in c.den:
        base = f"({render_form(key)})"
        dens.append(base if m == 1 else base + f"^{m}")
    if len(c.num) > 1:
        num = f"({num})"
    return num + " / " + "*".join(dens)

"""Shared test utilities: rational evaluation, a brute-force residue
oracle based on truncated geometric series, and seeded random instance
generators used across the property suites."""

from __future__ import annotations

import random
from fractions import Fraction
from math import comb
from typing import Dict, List, Optional, Tuple

from vgw import ring
from vgw.ring import CohClass, from_terms, xi


def eval_form(key, point: Dict[str, Fraction]) -> Fraction:
    return sum((point[n] * cf for n, cf in key), Fraction(0))


def eval_class(c: CohClass, point: Dict[str, Fraction]) -> Fraction:
    """Evaluate a class at a rational point of all its parameters."""
    num = Fraction(0)
    for mono, coeff in c.num:
        val = coeff
        for n, e in mono:
            val *= point[n] ** e
        num += val
    den = Fraction(1)
    for key, mult in c.den:
        v = eval_form(key, point)
        if v == 0:
            raise ZeroDivisionError("denominator form vanishes at the point")
        den *= v ** mult
    return num / den


def residue_oracle(c: CohClass, vname: str, point: Dict[str, Fraction]) -> Fraction:
    """Laurent-expand c in vname around 0 (all other parameters evaluated
    at the point) using truncated geometric series; return the coefficient
    of vname**-1.  Independent of the engine's derivative formula."""
    series: Dict[int, Fraction] = {}
    for mono, coeff in c.num:
        e = 0
        val = coeff
        for n, ex in mono:
            if n == vname:
                e = ex
            else:
                val *= point[n] ** ex
        if val:
            series[e] = series.get(e, Fraction(0)) + val

    shift = 0
    mixed: List[Tuple[Fraction, Fraction, int]] = []
    scale = Fraction(1)
    for key, mult in c.den:
        coeffs = dict(key)
        cv = coeffs.pop(vname, Fraction(0))
        if not coeffs:
            # canonical pure-v form (coefficient 1)
            shift += mult
            continue
        restval = sum((point[n] * cf for n, cf in coeffs.items()), Fraction(0))
        if restval == 0:
            raise ZeroDivisionError("v-free part vanishes at the point")
        if cv == 0:
            scale /= restval ** mult
        else:
            mixed.append((cv, restval, mult))

    series = {e - shift: v for e, v in series.items()}
    kmax = shift + 1  # exponents only grow from here, so this depth suffices

    for cv, restval, mult in mixed:
        # 1/(cv*v + restval)^mult = restval^-mult * sum_k C(mult+k-1,k) (-cv v/restval)^k
        expansion = {
            k: Fraction(comb(mult + k - 1, k)) * (Fraction(-cv) / restval) ** k
            for k in range(kmax + 1)
        }
        scale /= restval ** mult
        out: Dict[int, Fraction] = {}
        for e, va in series.items():
            for k, vb in expansion.items():
                t = e + k
                if t > -1:
                    continue  # can never come back down to v^-1
                out[t] = out.get(t, Fraction(0)) + va * vb
        series = out
    return series.get(-1, Fraction(0)) * scale


def random_rat(rng: random.Random, span: int = 9, denmax: int = 4) -> Fraction:
    n = rng.randint(-span, span)
    d = rng.randint(1, denmax)
    return Fraction(n, d)


def random_residue_instance(rng: random.Random):
    """A random class with <= 3 xi-parameters, <= 4 denominator factors,
    numerator degree <= 6, as in the oracle property contract."""
    nparams = rng.randint(1, 3)
    params = [xi(f"p{i+1}") for i in range(nparams)]
    v = params[0]
    terms = []
    for _ in range(rng.randint(1, 4)):
        mono = []
        total = 0
        for p in params:
            e = rng.randint(0, 2)
            if total + e > 6:
                e = 0
            total += e
            if e:
                mono.append((p, e))
        coeff = random_rat(rng)
        if coeff == 0:
            coeff = Fraction(1)
        terms.append((coeff, tuple(mono)))
    c = from_terms(terms)
    for _ in range(rng.randint(0, 4)):
        mult = rng.randint(1, 2)
        if rng.random() < 0.4 or nparams == 1:
            a = Fraction(rng.choice([1, 2, 3, -1, -2]))
            c = c.div_form({v: a}, mult)
        else:
            form = {}
            others = [p for p in params[1:]]
            spectator = rng.choice(others)
            form[spectator] = Fraction(rng.choice([1, 2, -1, -2, 3]))
            if rng.random() < 0.7:
                form[v] = Fraction(rng.choice([1, 2, -1, -2]))
            extra = rng.choice(others)
            if extra is not spectator and rng.random() < 0.5:
                form[extra] = Fraction(rng.choice([1, -1, 2]))
            c = c.div_form(form, mult)
    return c, v


def choose_point(rng: random.Random, names, avoid_forms) -> Optional[Dict[str, Fraction]]:
    """A random rational point at which none of the given forms vanish."""
    for _ in range(80):
        point = {n: Fraction(rng.randint(1, 12), rng.randint(1, 3))
                 * rng.choice([1, -1]) for n in names}
        ok = True
        for key in avoid_forms:
            reduced = [(n, cf) for n, cf in key if n in point]
            if not reduced:
                continue  # pure in a variable we are not evaluating
            if eval_form(reduced, point) == 0:
                ok = False
                break
        if ok:
            return point
    return None


def from_terms_random(rng: random.Random, params, spec) -> CohClass:
    """Random polynomial class over the given equivariant params plus the
    spec's nilpotent names; handy for homomorphism checks."""
    nil = [ring.omega(n) for n, _ in spec.bounds]
    terms = []
    for _ in range(rng.randint(1, 4)):
        mono = []
        for p in params:
            e = rng.randint(0, 2)
            if e:
                mono.append((p, e))
        for p in nil:
            e = rng.randint(0, 1)
            if e:
                mono.append((p, e))
        terms.append((random_rat(rng) + 1, tuple(mono)))
    return from_terms(terms, spec)


def class_derivative(c: CohClass, name: str) -> CohClass:
    """d/d(name), via the ring's internal rule (quotient rule on forms)."""
    return ring._ddv(c, name)

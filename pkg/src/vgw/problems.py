"""Problem documents: a line-oriented sectioned text format describing an
action, a polarization path, an insertion, and optional quantum/abstract
data.  Parsing reports every error it can find, each with a line and
column; all literals are exact rationals.

Document shape::

    [action]
    rank = 2
    params = z1 z2          # optional, defaults z1..zr
    weight = 1 0            # one line per coordinate
    [path]
    chi_minus = -1 2
    chi_plus = 2 -1
    [insertion]
    expr = c1^2
    [params]                # extra symbolic names for abstract data
    param = w omega
    [quantum]
    degree = 1 0            # repeatable
    window_radius = 4
    window_base = 0 0
    [abstract]
    residue = s
    [datum]                 # repeatable block
    label = plus
    restriction = (w + q)^3
    den = -w - 2*q          # repeatable; num = ... likewise
    weyl = 1/2
    orbifold = 2
    base = w:1
    base_normalization = 1
    t_star = 0
    weight_pair = 3 -1
    [options]
    sigma = 0 -1
    jobs = 2
    format = text

``#`` starts a comment.  Expressions use +, -, *, ^, parentheses,
rational literals like 3/2, parameter names, and the insertion helpers
c1, chern(j), chern_total (available when an action is present).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .ring import (
    CohClass,
    EMPTY_SPEC,
    LinForm,
    NilpotentSpec,
    Param,
    VgwError,
    const,
    omega,
    theta,
    var,
    xi,
)
from .geometry import PolPath, TorusAction
from .crossing import FixedPointDatum, c1 as _c1, chern as _chern, chern_total as _chern_total


class ProblemError(VgwError):
    """All diagnostics collected while parsing one document."""

    def __init__(self, diagnostics: Sequence[Tuple[int, int, str]]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(
            f"line {l}, col {c}: {m}" for l, c, m in self.diagnostics))


@dataclass(frozen=True)
class ProblemDoc:
    action: Optional[TorusAction] = None
    path: Optional[PolPath] = None
    insertion_text: str = ""
    insertion: Optional[CohClass] = None
    extra_params: Tuple[Tuple[str, str], ...] = ()
    degrees: Tuple[Tuple[int, ...], ...] = ()
    window_radius: Optional[int] = None
    window_base: Optional[Tuple[int, ...]] = None
    residue_name: str = ""
    data: Tuple[FixedPointDatum, ...] = ()
    datum_sources: Tuple[Tuple[Tuple[str, str], ...], ...] = ()
    sigma: Optional[Tuple[Fraction, ...]] = None
    jobs: Optional[int] = None
    format: str = ""


# ---------------------------------------------------------------------------
# expression parsing
# ---------------------------------------------------------------------------

_KINDS = {"xi": xi, "omega": omega, "theta": theta}


class _ExprError(Exception):
    def __init__(self, col: int, msg: str):
        self.col = col
        self.msg = msg
        super().__init__(msg)


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    """(kind, value, column) triples; kinds: name, int, op."""
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            out.append(("int", text[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            out.append(("name", text[i:j], i))
            i = j
            continue
        if ch in "+-*^/(),":
            out.append(("op", ch, i))
            i += 1
            continue
        raise _ExprError(i, f"unexpected character {ch!r}")
    return out


class _ExprParser:
    """Recursive-descent evaluator straight into CohClass values."""

    def __init__(self, text: str, env: Dict[str, CohClass],
                 action: Optional[TorusAction], spec: NilpotentSpec):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.env = env
        self.action = action
        self.spec = spec

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        if tok is None:
            raise _ExprError(0 if not self.tokens else self.tokens[-1][2] + 1,
                             "unexpected end of expression")
        self.pos += 1
        return tok

    def expect_op(self, op: str):
        tok = self.take()
        if tok[0] != "op" or tok[1] != op:
            raise _ExprError(tok[2], f"expected {op!r}")

    def parse(self) -> CohClass:
        value = self.expr()
        tok = self.peek()
        if tok is not None:
            raise _ExprError(tok[2], f"unexpected trailing {tok[1]!r}")
        return value

    def expr(self) -> CohClass:
        value = self.term()
        while True:
            tok = self.peek()
            if tok and tok[0] == "op" and tok[1] in "+-":
                self.take()
                rhs = self.term()
                value = value + rhs if tok[1] == "+" else value - rhs
            else:
                return value

    def term(self) -> CohClass:
        value = self.power()
        while True:
            tok = self.peek()
            if tok and tok[0] == "op" and tok[1] in "*/":
                self.take()
                rhs = self.power()
                if tok[1] == "*":
                    value = value * rhs
                else:
                    if rhs.den or any(m for m, _ in rhs.num):
                        raise _ExprError(tok[2], "can only divide by a constant")
                    q = rhs.as_rat()
                    if q == 0:
                        raise _ExprError(tok[2], "division by zero")
                    value = value / q
            else:
                return value

    def power(self) -> CohClass:
        value = self.atom()
        tok = self.peek()
        while tok and tok[0] == "op" and tok[1] == "^":
            self.take()
            e = self.take()
            if e[0] != "int":
                raise _ExprError(e[2], "exponent must be a literal integer")
            value = value ** int(e[1])
            tok = self.peek()
        return value

    def atom(self) -> CohClass:
        tok = self.take()
        if tok[0] == "op" and tok[1] == "-":
            return -self.power()
        if tok[0] == "op" and tok[1] == "(":
            value = self.expr()
            self.expect_op(")")
            return value
        if tok[0] == "int":
            return const(Fraction(int(tok[1])), self.spec)
        if tok[0] == "name":
            return self.named(tok)
        raise _ExprError(tok[2], f"unexpected {tok[1]!r}")

    def named(self, tok) -> CohClass:
        name = tok[1]
        if name in ("c1", "chern", "chern_total"):
            if self.action is None:
                raise _ExprError(tok[2], f"{name} needs an [action] section")
            if name == "c1":
                return _c1(self.action, self.spec)
            if name == "chern_total":
                return _chern_total(self.action, self.spec)
            self.expect_op("(")
            arg = self.take()
            if arg[0] != "int":
                raise _ExprError(arg[2], "chern() takes a literal integer")
            self.expect_op(")")
            try:
                return _chern(self.action, int(arg[1]), self.spec)
            except VgwError as err:
                raise _ExprError(tok[2], str(err))
        if name not in self.env:
            raise _ExprError(tok[2], f"unknown parameter {name!r}")
        return self.env[name]


def _linear_form(cls: CohClass, params: Dict[str, Param]) -> LinForm:
    if cls.den:
        raise VgwError("weight form must be polynomial")
    coeffs: Dict[Param, Fraction] = {}
    for mono, coeff in cls.num:
        if len(mono) != 1 or mono[0][1] != 1:
            raise VgwError("weight form must be linear in the parameters")
        coeffs[params[mono[0][0]]] = coeff
    return LinForm.make(coeffs)


# ---------------------------------------------------------------------------
# document parsing
# ---------------------------------------------------------------------------

_SECTIONS = ("action", "path", "insertion", "params", "quantum",
             "abstract", "datum", "options")

_SECTION_KEYS = {
    "action": {"rank", "params", "weight"},
    "path": {"chi_minus", "chi_plus"},
    "insertion": {"expr"},
    "params": {"param"},
    "quantum": {"degree", "window_radius", "window_base"},
    "abstract": {"residue"},
    "datum": {"label", "restriction", "num", "den", "weyl", "orbifold",
              "base", "base_normalization", "t_star", "weight_pair"},
    "options": {"sigma", "jobs", "format"},
}


@dataclass
class _Line:
    no: int
    key: str
    value: str
    col: int  # column where the value starts


def _split_sections(text: str, diag) -> List[Tuple[str, int, List[_Line]]]:
    sections: List[Tuple[str, int, List[_Line]]] = []
    current: Optional[List[_Line]] = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                diag(no, raw.index("[") + 1, "unterminated section header")
                current = None
                continue
            name = stripped[1:-1].strip()
            if name not in _SECTIONS:
                diag(no, raw.index("[") + 1, f"unknown section [{name}]")
                current = None
                continue
            current = []
            sections.append((name, no, current))
            continue
        if "=" not in line:
            diag(no, 1, "expected 'key = value'")
            continue
        key, value = line.split("=", 1)
        col = raw.index("=") + 2 + (len(value) - len(value.lstrip()))
        if current is None:
            diag(no, 1, f"entry {key.strip()!r} outside any section")
            continue
        current.append(_Line(no, key.strip(), value.strip(), col))
    return sections


def _ints(value: str) -> Tuple[int, ...]:
    return tuple(int(p) for p in value.split())


_RAT_RE = re.compile(r"^[+-]?\d+(/[1-9]\d*)?$")


def _one_rat(token: str) -> Fraction:
    """Exact rational literal; no decimal points, no exponents."""
    if not _RAT_RE.match(token):
        raise ValueError(token)
    return Fraction(token)


def _rats(value: str) -> Tuple[Fraction, ...]:
    return tuple(_one_rat(p) for p in value.split())


def parse_problem(text: str) -> ProblemDoc:
    diagnostics: List[Tuple[int, int, str]] = []

    def diag(no: int, col: int, msg: str) -> None:
        diagnostics.append((no, col, msg))

    sections = _split_sections(text, diag)
    for name, no, lines in sections:
        allowed = _SECTION_KEYS[name]
        for ln in lines:
            if ln.key not in allowed:
                diag(ln.no, 1, f"unknown key {ln.key!r} in [{name}]")

    def section(name: str):
        found = [(no, lines) for n, no, lines in sections if n == name]
        if len(found) > 1:
            diag(found[1][0], 1, f"duplicate section [{name}]")
        return found[0][1] if found else None

    def get(lines, key) -> Optional[_Line]:
        hits = [ln for ln in lines if ln.key == key]
        if len(hits) > 1:
            diag(hits[1].no, hits[1].col, f"duplicate key {key!r}")
        return hits[0] if hits else None

    # ---- [action] ----------------------------------------------------
    action: Optional[TorusAction] = None
    act_lines = section("action")
    if act_lines is not None:
        rank_ln = get(act_lines, "rank")
        rank = None
        if rank_ln is None:
            no = [s for s in sections if s[0] == "action"][0][1]
            diag(no, 1, "[action] needs a rank")
        else:
            try:
                rank = int(rank_ln.value)
            except ValueError:
                diag(rank_ln.no, rank_ln.col, f"rank must be an integer, got {rank_ln.value!r}")
        names_ln = get(act_lines, "params")
        names = tuple(names_ln.value.split()) if names_ln else ()
        weights = []
        ok = rank is not None
        for idx, ln in enumerate([l for l in act_lines if l.key == "weight"], 1):
            try:
                row = _ints(ln.value)
            except ValueError:
                diag(ln.no, ln.col, f"weight row {idx} has a non-integer entry")
                ok = False
                continue
            if rank is not None and len(row) != rank:
                diag(ln.no, ln.col,
                     f"weight row {idx} has {len(row)} entries, expected {rank}")
                ok = False
                continue
            weights.append(row)
        if ok:
            try:
                action = TorusAction(rank, tuple(weights), names)
            except VgwError as err:
                diag(rank_ln.no, rank_ln.col, str(err))

    # ---- [path] -------------------------------------------------------
    path: Optional[PolPath] = None
    path_lines = section("path")
    if path_lines is not None:
        ends = {}
        for key in ("chi_minus", "chi_plus"):
            ln = get(path_lines, key)
            if ln is None:
                no = [s for s in sections if s[0] == "path"][0][1]
                diag(no, 1, f"[path] needs {key}")
                continue
            try:
                ends[key] = _rats(ln.value)
            except (ValueError, ZeroDivisionError):
                diag(ln.no, ln.col, f"{key} must be rational numbers")
        if len(ends) == 2:
            try:
                path = PolPath(ends["chi_minus"], ends["chi_plus"])
            except VgwError as err:
                ln = get(path_lines, "chi_plus")
                diag(ln.no, ln.col, str(err))
            if (path is not None and action is not None
                    and len(path.chi_minus) != action.rank):
                ln = get(path_lines, "chi_minus")
                diag(ln.no, ln.col,
                     f"path has rank {len(path.chi_minus)}, action has rank {action.rank}")
                path = None

    # ---- [params] -----------------------------------------------------
    extra_params: List[Tuple[str, str]] = []
    par_lines = section("params")
    if par_lines is not None:
        for ln in [l for l in par_lines if l.key == "param"]:
            parts = ln.value.split()
            if len(parts) != 2 or parts[1] not in _KINDS:
                diag(ln.no, ln.col, "expected 'param = <name> xi|omega|theta'")
                continue
            extra_params.append((parts[0], parts[1]))

    def make_env(spec: NilpotentSpec) -> Tuple[Dict[str, CohClass], Dict[str, Param]]:
        params: Dict[str, Param] = {}
        if action is not None:
            for p in action.ambient_params():
                params[p.name] = p
        for name, kind in extra_params:
            params[name] = _KINDS[kind](name)
        for bname, _ in spec.bounds:
            params.setdefault(bname, omega(bname))
        env = {name: var(p, spec) for name, p in params.items()}
        return env, params

    def parse_expr(ln: _Line, spec: NilpotentSpec) -> Optional[CohClass]:
        env, _ = make_env(spec)
        try:
            return _ExprParser(ln.value, env, action, spec).parse()
        except _ExprError as err:
            diag(ln.no, ln.col + err.col, err.msg)
        except VgwError as err:
            diag(ln.no, ln.col, str(err))
        return None

    # ---- [insertion] ---------------------------------------------------
    insertion_text = ""
    insertion: Optional[CohClass] = None
    ins_lines = section("insertion")
    if ins_lines is not None:
        ln = get(ins_lines, "expr")
        if ln is None:
            no = [s for s in sections if s[0] == "insertion"][0][1]
            diag(no, 1, "[insertion] needs expr")
        else:
            insertion_text = ln.value
            insertion = parse_expr(ln, EMPTY_SPEC)
            if insertion is not None and insertion.den:
                diag(ln.no, ln.col, "insertion must be polynomial")
                insertion = None

    # ---- [quantum] ------------------------------------------------------
    degrees: List[Tuple[int, ...]] = []
    window_radius: Optional[int] = None
    window_base: Optional[Tuple[int, ...]] = None
    q_lines = section("quantum")
    if q_lines is not None:
        for ln in [l for l in q_lines if l.key == "degree"]:
            try:
                row = _ints(ln.value)
            except ValueError:
                diag(ln.no, ln.col, "degree must be integers")
                continue
            if action is not None and len(row) != action.rank:
                diag(ln.no, ln.col,
                     f"degree has {len(row)} entries, expected {action.rank}")
                continue
            degrees.append(row)
        ln = get(q_lines, "window_radius")
        if ln is not None:
            try:
                window_radius = int(ln.value)
            except ValueError:
                diag(ln.no, ln.col, "window_radius must be an integer")
        ln = get(q_lines, "window_base")
        if ln is not None:
            try:
                window_base = _ints(ln.value)
            except ValueError:
                diag(ln.no, ln.col, "window_base must be integers")
            if (window_base is not None and action is not None
                    and len(window_base) != action.rank):
                diag(ln.no, ln.col,
                     f"window_base has {len(window_base)} entries, "
                     f"expected {action.rank}")
                window_base = None

    # ---- [abstract] + [datum] blocks -------------------------------------
    residue_name = ""
    abs_lines = section("abstract")
    if abs_lines is not None:
        ln = get(abs_lines, "residue")
        if ln is None:
            no = [s for s in sections if s[0] == "abstract"][0][1]
            diag(no, 1, "[abstract] needs a residue parameter name")
        else:
            residue_name = ln.value.strip()

    data: List[FixedPointDatum] = []
    sources: List[Tuple[Tuple[str, str], ...]] = []
    for name, sec_no, lines in sections:
        if name != "datum":
            continue
        sources.append(tuple((ln.key, ln.value) for ln in lines))
        fields: Dict[str, object] = {}
        base = EMPTY_SPEC
        base_ln = get(lines, "base")
        norm_ln = get(lines, "base_normalization")
        try:
            bounds = []
            if base_ln is not None:
                for part in base_ln.value.split():
                    bname, _, bval = part.partition(":")
                    bounds.append((bname, int(bval)))
            norm = _one_rat(norm_ln.value) if norm_ln is not None else Fraction(1)
            base = NilpotentSpec(bounds=tuple(bounds), normalization=norm)
        except (ValueError, ZeroDivisionError, VgwError):
            ln = base_ln or norm_ln
            diag(ln.no, ln.col, "invalid base spec; use 'base = name:bound ...'")
            continue
        label_ln = get(lines, "label")
        fields["label"] = label_ln.value if label_ln else f"datum-{len(data) + 1}"
        restr_ln = get(lines, "restriction")
        if restr_ln is None:
            diag(sec_no, 1, "[datum] needs a restriction")
            continue
        restriction = parse_expr(restr_ln, base)
        if restriction is None:
            continue
        fields["restriction"] = restriction
        _, form_params = make_env(base)
        bad = False
        for key, attr in (("num", "num_weights"), ("den", "den_weights")):
            forms = []
            for ln in [l for l in lines if l.key == key]:
                cls = parse_expr(ln, base)
                if cls is None:
                    bad = True
                    continue
                try:
                    forms.append(_linear_form(cls, form_params))
                except VgwError as err:
                    diag(ln.no, ln.col, str(err))
                    bad = True
            fields[attr] = tuple(forms)
        for key, attr, conv, label in (
                ("weyl", "weyl_factor", _one_rat, "a rational"),
                ("orbifold", "orbifold_order", int, "an integer"),
                ("t_star", "t_star", _one_rat, "a rational")):
            ln = get(lines, key)
            if ln is not None:
                try:
                    fields[attr] = conv(ln.value)
                except (ValueError, ZeroDivisionError):
                    diag(ln.no, ln.col, f"{key} must be {label}")
                    bad = True
        ln = get(lines, "weight_pair")
        if ln is not None:
            try:
                pair = _rats(ln.value)
                if len(pair) != 2:
                    raise ValueError
                fields["weight_pair"] = (pair[0], pair[1])
            except (ValueError, ZeroDivisionError):
                diag(ln.no, ln.col, "weight_pair must be two rationals")
                bad = True
        if bad:
            continue
        fields["base"] = base
        try:
            data.append(FixedPointDatum(**fields))  # type: ignore[arg-type]
        except VgwError as err:
            diag(sec_no, 1, str(err))

    # ---- [options] -------------------------------------------------------
    sigma: Optional[Tuple[Fraction, ...]] = None
    jobs: Optional[int] = None
    fmt = ""
    opt_lines = section("options")
    if opt_lines is not None:
        ln = get(opt_lines, "sigma")
        if ln is not None:
            try:
                sigma = _rats(ln.value)
            except (ValueError, ZeroDivisionError):
                diag(ln.no, ln.col, "sigma must be rational numbers")
        ln = get(opt_lines, "jobs")
        if ln is not None:
            try:
                jobs = int(ln.value)
                if jobs < 1:
                    raise ValueError
            except ValueError:
                diag(ln.no, ln.col, "jobs must be a positive integer")
                jobs = None
        ln = get(opt_lines, "format")
        if ln is not None:
            if ln.value not in ("text", "machine"):
                diag(ln.no, ln.col, "format must be 'text' or 'machine'")
            else:
                fmt = ln.value

    if diagnostics:
        raise ProblemError(sorted(diagnostics))
    return ProblemDoc(
        action=action, path=path,
        insertion_text=insertion_text, insertion=insertion,
        extra_params=tuple(extra_params),
        degrees=tuple(degrees), window_radius=window_radius,
        window_base=window_base,
        residue_name=residue_name, data=tuple(data),
        datum_sources=tuple(sources),
        sigma=sigma, jobs=jobs, format=fmt)


def render_problem(doc: ProblemDoc) -> str:
    """Canonical text for a document; reparses to an equal ProblemDoc."""
    out: List[str] = []
    if doc.action is not None:
        out.append("[action]")
        out.append(f"rank = {doc.action.rank}")
        out.append("params = " + " ".join(doc.action.param_names))
        for w in doc.action.weights:
            out.append("weight = " + " ".join(str(x) for x in w))
    if doc.path is not None:
        out.append("[path]")
        out.append("chi_minus = " + " ".join(str(x) for x in doc.path.chi_minus))
        out.append("chi_plus = " + " ".join(str(x) for x in doc.path.chi_plus))
    if doc.insertion_text:
        out.append("[insertion]")
        out.append(f"expr = {doc.insertion_text}")
    if doc.extra_params:
        out.append("[params]")
        for name, kind in doc.extra_params:
            out.append(f"param = {name} {kind}")
    if doc.degrees or doc.window_radius is not None or doc.window_base is not None:
        out.append("[quantum]")
        for d in doc.degrees:
            out.append("degree = " + " ".join(str(x) for x in d))
        if doc.window_radius is not None:
            out.append(f"window_radius = {doc.window_radius}")
        if doc.window_base is not None:
            out.append("window_base = " + " ".join(str(x) for x in doc.window_base))
    if doc.residue_name:
        out.append("[abstract]")
        out.append(f"residue = {doc.residue_name}")
    for source in doc.datum_sources:
        out.append("[datum]")
        for key, value in source:
            out.append(f"{key} = {value}")
    if doc.sigma is not None or doc.jobs is not None or doc.format:
        out.append("[options]")
        if doc.sigma is not None:
            out.append("sigma = " + " ".join(str(x) for x in doc.sigma))
        if doc.jobs is not None:
            out.append(f"jobs = {doc.jobs}")
        if doc.format:
            out.append(f"format = {doc.format}")
    return "\n".join(out) + "\n"

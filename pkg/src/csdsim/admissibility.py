"""Exact admissibility of exponent tuples for the 2-D wave-Sobolev product estimate

    ||u v||_{H^{-s0,-b0}} <~ ||u||_{H^{s1,b1}} ||v||_{H^{s2,b2}}.

Exponents are rationals extended by one positive infinitesimal ``eps``:
``q + k*eps`` compared lexicographically. The notation ``a+`` / ``a-`` maps
to ``a + k*eps`` with ``k > 0`` / ``k < 0``; relative orderings such as
``a-- < a-`` are encoded in the size of ``k``. No floating point is used.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable

VARS = ("s0", "s1", "s2", "b0", "b1", "b2")


@total_ordering
@dataclass(frozen=True)
class ExtendedRational:
    q: Fraction = Fraction(0)
    k: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "q", Fraction(self.q))
        object.__setattr__(self, "k", Fraction(self.k))

    @classmethod
    def of(cls, x) -> "ExtendedRational":
        if isinstance(x, ExtendedRational):
            return x
        if isinstance(x, str):
            return parse_extended(x)
        if isinstance(x, float):
            raise TypeError("floats are not exact; pass a Fraction or a string")
        return cls(Fraction(x))

    def _key(self):
        return (self.q, self.k)

    def __eq__(self, other):
        try:
            other = ExtendedRational.of(other)
        except TypeError:
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __lt__(self, other):
        return self._key() < ExtendedRational.of(other)._key()

    def __add__(self, other):
        other = ExtendedRational.of(other)
        return ExtendedRational(self.q + other.q, self.k + other.k)

    __radd__ = __add__

    def __neg__(self):
        return ExtendedRational(-self.q, -self.k)

    def __sub__(self, other):
        return self + (-ExtendedRational.of(other))

    def __rsub__(self, other):
        return ExtendedRational.of(other) - self

    def __mul__(self, c):
        if isinstance(c, ExtendedRational):
            if c.k and self.k:
                raise TypeError("product of two infinitesimal parts is not representable")
            return ExtendedRational(self.q * c.q, self.q * c.k + self.k * c.q)
        if isinstance(c, float):
            raise TypeError("floats are not exact")
        c = Fraction(c)
        return ExtendedRational(self.q * c, self.k * c)

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.q or self.k)

    def sign(self) -> int:
        if self.q:
            return 1 if self.q > 0 else -1
        if self.k:
            return 1 if self.k > 0 else -1
        return 0

    def at(self, eps: float) -> float:
        """Numeric value for a concrete small eps (for spot checks only)."""
        return float(self.q) + float(self.k) * eps

    def __str__(self):
        return format_extended(self)

    def __repr__(self):
        return f"ExtendedRational({format_extended(self)!r})"


ER = ExtendedRational
ZERO = ER(0)
EPS = ER(0, 1)

_FIELD_RE = re.compile(
    r"""^\s*
    (?:(?P<p>[+-]?\d+)(?:/(?P<q>\d+))?)?
    \s*
    (?:(?P<sgn>[+-])\s*(?P<kp>\d+)?(?:/(?P<kq>\d+))?\s*(?:\*\s*)?(?:ε|eps|e))?
    \s*$""",
    re.VERBOSE,
)


def parse_extended(text: str) -> ExtendedRational:
    """Parse ``p/q``, ``p/q+kε``, ``p/q-kε`` (``eps`` or ``e`` also accepted).

    ``p`` alone is an integer; ``k`` may be omitted (unit) or be ``k1/k2``.
    """
    m = _FIELD_RE.match(text)
    if not m or (m.group("p") is None and m.group("sgn") is None):
        raise ValueError(f"cannot parse exponent {text!r}")
    q = Fraction(int(m.group("p") or 0), int(m.group("q") or 1))
    k = Fraction(0)
    if m.group("sgn"):
        k = Fraction(int(m.group("kp") or 1), int(m.group("kq") or 1))
        if m.group("sgn") == "-":
            k = -k
    return ER(q, k)


def format_extended(x: ExtendedRational) -> str:
    out = f"{x.q.numerator}/{x.q.denominator}"
    if x.k:
        mag = abs(x.k)
        mag_s = str(mag.numerator) if mag.denominator == 1 else f"{mag.numerator}/{mag.denominator}"
        out += ("+" if x.k > 0 else "-") + mag_s + "ε"
    return out


@dataclass(frozen=True)
class ExponentTuple:
    s0: ExtendedRational
    s1: ExtendedRational
    s2: ExtendedRational
    b0: ExtendedRational
    b1: ExtendedRational
    b2: ExtendedRational

    def __post_init__(self):
        for v in VARS:
            object.__setattr__(self, v, ER.of(getattr(self, v)))

    @classmethod
    def from_mapping(cls, m) -> "ExponentTuple":
        return cls(**{v: m[v] for v in VARS})

    def __getitem__(self, var):
        return getattr(self, var)

    def replace(self, **changes) -> "ExponentTuple":
        d = {v: self[v] for v in VARS}
        d.update(changes)
        return ExponentTuple(**d)


# ---------------------------------------------------------------------------
# the 18 conditions
#
# Each condition is  lhs  (>|>=)  max(rhs options), with lhs and each rhs
# option linear forms sum(c_v * v) + const. "> max(...)" holds iff it holds
# against every option.


@dataclass(frozen=True)
class LinearForm:
    coeffs: tuple  # ((var, Fraction), ...)
    const: Fraction = Fraction(0)

    def value(self, t) -> ExtendedRational:
        total = ER(self.const)
        for var, c in self.coeffs:
            total = total + t[var] * c
        return total

    def minus(self, other: "LinearForm") -> "LinearForm":
        d = dict(self.coeffs)
        for var, c in other.coeffs:
            d[var] = d.get(var, 0) - c
        return LinearForm(tuple((v, Fraction(c)) for v, c in d.items() if c), self.const - other.const)


def _lf(const=0, **coeffs) -> LinearForm:
    return LinearForm(tuple((v, Fraction(c)) for v, c in coeffs.items()), Fraction(const))


@dataclass(frozen=True)
class Condition:
    label: str
    lhs: LinearForm
    rhs: tuple  # of LinearForm
    strict: bool = True


_S = dict(s0=1, s1=1, s2=1)
_h = Fraction(1, 2)

CONDITIONS: tuple[Condition, ...] = (
    Condition("b0 + b1 + b2 > 1/2", _lf(b0=1, b1=1, b2=1), (_lf(_h),)),
    Condition("b0 + b1 > 0", _lf(b0=1, b1=1), (_lf(),)),
    Condition("b0 + b2 > 0", _lf(b0=1, b2=1), (_lf(),)),
    Condition("b1 + b2 > 0", _lf(b1=1, b2=1), (_lf(),)),
    Condition("s0 + s1 + s2 > 3/2 - (b0 + b1 + b2)", _lf(**_S), (_lf(Fraction(3, 2), b0=-1, b1=-1, b2=-1),)),
    Condition("s0 + s1 + s2 > 1 - (b0 + b1)", _lf(**_S), (_lf(1, b0=-1, b1=-1),)),
    Condition("s0 + s1 + s2 > 1 - (b0 + b2)", _lf(**_S), (_lf(1, b0=-1, b2=-1),)),
    Condition("s0 + s1 + s2 > 1 - (b1 + b2)", _lf(**_S), (_lf(1, b1=-1, b2=-1),)),
    Condition("s0 + s1 + s2 > 1/2 - b0", _lf(**_S), (_lf(_h, b0=-1),)),
    Condition("s0 + s1 + s2 > 1/2 - b1", _lf(**_S), (_lf(_h, b1=-1),)),
    Condition("s0 + s1 + s2 > 1/2 - b2", _lf(**_S), (_lf(_h, b2=-1),)),
    Condition("s0 + s1 + s2 > 3/4", _lf(**_S), (_lf(Fraction(3, 4)),)),
    Condition("(s0 + b0) + 2s1 + 2s2 > 1", _lf(s0=1, b0=1, s1=2, s2=2), (_lf(1),)),
    Condition("2s0 + (s1 + b1) + 2s2 > 1", _lf(s0=2, s1=1, b1=1, s2=2), (_lf(1),)),
    Condition("2s0 + 2s1 + (s2 + b2) > 1", _lf(s0=2, s1=2, s2=1, b2=1), (_lf(1),)),
    Condition("s1 + s2 >= max(0, -b0)", _lf(s1=1, s2=1), (_lf(), _lf(b0=-1)), strict=False),
    Condition("s0 + s2 > max(0, -b1)", _lf(s0=1, s2=1), (_lf(), _lf(b1=-1))),
    Condition("s0 + s1 > max(0, -b2)", _lf(s0=1, s1=1), (_lf(), _lf(b2=-1))),
)


@dataclass(frozen=True)
class ConditionResult:
    label: str
    lhs: ExtendedRational
    rhs: ExtendedRational
    strict: bool
    passed: bool

    @property
    def margin(self) -> ExtendedRational:
        return self.lhs - self.rhs


@dataclass(frozen=True)
class ConditionReport:
    tuple: ExponentTuple
    results: tuple

    @property
    def admissible(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def violated(self) -> list[str]:
        return [r.label for r in self.results if not r.passed]

    @property
    def binding(self) -> list[str]:
        """Conditions whose margin is infinitesimal (zero rational part)."""
        return [r.label for r in self.results if r.margin.q == 0]

    def records(self) -> list[dict]:
        return [
            {
                "condition": r.label,
                "lhs": str(r.lhs),
                "rhs": str(r.rhs),
                "margin": str(r.margin),
                "strict": r.strict,
                "passed": r.passed,
            }
            for r in self.results
        ]


def evaluate_conditions(t: ExponentTuple) -> ConditionReport:
    results = []
    for c in CONDITIONS:
        lhs = c.lhs.value(t)
        rhs = max(f.value(t) for f in c.rhs)
        passed = lhs > rhs if c.strict else lhs >= rhs
        results.append(ConditionResult(c.label, lhs, rhs, c.strict, passed))
    return ConditionReport(t, tuple(results))


def is_admissible(t: ExponentTuple) -> bool:
    return evaluate_conditions(t).admissible


# ---------------------------------------------------------------------------
# affine one-parameter families and threshold solving


@dataclass(frozen=True)
class AffineFamily:
    """Exponent tuple depending affinely on a real parameter s:
    ``field(s) = const + slope * s`` with ExtendedRational const and slope."""

    const: dict
    slope: dict

    @classmethod
    def from_fields(cls, **fields) -> "AffineFamily":
        """Each field is ``const`` or ``(const, slope)``."""
        const, slope = {}, {}
        for v in VARS:
            f = fields.get(v, 0)
            c, sl = f if isinstance(f, tuple) else (f, 0)
            const[v] = ER.of(c)
            slope[v] = ER.of(sl)
        return cls(const, slope)

    def at(self, s) -> ExponentTuple:
        s = Fraction(s)
        return ExponentTuple(**{v: self.const[v] + self.slope[v] * s for v in VARS})


@dataclass(frozen=True)
class Bound:
    value: ExtendedRational  # extended bound on s
    strict: bool
    label: str

    def closed_at_rational(self, lower: bool) -> bool:
        """Whether the rational point value.q itself satisfies the bound."""
        k = self.value.k
        inside = k < 0 if lower else k > 0
        if self.strict:
            return inside
        return inside or k == 0


@dataclass(frozen=True)
class ThresholdResult:
    empty: bool
    infimum: Fraction | None  # None: unbounded below
    infimum_attained: bool
    supremum: Fraction | None  # None: unbounded above
    supremum_attained: bool
    extended_infimum: ExtendedRational | None
    binding: tuple  # lower bounds whose rational part equals the infimum
    refined_binding: tuple  # lower bounds equal to the extended infimum


def _solve_affine(p: ExtendedRational, q: ExtendedRational, strict: bool, label: str):
    """Solution set of p + q*s > 0 (or >= 0) over rational s.

    Returns ("all"|"none", None) or ("lower"|"upper", Bound).
    """
    a, a1, c, c1 = p.q, p.k, q.q, q.k
    if c != 0:
        # -p/q to first order in eps
        val = ER(-a / c, (a * c1 - a1 * c) / (c * c))
        return ("lower" if c > 0 else "upper"), Bound(val, strict, label)
    if a != 0:
        return ("all" if a > 0 else "none"), None
    # p + q s = (a1 + c1 s) eps
    if c1 != 0:
        return ("lower" if c1 > 0 else "upper"), Bound(ER(-a1 / c1), strict, label)
    if a1 > 0 or (a1 == 0 and not strict):
        return "all", None
    return "none", None


def threshold_sweep(family: AffineFamily) -> ThresholdResult:
    """Exact admissible range of s for an affine family, solved per condition."""
    lowers, uppers = [], []
    empty = False
    for c in CONDITIONS:
        for r in c.rhs:
            form = c.lhs.minus(r)
            p = ER(form.const) + sum((family.const[v] * coef for v, coef in form.coeffs), ZERO)
            q = sum((family.slope[v] * coef for v, coef in form.coeffs), ZERO)
            kind, bound = _solve_affine(p, q, c.strict, c.label)
            if kind == "none":
                empty = True
            elif kind == "lower":
                lowers.append(bound)
            elif kind == "upper":
                uppers.append(bound)

    def rational_end(bounds, lower):
        if not bounds:
            return None, False
        pick = max if lower else min
        qv = pick(b.value.q for b in bounds)
        at = [b for b in bounds if b.value.q == qv]
        return qv, all(b.closed_at_rational(lower) for b in at)

    lo, lo_closed = rational_end(lowers, True)
    hi, hi_closed = rational_end(uppers, False)
    if lo is not None and hi is not None:
        if lo > hi or (lo == hi and not (lo_closed and hi_closed)):
            empty = True
    if empty:
        return ThresholdResult(True, None, False, None, False, None, (), ())
    ext = max((b.value for b in lowers), default=None)
    binding = tuple(dict.fromkeys(b.label for b in lowers if b.value.q == lo))
    refined = tuple(dict.fromkeys(b.label for b in lowers if b.value == ext))
    return ThresholdResult(False, lo, lo_closed, hi, hi_closed, ext, binding, refined)


def float_admissible(t_values: dict, eps: float) -> bool:
    """All conditions with eps substituted as a real number."""
    vals = {v: t_values[v].at(eps) if isinstance(t_values[v], ER) else float(t_values[v]) for v in VARS}
    for c in CONDITIONS:
        lhs = sum(float(k) * vals[v] for v, k in c.lhs.coeffs) + float(c.lhs.const)
        rhs = max(sum(float(k) * vals[v] for v, k in f.coeffs) + float(f.const) for f in c.rhs)
        if not (lhs > rhs if c.strict else lhs >= rhs):
            return False
    return True


def bisect_threshold(family: AffineFamily, result: ThresholdResult | None = None,
                     eps: float = 1e-9, tol: float = 1e-12) -> float | None:
    """Floating-point bisection for the lower edge of the admissible set.

    The bracket runs from one unit below the exact infimum to a point inside
    the exact admissible range; returns None when there is no finite edge.
    """
    result = result or threshold_sweep(family)
    if result.empty or result.infimum is None:
        return None
    lo = float(result.infimum) - 1.0
    if result.supremum is None:
        hi = float(result.infimum) + 1.0
    elif result.supremum > result.infimum:
        hi = 0.5 * float(result.infimum + result.supremum)
    else:
        return float(result.infimum)

    def ok(s):
        return float_admissible({v: family.const[v] + family.slope[v] * Fraction(s) for v in VARS}, eps)

    if ok(lo) or not ok(hi):
        raise ValueError("bisection bracket does not straddle the admissibility edge")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        lo, hi = (lo, mid) if ok(mid) else (mid, hi)
    return hi


# ---------------------------------------------------------------------------
# tuples used in the well-posedness and uniqueness arguments
#
# Unit of eps per entry: "a+" / "a-" -> k = +-1, "a--" -> k = -2 when it
# must sit below an "a-" in the same display. These are one consistent
# instantiation of each display, not a unique reading.


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    family: AffineFamily
    samples: tuple
    regime: str
    note: str = ""


def _e(q, k=0):
    return ER(Fraction(q), Fraction(k))


CORPUS: tuple[CorpusEntry, ...] = (
    CorpusEntry(
        "lwp-low-first",
        AffineFamily.from_fields(
            s0=_e("1/4", -1), b0=_e("-1/4", -1), s1=(0, 1), s2=(0, 1), b1=_e("1/2", 1), b2=_e("1/2", 1)
        ),
        (Fraction(3, 10), Fraction(1, 2), Fraction(7, 10)),
        "1/4 < s < 3/4",
        "s0 = 1/4-, b0 = -1/4-, s1 = s2 = s, b1 = b2 = 1/2 + eps",
    ),
    CorpusEntry(
        "lwp-low-second",
        AffineFamily.from_fields(
            s0=_e("3/4", 1), b0=_e("1/4", 1), s1=(0, 1), s2=(0, -1), b1=_e("1/2", 1), b2=_e("1/2", -2)
        ),
        (Fraction(3, 10), Fraction(1, 2), Fraction(7, 10)),
        "1/4 < s < 3/4",
        "s0 = 3/4+, b0 = 1/4+, s1 = s, s2 = -s, b1 = 1/2 + eps, b2 = 1/2 - 2eps",
    ),
    CorpusEntry(
        "lwp-high-first",
        AffineFamily.from_fields(
            s0=(_e(1, -1), -1), b0=_e("-1/4", -1), s1=(0, 1), s2=(0, 1), b1=_e("1/2", 1), b2=_e("1/2", 1)
        ),
        (Fraction(3, 4), Fraction(1), Fraction(2)),
        "s >= 3/4",
        "s0 = 1 - s-, b0 = -1/4-, s1 = s2 = s, b1 = b2 = 1/2 + eps",
    ),
    CorpusEntry(
        "lwp-high-second",
        AffineFamily.from_fields(
            s0=(_e(0, 1), 1), b0=_e("1/4", 1), s1=(0, 1), s2=(0, -1), b1=_e("1/2", 1), b2=_e("1/2", -2)
        ),
        (Fraction(3, 4), Fraction(1), Fraction(2)),
        "s >= 3/4",
        "s0 = s+, b0 = 1/4+, s1 = s, s2 = -s, b1 = 1/2 + eps, b2 = 1/2 - 2eps",
    ),
    # uniqueness: eps unit = (free eps)/4, so 1/4 + eps/4 -> k = 1 and
    # 1/4 + eps -> k = 4; "1/2+" and "1/2--" get their own unit steps.
    CorpusEntry(
        "uniq-first",
        AffineFamily.from_fields(
            s0=_e("1/2"), b0=_e(0), s1=_e(0), b1=_e("1/2", 1), s2=_e("1/4", 1), b2=_e("1/4", 4)
        ),
        (Fraction(0),),
        "s > 1/3",
        "s0 = 1/2, b0 = 0, s1 = 0, b1 = 1/2+, s2 = 1/4 + eps/4, b2 = 1/4 + eps",
    ),
    CorpusEntry(
        "uniq-second",
        AffineFamily.from_fields(
            s0=_e("1/2"), b0=_e(0), s1=_e("1/4", 1), b1=_e("1/4", 4), s2=_e(0), b2=_e("1/2", -1)
        ),
        (Fraction(0),),
        "s > 1/3",
        "s0 = 1/2, b0 = 0, s1 = 1/4 + eps/4, b1 = 1/4 + eps, s2 = 0, b2 = 1/2--",
    ),
)


def corpus_entry(name: str) -> CorpusEntry:
    for e in CORPUS:
        if e.name == name:
            return e
    raise KeyError(f"no corpus entry {name!r}; known: {[e.name for e in CORPUS]}")


class CorpusError(AssertionError):
    pass


@dataclass(frozen=True)
class CorpusCase:
    entry: str
    s: Fraction
    report: ConditionReport


def verify_corpus(raise_on_failure: bool = True) -> list[CorpusCase]:
    cases = [CorpusCase(e.name, s, evaluate_conditions(e.family.at(s))) for e in CORPUS for s in e.samples]
    bad = [c for c in cases if not c.report.admissible]
    if bad and raise_on_failure:
        lines = [f"{c.entry} at s={c.s}: violates {c.report.violated}" for c in bad]
        raise CorpusError("; ".join(lines))
    return cases


# ---------------------------------------------------------------------------
# tuple files: one tuple per line, six whitespace-separated fields
# s0 s1 s2 b0 b1 b2, each "p/q" or "p/q+kε". '#' starts a comment.


def parse_tuple_line(line: str) -> ExponentTuple | None:
    line = line.split("#", 1)[0].strip()
    if not line:
        return None
    fields = line.split()
    if len(fields) != 6:
        raise ValueError(f"expected 6 fields (s0 s1 s2 b0 b1 b2), got {len(fields)}: {line!r}")
    return ExponentTuple(*(parse_extended(f) for f in fields))


def read_tuples(lines: Iterable[str]) -> list[ExponentTuple]:
    out = []
    for i, line in enumerate(lines, 1):
        try:
            t = parse_tuple_line(line)
        except ValueError as exc:
            raise ValueError(f"line {i}: {exc}") from None
        if t is not None:
            out.append(t)
    return out


def format_tuple(t: ExponentTuple) -> str:
    return " ".join(format_extended(t[v]) for v in VARS)


def corpus_tuple_lines() -> list[str]:
    lines = []
    for e in CORPUS:
        for s in e.samples:
            lines.append(f"{format_tuple(e.family.at(s))}  # {e.name} s={s}")
    return lines

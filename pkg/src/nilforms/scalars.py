"""Exact scalars: Gaussian rationals and truncated (t, tbar)-polynomials.

Everything downstream is built over these two rings.  ``GaussianRational``
is the coefficient field Q(i); ``ParamScalar`` is the ring
Q(i)[t_1..t_m, tbar_1..tbar_m] truncated at a fixed total degree.  The
deformation parameters t_nu and their formal conjugates tbar_nu are
independent commuting variables; conjugation swaps them, and evaluation
at a point z substitutes t_nu -> z_nu, tbar_nu -> conj(z_nu).
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, Iterable, Tuple

from .errors import FormatError

__all__ = [
    "GaussianRational",
    "QI",
    "PolyRing",
    "ParamScalar",
    "DetRng",
    "parse_gaussian",
    "format_gaussian",
]


class GaussianRational:
    """An element a + b*i of Q(i) with exact Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    # -- ring operations -------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        other = _coerce(other)
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return GaussianRational(
            (self.re * other.re + self.im * other.im) / n,
            (self.im * other.re - self.re * other.im) / n,
        )

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def conj(self):
        return GaussianRational(self.re, -self.im)

    def norm2(self):
        """|z|^2 as an exact rational."""
        return self.re * self.re + self.im * self.im

    # -- predicates / hashing -------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.re == other and self.im == 0
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def is_real(self):
        return self.im == 0

    def __repr__(self):
        return f"QI({format_gaussian(self)})"

    def __str__(self):
        return format_gaussian(self)


def _coerce(x) -> GaussianRational:
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to GaussianRational")


def QI(re=0, im=0) -> GaussianRational:
    """Shorthand constructor."""
    return GaussianRational(re, im)


QI_ZERO = GaussianRational(0)
QI_ONE = GaussianRational(1)
QI_I = GaussianRational(0, 1)


_FRAC = r"-?\d+(?:/\d+)?"
_TERM_RE = re.compile(rf"^([+-]?)(?:({_FRAC.lstrip('-?')})\s*\*?\s*)?(i)?$")


def parse_gaussian(s: str) -> GaussianRational:
    """Parse strings like ``-1/2``, ``i``, ``2i``, ``1/2+3/4i``, ``3-i``."""
    text = s.strip().replace(" ", "")
    if not text:
        raise FormatError("empty scalar string")
    # split into signed terms at top level
    terms = re.findall(r"[+-]?[^+-]+", text)
    if "".join(terms) != text:
        raise FormatError(f"cannot parse scalar {s!r}")
    re_part = Fraction(0)
    im_part = Fraction(0)
    for term in terms:
        m = _TERM_RE.match(term)
        if not m:
            raise FormatError(f"cannot parse scalar term {term!r} in {s!r}")
        sign, mag, imag = m.groups()
        if mag is None and imag is None:
            raise FormatError(f"cannot parse scalar term {term!r} in {s!r}")
        value = Fraction(mag) if mag is not None else Fraction(1)
        if sign == "-":
            value = -value
        if imag:
            im_part += value
        else:
            re_part += value
    return GaussianRational(re_part, im_part)


def format_gaussian(z: GaussianRational) -> str:
    """Canonical emission; inverse of :func:`parse_gaussian`."""
    if not z:
        return "0"
    parts = []
    if z.re != 0:
        parts.append(str(z.re))
    if z.im != 0:
        mag = z.im
        if not parts:
            head = "" if mag > 0 else "-"
        else:
            head = "+" if mag > 0 else "-"
        mag = abs(mag)
        body = "i" if mag == 1 else f"{mag}i"
        parts.append(head + body)
    return "".join(parts)


class PolyRing:
    """Truncated polynomial ring Q(i)[t_1..t_m, tbar_1..tbar_m] / (deg > N).

    Instances are lightweight descriptors (m, N); ParamScalars carry a
    reference to their ring and refuse mixed-ring arithmetic.
    """

    __slots__ = ("m", "order")

    def __init__(self, m: int, order: int):
        if m < 0 or order < 0:
            raise ValueError("ring parameters must be non-negative")
        self.m = m
        self.order = order

    def __eq__(self, other):
        return (
            isinstance(other, PolyRing)
            and self.m == other.m
            and self.order == other.order
        )

    def __hash__(self):
        return hash((self.m, self.order))

    def __repr__(self):
        return f"PolyRing(m={self.m}, order={self.order})"

    # -- constructors -----------------------------------------------------

    def zero(self) -> "ParamScalar":
        return ParamScalar(self, {})

    def const(self, c) -> "ParamScalar":
        c = _coerce(c)
        if not c:
            return self.zero()
        return ParamScalar(self, {(0,) * (2 * self.m): c})

    def one(self) -> "ParamScalar":
        return self.const(1)

    def t(self, nu: int) -> "ParamScalar":
        """The variable t_nu, 1-based."""
        return self._var(nu - 1)

    def tbar(self, nu: int) -> "ParamScalar":
        """The variable tbar_nu, 1-based."""
        return self._var(self.m + nu - 1)

    def _var(self, slot: int) -> "ParamScalar":
        if not 0 <= slot < 2 * self.m:
            raise ValueError(f"variable index out of range for m={self.m}")
        if self.order < 1:
            return self.zero()
        exp = [0] * (2 * self.m)
        exp[slot] = 1
        return ParamScalar(self, {tuple(exp): QI_ONE})


class ParamScalar:
    """Sparse truncated polynomial; keys are exponent tuples of length 2m."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: Dict[Tuple[int, ...], GaussianRational]):
        self.ring = ring
        self.terms = terms

    # -- helpers ----------------------------------------------------------

    def _check(self, other: "ParamScalar"):
        if self.ring != other.ring:
            raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")

    @staticmethod
    def _lift(ring, x):
        if isinstance(x, ParamScalar):
            return x
        return ring.const(x)

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        other = self._lift(self.ring, other)
        self._check(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            s = out.get(k)
            s = v if s is None else s + v
            if s:
                out[k] = s
            elif k in out:
                del out[k]
        return ParamScalar(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return ParamScalar(self.ring, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(self.ring, other))

    def __rsub__(self, other):
        return self._lift(self.ring, other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            c = _coerce(other)
            if not c:
                return self.ring.zero()
            return ParamScalar(self.ring, {k: v * c for k, v in self.terms.items()})
        other = self._lift(self.ring, other)
        self._check(other)
        cap = self.ring.order
        out: Dict[Tuple[int, ...], GaussianRational] = {}
        for k1, v1 in self.terms.items():
            d1 = sum(k1)
            for k2, v2 in other.terms.items():
                if d1 + sum(k2) > cap:
                    continue
                k = tuple(a + b for a, b in zip(k1, k2))
                v = v1 * v2
                s = out.get(k)
                s = v if s is None else s + v
                if s:
                    out[k] = s
                elif k in out:
                    del out[k]
        return ParamScalar(self.ring, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = _coerce(other)  # only division by field constants
        return self * (QI_ONE / c)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            other = self.ring.const(other)
        if not isinstance(other, ParamScalar):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    # -- structure ----------------------------------------------------------

    def conj(self) -> "ParamScalar":
        """Swap t_nu <-> tbar_nu and conjugate coefficients."""
        m = self.ring.m
        out = {}
        for k, v in self.terms.items():
            out[k[m:] + k[:m]] = v.conj()
        return ParamScalar(self.ring, out)

    def eval(self, point: Iterable[GaussianRational]) -> GaussianRational:
        """Evaluate with t_nu = point[nu], tbar_nu = conj(point[nu])."""
        pt = [_coerce(z) for z in point]
        if len(pt) != self.ring.m:
            raise ValueError("evaluation point has wrong length")
        m = self.ring.m
        total = GaussianRational(0)
        for k, v in self.terms.items():
            term = v
            for nu in range(m):
                for _ in range(k[nu]):
                    term = term * pt[nu]
                for _ in range(k[m + nu]):
                    term = term * pt[nu].conj()
            total = total + term
        return total

    def constant_term(self) -> GaussianRational:
        return self.terms.get((0,) * (2 * self.ring.m), QI_ZERO)

    def min_order(self) -> int:
        """Lowest total degree among stored terms (0 for the zero scalar)."""
        if not self.terms:
            return 0
        return min(sum(k) for k in self.terms)

    def homogeneous_part(self, degree: int) -> "ParamScalar":
        return ParamScalar(
            self.ring, {k: v for k, v in self.terms.items() if sum(k) == degree}
        )

    def lift(self, ring: PolyRing) -> "ParamScalar":
        """Re-interpret in another ring; only constants may change ring."""
        if ring == self.ring:
            return self
        if self.terms and set(self.terms) != {(0,) * (2 * self.ring.m)}:
            raise ValueError("only constant scalars can move between rings")
        return ring.const(self.constant_term())

    # -- io -------------------------------------------------------------------

    def __repr__(self):
        return f"ParamScalar({format_scalar(self)})"

    def __str__(self):
        return format_scalar(self)


def format_scalar(s: ParamScalar) -> str:
    """Canonical string: sorted monomials, ``coef*t1^2*tbar3`` style terms."""
    if not s.terms:
        return "0"
    m = s.ring.m
    chunks = []
    for k in sorted(s.terms, key=lambda k: (sum(k), k)):
        v = s.terms[k]
        names = []
        for nu in range(m):
            if k[nu]:
                names.append(f"t{nu + 1}" + (f"^{k[nu]}" if k[nu] > 1 else ""))
        for nu in range(m):
            e = k[m + nu]
            if e:
                names.append(f"tbar{nu + 1}" + (f"^{e}" if e > 1 else ""))
        coeff = format_gaussian(v)
        if names:
            if coeff == "1":
                body = "*".join(names)
            elif coeff == "-1":
                body = "-" + "*".join(names)
            else:
                if v.re != 0 and v.im != 0:
                    coeff = f"({coeff})"
                body = coeff + "*" + "*".join(names)
        else:
            body = coeff
        chunks.append(body)
    out = chunks[0]
    for c in chunks[1:]:
        out += c if c.startswith("-") else "+" + c
    return out


_VAR_RE = re.compile(r"^(t|tbar)(\d+)(?:\^(\d+))?$")


def parse_scalar(text: str, ring: PolyRing) -> ParamScalar:
    """Parse the output of :func:`format_scalar` (and plain Q(i) strings)."""
    raw = text.strip().replace(" ", "")
    if not raw:
        raise FormatError("empty scalar string")
    total = ring.zero()
    # split into signed top-level terms, respecting parentheses
    terms, depth, start = [], 0, 0
    for pos, ch in enumerate(raw):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and pos > start:
            prev = raw[pos - 1]
            if prev not in "+-*^(":
                terms.append(raw[start:pos])
                start = pos
    terms.append(raw[start:])
    for term in terms:
        sign = QI_ONE
        while term and term[0] in "+-":
            if term[0] == "-":
                sign = -sign
            term = term[1:]
        coeff = QI_ONE
        mono = [0] * (2 * ring.m)
        for factor in term.split("*") if term else []:
            if not factor:
                raise FormatError(f"bad scalar term in {text!r}")
            mvar = _VAR_RE.match(factor)
            if mvar:
                kind, idx, power = mvar.groups()
                nu = int(idx)
                if not 1 <= nu <= ring.m:
                    raise FormatError(f"variable {factor!r} outside ring m={ring.m}")
                slot = nu - 1 if kind == "t" else ring.m + nu - 1
                mono[slot] += int(power) if power else 1
            else:
                if factor.startswith("(") and factor.endswith(")"):
                    factor = factor[1:-1]
                coeff = coeff * parse_gaussian(factor)
        if sum(mono) > ring.order:
            raise FormatError(f"term exceeds truncation order {ring.order}")
        piece = ParamScalar(ring, {tuple(mono): sign * coeff}) if sign * coeff else ring.zero()
        total = total + piece
    return total


class DetRng:
    """Tiny deterministic 64-bit LCG; bit-stable across platforms.

    Used wherever seeded reproducible sampling is required.
    """

    __slots__ = ("state",)

    MULT = 6364136223846793005
    INC = 1442695040888963407
    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = (seed ^ 0x9E3779B97F4A7C15) & self.MASK
        self.next_int(64)  # burn-in

    def next_int(self, bound: int) -> int:
        """Uniform-ish integer in [0, bound)."""
        self.state = (self.state * self.MULT + self.INC) & self.MASK
        return (self.state >> 17) % bound

    def rational(self, span: int = 9) -> Fraction:
        num = self.next_int(2 * span + 1) - span
        den = self.next_int(span) + 1
        return Fraction(num, den)

    def gaussian(self, span: int = 9) -> GaussianRational:
        return GaussianRational(self.rational(span), self.rational(span))

    def nonzero_gaussian(self, span: int = 9) -> GaussianRational:
        while True:
            z = self.gaussian(span)
            if z:
                return z

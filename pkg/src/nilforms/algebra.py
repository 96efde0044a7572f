"""Bigraded exterior algebra of an invariant complex structure.

The coframe is gamma^1..gamma^n (type (1,0)) and their conjugates
gammabar^1..gammabar^n (type (0,1)).  Monomials are pairs of strictly
ascending index tuples (I, J) representing
gamma^{i_1} ^ ... ^ gamma^{i_p} ^ gammabar^{j_1} ^ ... ^ gammabar^{j_q},
the canonical order being (1,0)-factors first.  Forms are sparse maps
from monomials to truncated-polynomial scalars; d is extended from the
structure equations as an odd derivation and splits as del + delbar.

Coframe symbols are indexed 0..2n-1: symbol i-1 is gamma^i, symbol
n+j-1 is gammabar^j.  Endomorphisms of the coframe span (used by the
simultaneous contraction and the Neumann inversion) are column-sparse
matrices over the scalar ring.
"""

from __future__ import annotations

from itertools import combinations
from math import comb, factorial
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import FlatnessError, IntegrabilityError, NotPerturbative
from .scalars import GaussianRational, ParamScalar, PolyRing, QI_ONE

Mono = Tuple[Tuple[int, ...], Tuple[int, ...]]

T10 = "T10"
T01 = "T01"


def merge_indices(a: Tuple[int, ...], b: Tuple[int, ...]):
    """Merge two ascending tuples; returns (sign, merged) or None on repeat."""
    if not a:
        return 1, b
    if not b:
        return 1, a
    out: List[int] = []
    sign = 1
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i] == b[j]:
            return None
        if a[i] < b[j]:
            out.append(a[i])
            i += 1
        else:
            # b[j] jumps over the remaining factors of a
            if (len(a) - i) % 2:
                sign = -sign
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return sign, tuple(out)


def wedge_mono(m1: Mono, m2: Mono):
    """Canonicalize m1 ^ m2; returns (sign, mono) or None if it vanishes."""
    i1, j1 = m1
    i2, j2 = m2
    ri = merge_indices(i1, i2)
    if ri is None:
        return None
    rj = merge_indices(j1, j2)
    if rj is None:
        return None
    sign = ri[0] * rj[0]
    # moving the (1,0)-block of m2 left past the (0,1)-block of m1
    if (len(j1) * len(i2)) % 2:
        sign = -sign
    return sign, (ri[1], rj[1])


class FormAlgebra:
    """Context object: complex dimension n plus the scalar ring."""

    __slots__ = ("n", "ring")

    def __init__(self, n: int, ring: PolyRing):
        self.n = n
        self.ring = ring

    def __eq__(self, other):
        return (
            isinstance(other, FormAlgebra)
            and self.n == other.n
            and self.ring == other.ring
        )

    def __hash__(self):
        return hash((self.n, self.ring))

    def __repr__(self):
        return f"FormAlgebra(n={self.n}, ring={self.ring})"

    # -- constructors ----------------------------------------------------

    def zero(self) -> "Form":
        return Form(self, {})

    def scalar_form(self, c) -> "Form":
        return Form(self, {((), ()): self._scalar(c)})

    def monomial(self, I: Sequence[int], J: Sequence[int], coeff=1) -> "Form":
        m = (tuple(I), tuple(J))
        for idx in m[0] + m[1]:
            if not 1 <= idx <= self.n:
                raise ValueError(f"coframe index {idx} out of range 1..{self.n}")
        if list(m[0]) != sorted(set(m[0])) or list(m[1]) != sorted(set(m[1])):
            raise ValueError("monomial indices must be strictly ascending")
        return Form(self, {m: self._scalar(coeff)})

    def gamma(self, i: int) -> "Form":
        return self.monomial((i,), ())

    def gammabar(self, j: int) -> "Form":
        return self.monomial((), (j,))

    def _scalar(self, c) -> ParamScalar:
        if isinstance(c, ParamScalar):
            if c.ring != self.ring:
                raise ValueError("scalar from a different ring")
            return c
        return self.ring.const(c)

    def basis(self, p: int, q: int) -> List[Mono]:
        ids = range(1, self.n + 1)
        return [(I, J) for I in combinations(ids, p) for J in combinations(ids, q)]

    def dim(self, p: int, q: int) -> int:
        if not (0 <= p <= self.n and 0 <= q <= self.n):
            return 0
        return comb(self.n, p) * comb(self.n, q)

    def symbol_form(self, s: int) -> "Form":
        if s < self.n:
            return self.gamma(s + 1)
        return self.gammabar(s - self.n + 1)


class Form:
    """Sparse exterior-algebra element with ParamScalar coefficients.

    Usually homogeneous of one bidegree (p, q); sums of mixed type arise
    from d and from simultaneous contraction by type-mixing operators,
    and are carried by the same container.
    """

    __slots__ = ("algebra", "coeffs")

    def __init__(self, algebra: FormAlgebra, coeffs: Dict[Mono, ParamScalar]):
        self.algebra = algebra
        self.coeffs = {m: c for m, c in coeffs.items() if c}

    # -- linear structure --------------------------------------------------

    def _check(self, other: "Form"):
        if self.algebra != other.algebra:
            raise ValueError("forms from different algebras")

    def __add__(self, other: "Form") -> "Form":
        self._check(other)
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            s = out.get(m)
            s = c if s is None else s + c
            if s:
                out[m] = s
            elif m in out:
                del out[m]
        return Form(self.algebra, out)

    def __neg__(self) -> "Form":
        return Form(self.algebra, {m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def scale(self, c) -> "Form":
        if isinstance(c, ParamScalar) and c.ring != self.algebra.ring:
            raise ValueError("scalar from a different ring")
        return Form(self.algebra, {m: v * c for m, v in self.coeffs.items()})

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return self.algebra == other.algebra and self.coeffs == other.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    # -- grading -----------------------------------------------------------

    def components(self) -> Dict[Tuple[int, int], "Form"]:
        """Split into pure-(p,q) parts."""
        out: Dict[Tuple[int, int], Dict[Mono, ParamScalar]] = {}
        for m, c in self.coeffs.items():
            out.setdefault((len(m[0]), len(m[1])), {})[m] = c
        return {pq: Form(self.algebra, d) for pq, d in out.items()}

    def component(self, p: int, q: int) -> "Form":
        return Form(
            self.algebra,
            {m: c for m, c in self.coeffs.items() if len(m[0]) == p and len(m[1]) == q},
        )

    def bidegree(self) -> Tuple[int, int]:
        degs = {(len(m[0]), len(m[1])) for m in self.coeffs}
        if len(degs) > 1:
            raise ValueError(f"form is not homogeneous: {sorted(degs)}")
        if not degs:
            raise ValueError("zero form has no bidegree")
        return degs.pop()

    def is_homogeneous(self, p: int, q: int) -> bool:
        return all(len(m[0]) == p and len(m[1]) == q for m in self.coeffs)

    # -- algebra operations --------------------------------------------------

    def wedge(self, other: "Form") -> "Form":
        self._check(other)
        out: Dict[Mono, ParamScalar] = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                r = wedge_mono(m1, m2)
                if r is None:
                    continue
                sign, m = r
                v = c1 * c2
                if not v:
                    continue
                if sign < 0:
                    v = -v
                s = out.get(m)
                s = v if s is None else s + v
                if s:
                    out[m] = s
                elif m in out:
                    del out[m]
        return Form(self.algebra, out)

    def conj(self) -> "Form":
        out: Dict[Mono, ParamScalar] = {}
        for (I, J), c in self.coeffs.items():
            v = c.conj()
            if (len(I) * len(J)) % 2:
                v = -v
            out[(J, I)] = v
        return Form(self.algebra, out)

    # -- parameter structure ---------------------------------------------------

    def homogeneous_part(self, order: int) -> "Form":
        return Form(
            self.algebra,
            {m: c.homogeneous_part(order) for m, c in self.coeffs.items()},
        )

    def max_order(self) -> int:
        top = 0
        for c in self.coeffs.values():
            for k in c.terms:
                top = max(top, sum(k))
        return top

    def eval(self, point) -> "Form":
        """Evaluate parameters; result lives in the constant ring (m=0)."""
        alg0 = FormAlgebra(self.algebra.n, PolyRing(0, 0))
        out: Dict[Mono, ParamScalar] = {}
        for m, c in self.coeffs.items():
            v = c.eval(point)
            if v:
                out[m] = alg0.ring.const(v)
        return Form(alg0, out)

    def lift(self, algebra: FormAlgebra) -> "Form":
        """Move a constant-coefficient form into another scalar ring."""
        if algebra == self.algebra:
            return self
        if algebra.n != self.algebra.n:
            raise ValueError("cannot lift between different dimensions")
        return Form(algebra, {m: c.lift(algebra.ring) for m, c in self.coeffs.items()})

    def map_coefficients(self, fn) -> "Form":
        return Form(self.algebra, {m: fn(c) for m, c in self.coeffs.items()})

    def __repr__(self):
        if not self.coeffs:
            return "Form(0)"
        bits = []
        for m in sorted(self.coeffs):
            I, J = m
            name = "".join(map(str, I)) + ("," + "".join(map(str, J)) if J else "")
            bits.append(f"({self.coeffs[m]})*g[{name}]")
        return "Form(" + " + ".join(bits) + ")"


class VectorValuedForm:
    """Form with values in T^{1,0} (valence T10) or T^{0,1} (valence T01).

    components[i] is the form attached to theta_i (resp. thetabar_i);
    the components of a well-formed object share one bidegree.
    """

    __slots__ = ("algebra", "valence", "components")

    def __init__(self, algebra: FormAlgebra, valence: str, components: Dict[int, Form]):
        if valence not in (T10, T01):
            raise ValueError("valence must be T10 or T01")
        self.algebra = algebra
        self.valence = valence
        self.components = {i: f for i, f in components.items() if f}

    def component(self, i: int) -> Form:
        return self.components.get(i, self.algebra.zero())

    def is_zero(self) -> bool:
        return not self.components

    def __bool__(self):
        return bool(self.components)

    def __add__(self, other: "VectorValuedForm") -> "VectorValuedForm":
        if self.valence != other.valence:
            raise ValueError("valence mismatch")
        out = dict(self.components)
        for i, f in other.components.items():
            out[i] = out.get(i, self.algebra.zero()) + f
        return VectorValuedForm(self.algebra, self.valence, out)

    def __neg__(self):
        return VectorValuedForm(
            self.algebra, self.valence, {i: -f for i, f in self.components.items()}
        )

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "VectorValuedForm":
        return VectorValuedForm(
            self.algebra,
            self.valence,
            {i: f.scale(c) for i, f in self.components.items()},
        )

    def conj(self) -> "VectorValuedForm":
        flip = T01 if self.valence == T10 else T10
        return VectorValuedForm(
            self.algebra, flip, {i: f.conj() for i, f in self.components.items()}
        )

    def form_bidegree(self) -> Optional[Tuple[int, int]]:
        degs = set()
        for f in self.components.values():
            degs.update((len(m[0]), len(m[1])) for m in f.coeffs)
        if len(degs) > 1:
            raise ValueError("vector-valued form has mixed component bidegrees")
        return degs.pop() if degs else None

    def homogeneous_part(self, order: int) -> "VectorValuedForm":
        return VectorValuedForm(
            self.algebra,
            self.valence,
            {i: f.homogeneous_part(order) for i, f in self.components.items()},
        )

    def eval(self, point) -> "VectorValuedForm":
        alg0 = FormAlgebra(self.algebra.n, PolyRing(0, 0))
        return VectorValuedForm(
            alg0, self.valence, {i: f.eval(point) for i, f in self.components.items()}
        )

    def __eq__(self, other):
        if not isinstance(other, VectorValuedForm):
            return NotImplemented
        return (
            self.algebra == other.algebra
            and self.valence == other.valence
            and self.components == other.components
        )

    def __repr__(self):
        kind = "theta" if self.valence == T10 else "thetabar"
        bits = [f"({f!r})(x){kind}_{i}" for i, f in sorted(self.components.items())]
        return "VVF[" + " + ".join(bits) + "]" if bits else "VVF[0]"


def interior_mono(valence: str, i: int, mono: Mono):
    """theta_i (or thetabar_i) hooked into a monomial: (sign, mono) or None."""
    I, J = mono
    if valence == T10:
        if i not in I:
            return None
        pos = I.index(i)
        sign = -1 if pos % 2 else 1
        return sign, (I[:pos] + I[pos + 1:], J)
    if i not in J:
        return None
    pos = J.index(i)
    sign = -1 if (len(I) + pos) % 2 else 1
    return sign, (I, J[:pos] + J[pos + 1:])


def contract(theta: VectorValuedForm, a: Form) -> Form:
    """iota_theta a = sum_i theta^i ^ (e_i _| a).

    For components of total degree r this is a derivation of degree
    r - 1, even when r is odd (the Beltrami case) and odd when r is
    even (the (0,2)-valued case in the extended Leibniz identity).
    """
    alg = theta.algebra
    if a.algebra != alg:
        raise ValueError("mismatched algebras")
    total = alg.zero()
    for i, comp in theta.components.items():
        hooked: Dict[Mono, ParamScalar] = {}
        for m, c in a.coeffs.items():
            r = interior_mono(theta.valence, i, m)
            if r is None:
                continue
            sign, mm = r
            v = -c if sign < 0 else c
            s = hooked.get(mm)
            s = v if s is None else s + v
            if s:
                hooked[mm] = s
            elif mm in hooked:
                del hooked[mm]
        if hooked:
            total = total + comp.wedge(Form(alg, hooked))
    return total


def contract_power(theta: VectorValuedForm, a: Form, k: int) -> Form:
    out = a
    for _ in range(k):
        if not out:
            break
        out = contract(theta, out)
    return out


def exp_contract(theta: VectorValuedForm, a: Form) -> Form:
    """e^{iota_theta} a = sum_k iota^k a / k!; finite in bounded degree.

    For 1-form components this equals the factorwise coframe
    substitution w -> w + theta(w) (exponentials of even derivations
    are algebra maps); the equality is exercised by the test suite.
    """
    total = a
    power = a
    k = 0
    guard = theta.algebra.n + theta.algebra.ring.order + 2
    while power:
        k += 1
        power = contract(theta, power)
        if power:
            total = total + power.scale(QI_ONE / factorial(k))
        if k > guard:
            raise RuntimeError("exp_contract failed to terminate")
    return total


class CoframeEndo:
    """Linear map on the 2n-dimensional coframe span, column-sparse."""

    __slots__ = ("algebra", "cols")

    def __init__(self, algebra: FormAlgebra, cols: Dict[int, Dict[int, ParamScalar]]):
        self.algebra = algebra
        self.cols = {}
        for b, col in cols.items():
            cleaned = {a: c for a, c in col.items() if c}
            if cleaned:
                self.cols[b] = cleaned

    @classmethod
    def identity(cls, algebra: FormAlgebra) -> "CoframeEndo":
        one = algebra.ring.one()
        return cls(algebra, {s: {s: one} for s in range(2 * algebra.n)})

    @classmethod
    def zero(cls, algebra: FormAlgebra) -> "CoframeEndo":
        return cls(algebra, {})

    def __add__(self, other: "CoframeEndo") -> "CoframeEndo":
        out = {b: dict(col) for b, col in self.cols.items()}
        for b, col in other.cols.items():
            tgt = out.setdefault(b, {})
            for a, c in col.items():
                s = tgt.get(a)
                tgt[a] = c if s is None else s + c
        return CoframeEndo(self.algebra, out)

    def __neg__(self):
        return CoframeEndo(
            self.algebra,
            {b: {a: -c for a, c in col.items()} for b, col in self.cols.items()},
        )

    def __sub__(self, other):
        return self + (-other)

    def compose(self, other: "CoframeEndo") -> "CoframeEndo":
        """self after other."""
        out: Dict[int, Dict[int, ParamScalar]] = {}
        for b, col in other.cols.items():
            acc: Dict[int, ParamScalar] = {}
            for mid, c in col.items():
                inner = self.cols.get(mid)
                if not inner:
                    continue
                for a, d in inner.items():
                    v = d * c
                    if not v:
                        continue
                    s = acc.get(a)
                    s = v if s is None else s + v
                    if s:
                        acc[a] = s
                    elif a in acc:
                        del acc[a]
            if acc:
                out[b] = acc
        return CoframeEndo(self.algebra, out)

    def column_form(self, symbol: int) -> Form:
        col = self.cols.get(symbol, {})
        coeffs: Dict[Mono, ParamScalar] = {}
        n = self.algebra.n
        for a, c in col.items():
            mono = ((a + 1,), ()) if a < n else ((), (a - n + 1,))
            coeffs[mono] = c
        return Form(self.algebra, coeffs)

    def conj(self) -> "CoframeEndo":
        n = self.algebra.n

        def swap(s):
            return s + n if s < n else s - n

        return CoframeEndo(
            self.algebra,
            {
                swap(b): {swap(a): c.conj() for a, c in col.items()}
                for b, col in self.cols.items()
            },
        )

    def is_zero(self) -> bool:
        return not self.cols

    def min_order(self) -> int:
        orders = [c.min_order() for col in self.cols.values() for c in col.values()]
        return min(orders) if orders else 0

    def eval_dense(self, point):
        """Evaluate at a parameter point; dense 2n x 2n Gaussian matrix."""
        n2 = 2 * self.algebra.n
        zero = GaussianRational(0)
        out = [[zero for _ in range(n2)] for _ in range(n2)]
        for b, col in self.cols.items():
            for a, c in col.items():
                out[a][b] = c.eval(point)
        return out


def endo_of_vvf(v: VectorValuedForm) -> CoframeEndo:
    """View a vector-valued form with 1-form components as a coframe map.

    A T10-valued v sends gamma^i to v^i and kills the gammabar block;
    mirrored for T01.
    """
    alg = v.algebra
    n = alg.n
    cols: Dict[int, Dict[int, ParamScalar]] = {}
    for i, f in v.components.items():
        col: Dict[int, ParamScalar] = {}
        for (I, J), c in f.coeffs.items():
            if len(I) + len(J) != 1:
                raise ValueError("endo_of_vvf needs 1-form components")
            sym = I[0] - 1 if I else n + J[0] - 1
            col[sym] = c
        src = i - 1 if v.valence == T10 else n + i - 1
        cols[src] = col
    return CoframeEndo(alg, cols)


def vvf_of_endo(e: CoframeEndo, valence: str) -> VectorValuedForm:
    """Columns of a block-supported endomorphism as a vector-valued form."""
    alg = e.algebra
    n = alg.n
    comps: Dict[int, Form] = {}
    for b in e.cols:
        if valence == T10 and b >= n:
            raise ValueError("endo has gammabar columns; not T10-supported")
        if valence == T01 and b < n:
            raise ValueError("endo has gamma columns; not T01-supported")
        i = b + 1 if valence == T10 else b - n + 1
        comps[i] = e.column_form(b)
    return VectorValuedForm(alg, valence, comps)


def simultaneous_contract(b: CoframeEndo, a: Form) -> Form:
    """Algebra homomorphism applying b to every 1-form factor."""
    alg = a.algebra
    if b.algebra != alg:
        raise ValueError("mismatched algebras")
    n = alg.n
    images: Dict[int, Form] = {}
    total = alg.zero()
    for m, c in a.coeffs.items():
        I, J = m
        symbols = [i - 1 for i in I] + [n + j - 1 for j in J]
        piece = alg.scalar_form(c)
        for s in symbols:
            if s not in images:
                images[s] = b.column_form(s)
            piece = piece.wedge(images[s])
            if not piece:
                break
        if piece:
            total = total + piece
    return total


def neumann_invert(e: CoframeEndo) -> CoframeEndo:
    """(1 - e)^{-1} = sum e^k, truncated by the ring order.

    Requires e = O(t); raises NotPerturbative if e has a constant term,
    since order-0 invertibility is asserted rather than assumed.
    """
    if not e.is_zero() and e.min_order() == 0:
        raise NotPerturbative("operator has a constant term; refusing Neumann series")
    acc = CoframeEndo.identity(e.algebra)
    power = e
    guard = e.algebra.ring.order + 1
    k = 0
    while not power.is_zero():
        acc = acc + power
        power = power.compose(e)
        k += 1
        if k > guard:
            raise RuntimeError("Neumann series failed to truncate")
    return acc


# -- structure equations and the invariant complex -----------------------


class StructureEquations:
    """A complex Lie algebra with complex structure via d of the coframe.

    d_coframe[i] is d(gamma^i), a sum of a (2,0)-part and a (1,1)-part;
    d(gammabar^i) is its conjugate.
    """

    __slots__ = ("name", "n", "algebra", "d_coframe")

    def __init__(self, name: str, algebra: FormAlgebra, d_coframe: Dict[int, Form]):
        self.name = name
        self.n = algebra.n
        self.algebra = algebra
        self.d_coframe = {
            i: d_coframe.get(i, algebra.zero()) for i in range(1, algebra.n + 1)
        }
        for f in self.d_coframe.values():
            if f.algebra != algebra:
                raise ValueError("structure form from a different algebra")

    def with_algebra(self, algebra: FormAlgebra) -> "StructureEquations":
        return StructureEquations(
            self.name, algebra, {i: f.lift(algebra) for i, f in self.d_coframe.items()}
        )

    def d_symbol(self, s: int) -> Form:
        """d of coframe symbol s (0-based; gammabar block by conjugation)."""
        n = self.n
        if s < n:
            return self.d_coframe[s + 1]
        return self.d_coframe[s - n + 1].conj()

    def _part_d(self, s: int, ds: Form) -> Form:
        return ds

    def _part_del(self, s: int, ds: Form) -> Form:
        # del raises holomorphic degree: (2,0)-part on gamma, (1,1) on gammabar
        return ds.component(2, 0) if s < self.n else ds.component(1, 1)

    def _part_delbar(self, s: int, ds: Form) -> Form:
        return ds.component(1, 1) if s < self.n else ds.component(0, 2)

    def _apply_derivation(self, a: Form, part) -> Form:
        alg = self.algebra
        out = alg.zero()
        cache: Dict[int, Form] = {}
        for m, c in a.coeffs.items():
            I, J = m
            symbols = [i - 1 for i in I] + [self.n + j - 1 for j in J]
            for pos, s in enumerate(symbols):
                if s not in cache:
                    cache[s] = part(s, self.d_symbol(s))
                ds = cache[s]
                if not ds:
                    continue
                if pos < len(I):
                    rest = (I[:pos] + I[pos + 1:], J)
                else:
                    pj = pos - len(I)
                    rest = (I, J[:pj] + J[pj + 1:])
                # d(w_r) has even degree, so it commutes to the front;
                # only the Koszul sign of skipping pos factors remains
                v = -c if pos % 2 else c
                out = out + ds.wedge(Form(alg, {rest: v}))
        return out

    def apply_d(self, a: Form) -> Form:
        return self._apply_derivation(a, self._part_d)

    def apply_del(self, a: Form) -> Form:
        return self._apply_derivation(a, self._part_del)

    def apply_delbar(self, a: Form) -> Form:
        return self._apply_derivation(a, self._part_delbar)


class InvariantComplex:
    """Bigraded complex of invariant forms with assembled matrices.

    Matrices are column-sparse over the scalar ring: matrix[(col)] is a
    dict {row: scalar} expressing the image of the col-th basis monomial
    in the target basis.  Assembly is by the signed Leibniz rule; the
    agreement between matrix action and the derivation action is part of
    the invariant test suite.
    """

    def __init__(self, se: StructureEquations):
        self.se = se
        self.algebra = se.algebra
        self.n = se.n
        self._bases: Dict[Tuple[int, int], List[Mono]] = {}
        self._index: Dict[Tuple[int, int], Dict[Mono, int]] = {}
        self._mats: Dict[Tuple[str, int, int], List[Dict[int, ParamScalar]]] = {}

    def basis(self, p: int, q: int) -> List[Mono]:
        key = (p, q)
        if key not in self._bases:
            self._bases[key] = self.algebra.basis(p, q)
            self._index[key] = {m: i for i, m in enumerate(self._bases[key])}
        return self._bases[key]

    def index(self, p: int, q: int) -> Dict[Mono, int]:
        self.basis(p, q)
        return self._index[(p, q)]

    def dim(self, p: int, q: int) -> int:
        return self.algebra.dim(p, q)

    def form_to_vec(self, a: Form, p: int, q: int) -> Dict[int, ParamScalar]:
        idx = self.index(p, q)
        out = {}
        for m, c in a.coeffs.items():
            if len(m[0]) != p or len(m[1]) != q:
                raise ValueError("form does not live in the requested bidegree")
            out[idx[m]] = c
        return out

    def vec_to_form(self, v, p: int, q: int) -> Form:
        basis = self.basis(p, q)
        alg = self.algebra
        coeffs = {}
        for i, c in v.items():
            coeffs[basis[i]] = c if isinstance(c, ParamScalar) else alg.ring.const(c)
        return Form(alg, coeffs)

    def _columns(self, op: str, p: int, q: int) -> List[Dict[int, ParamScalar]]:
        key = (op, p, q)
        if key in self._mats:
            return self._mats[key]
        apply = {"del": self.se.apply_del, "delbar": self.se.apply_delbar}[op]
        tp, tq = (p + 1, q) if op == "del" else (p, q + 1)
        tgt_index = self.index(tp, tq) if self.dim(tp, tq) else {}
        cols = []
        for m in self.basis(p, q):
            image = apply(Form(self.algebra, {m: self.algebra.ring.one()}))
            col: Dict[int, ParamScalar] = {}
            for mm, c in image.coeffs.items():
                col[tgt_index[mm]] = c
            cols.append(col)
        self._mats[key] = cols
        return cols

    def del_matrix(self, p: int, q: int) -> List[Dict[int, ParamScalar]]:
        """Columns of del: (p,q) -> (p+1,q)."""
        return self._columns("del", p, q)

    def delbar_matrix(self, p: int, q: int) -> List[Dict[int, ParamScalar]]:
        """Columns of delbar: (p,q) -> (p,q+1)."""
        return self._columns("delbar", p, q)

    # operator dispatch; equals the matrix action at each bidegree
    def apply_d(self, a: Form) -> Form:
        return self.se.apply_d(a)

    def apply_del(self, a: Form) -> Form:
        return self.se.apply_del(a)

    def apply_delbar(self, a: Form) -> Form:
        return self.se.apply_delbar(a)


def build_complex(se: StructureEquations) -> InvariantComplex:
    """Validate structure equations and wrap them in a complex.

    Checks integrability (no (0,2)-component in any d gamma^i) and
    flatness d^2 = 0.  Since d^2 is an even derivation, vanishing on the
    coframe generators implies vanishing everywhere; both the gamma and
    gammabar generators are checked.
    """
    alg = se.algebra
    for i, f in se.d_coframe.items():
        bad = f.component(0, 2)
        if bad:
            raise IntegrabilityError(
                f"d gamma^{i} has a (0,2)-component: {bad!r}"
            )
        stray = f - f.component(2, 0) - f.component(1, 1)
        if stray:
            raise IntegrabilityError(
                f"d gamma^{i} has parts outside degree 2: {stray!r}"
            )
    for s in range(2 * se.n):
        dd = se.apply_d(se.apply_d(alg.symbol_form(s)))
        if dd:
            name = f"gamma^{s + 1}" if s < se.n else f"gammabar^{s - se.n + 1}"
            raise FlatnessError(f"d^2 {name} = {dd!r} is nonzero")
    return InvariantComplex(se)

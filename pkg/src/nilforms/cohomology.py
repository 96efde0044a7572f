"""Per-bidegree linear algebra: the four cohomologies, Laplacians,
harmonic projectors, Green operators, and the canonical del-delbar solve.

Quotient-space computations (ker/im) are the normative route; harmonic
kernels are a cross-check available through HodgeContext after exact
evaluation of the deformation parameters.  Generic-t answers are taken
at two fixed rational sample points (ranks are lower-semicontinuous in
specialization), never by symbolic rank over a function field.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .algebra import Form, FormAlgebra, InvariantComplex, Mono
from .errors import NotSolvable, PreconditionFailed
from .linalg import Echelon, Rows, Vec
from .scalars import GaussianRational, QI_ONE, ParamScalar

#: numerators/denominators for the fixed generic sample points
_GENERIC_NUMS = (3, 5, 2, 7)
_GENERIC_DENS = (7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def generic_points(m: int) -> Tuple[Tuple[GaussianRational, ...], Tuple[GaussianRational, ...]]:
    """Two fixed distinct rational sample points, scaled to m parameters."""
    base = []
    for k in range(m):
        num = _GENERIC_NUMS[k % 4]
        den = _GENERIC_DENS[k % len(_GENERIC_DENS)] * (1 + k // len(_GENERIC_DENS))
        base.append(GaussianRational(Fraction(num, den)))
    first = tuple(base)
    second = tuple(GaussianRational(z.re / 2) for z in base)
    return first, second


def zero_point(m: int) -> Tuple[GaussianRational, ...]:
    return tuple(GaussianRational(0) for _ in range(m))


class EvaluatedComplex:
    """An invariant complex with parameters fixed at an exact point.

    All matrices are Gaussian-rational, rows-of-dicts; images, kernels
    and ranks are cached per bidegree since the lemma checkers reuse
    them heavily.
    """

    def __init__(self, cx: InvariantComplex, point: Sequence[GaussianRational] = ()):
        self.cx = cx
        self.n = cx.n
        self.point = tuple(point)
        if len(self.point) != cx.algebra.ring.m:
            raise ValueError("evaluation point has wrong arity for the ring")
        self._rows: Dict[Tuple[str, int, int], Rows] = {}
        self._images: Dict[Tuple[str, int, int], List[Vec]] = {}
        self._echelons: Dict[Tuple[str, int, int], Echelon] = {}
        self._kernels: Dict[Tuple[str, int, int], List[Vec]] = {}
        self._total_rank: Dict[int, int] = {}

    # -- matrices ---------------------------------------------------------

    def dim(self, p: int, q: int) -> int:
        return self.cx.dim(p, q)

    def rows(self, op: str, p: int, q: int) -> Rows:
        """Matrix of del or delbar with source (p,q), QI rows."""
        key = (op, p, q)
        if key in self._rows:
            return self._rows[key]
        tp, tq = (p + 1, q) if op == "del" else (p, q + 1)
        nrows = self.dim(tp, tq)
        out: Rows = [{} for _ in range(nrows)]
        if self.dim(p, q) and nrows:
            cols = (
                self.cx.del_matrix(p, q) if op == "del" else self.cx.delbar_matrix(p, q)
            )
            for j, col in enumerate(cols):
                for i, c in col.items():
                    v = c.eval(self.point)
                    if v:
                        out[i][j] = v
        self._rows[key] = out
        return out

    def del_rows(self, p: int, q: int) -> Rows:
        return self.rows("del", p, q)

    def delbar_rows(self, p: int, q: int) -> Rows:
        return self.rows("delbar", p, q)

    def ddbar_rows(self, p: int, q: int) -> Rows:
        """Matrix of del(delbar(.)): (p,q) -> (p+1,q+1)."""
        key = ("ddbar", p, q)
        if key not in self._rows:
            self._rows[key] = linalg.mat_mul(self.del_rows(p, q + 1), self.delbar_rows(p, q))
        return self._rows[key]

    def stacked_rows(self, p: int, q: int) -> Rows:
        """[del; delbar] with row offset, source (p,q)."""
        key = ("stacked", p, q)
        if key not in self._rows:
            up = self.del_rows(p, q)
            low = self.delbar_rows(p, q)
            shifted = [dict(r) for r in up] + [dict(r) for r in low]
            self._rows[key] = shifted
        return self._rows[key]

    # -- spans and kernels ---------------------------------------------------

    def image_vectors(self, op: str, p: int, q: int) -> List[Vec]:
        """Basis of the image of op with TARGET bidegree (p,q)."""
        key = (op, p, q)
        if key in self._images:
            return self._images[key]
        if op == "del":
            sp, sq = p - 1, q
        elif op == "delbar":
            sp, sq = p, q - 1
        else:
            sp, sq = p - 1, q - 1
        if sp < 0 or sq < 0 or not self.dim(sp, sq) or not self.dim(p, q):
            vecs: List[Vec] = []
        else:
            rows = (
                self.ddbar_rows(sp, sq)
                if op == "ddbar"
                else self.rows(op, sp, sq)
            )
            vecs = linalg.image_basis(rows, self.dim(sp, sq))
        self._images[key] = vecs
        return vecs

    def image_echelon(self, op: str, p: int, q: int) -> Echelon:
        key = (op, p, q)
        if key not in self._echelons:
            e = Echelon()
            for v in self.image_vectors(op, p, q):
                e.insert(v)
            self._echelons[key] = e
        return self._echelons[key]

    def kernel(self, op: str, p: int, q: int) -> List[Vec]:
        """Kernel at source (p,q) of del/delbar/ddbar/stacked."""
        key = (op, p, q)
        if key in self._kernels:
            return self._kernels[key]
        if op == "stacked":
            rows = self.stacked_rows(p, q)
        elif op == "ddbar":
            rows = self.ddbar_rows(p, q)
        else:
            rows = self.rows(op, p, q)
        self._kernels[key] = linalg.nullspace(rows, self.dim(p, q))
        return self._kernels[key]

    # -- total (de Rham) complex ------------------------------------------

    def total_blocks(self, k: int) -> List[Tuple[int, int]]:
        return [(p, k - p) for p in range(max(0, k - self.n), min(self.n, k) + 1)]

    def total_dim(self, k: int) -> int:
        return sum(self.dim(p, q) for p, q in self.total_blocks(k))

    def total_d_rows(self, k: int) -> Rows:
        """d: total degree k -> k+1 with block offsets."""
        key = ("total", k, 0)
        if key in self._rows:
            return self._rows[key]
        src_blocks = self.total_blocks(k)
        tgt_blocks = self.total_blocks(k + 1)
        tgt_offset = {}
        off = 0
        for pq in tgt_blocks:
            tgt_offset[pq] = off
            off += self.dim(*pq)
        rows: Rows = [{} for _ in range(off)]
        col_off = 0
        for p, q in src_blocks:
            dcols = self.dim(p, q)
            if dcols:
                if (p + 1, q) in tgt_offset:
                    ro = tgt_offset[(p + 1, q)]
                    for i, r in enumerate(self.del_rows(p, q)):
                        for j, c in r.items():
                            rows[ro + i][col_off + j] = c
                if (p, q + 1) in tgt_offset:
                    ro = tgt_offset[(p, q + 1)]
                    for i, r in enumerate(self.delbar_rows(p, q)):
                        for j, c in r.items():
                            rows[ro + i][col_off + j] = c
            col_off += dcols
        self._rows[key] = rows
        return rows

    def total_d_rank(self, k: int) -> int:
        if k not in self._total_rank:
            if k < 0 or k >= 2 * self.n:
                self._total_rank[k] = 0
            else:
                self._total_rank[k] = linalg.matrix_rank(self.total_d_rows(k))
        return self._total_rank[k]

    def embed_block(self, v: Vec, p: int, q: int, k: int) -> Vec:
        off = 0
        for bp, bq in self.total_blocks(k):
            if (bp, bq) == (p, q):
                return {off + i: c for i, c in v.items()}
            off += self.dim(bp, bq)
        raise ValueError("bidegree not in total degree")

    def block_component(self, v: Vec, p: int, q: int, k: int) -> Vec:
        off = 0
        for bp, bq in self.total_blocks(k):
            d = self.dim(bp, bq)
            if (bp, bq) == (p, q):
                return {i - off: c for i, c in v.items() if off <= i < off + d}
            off += d
        raise ValueError("bidegree not in total degree")

    # -- forms <-> vectors ---------------------------------------------------

    def form_to_vec(self, a: Form, p: int, q: int) -> Vec:
        idx = self.cx.index(p, q)
        out: Vec = {}
        m_params = a.algebra.ring.m
        for m, c in a.coeffs.items():
            if len(m[0]) != p or len(m[1]) != q:
                raise ValueError("form does not live in the requested bidegree")
            if m_params == len(self.point):
                v = c.eval(self.point)
            else:
                if set(c.terms) - {(0,) * (2 * m_params)}:
                    raise ValueError(
                        "parameter-dependent form in a complex with a different arity"
                    )
                v = c.constant_term()
            if v:
                out[idx[m]] = v
        return out

    def vec_to_form(self, v: Vec, p: int, q: int, algebra: Optional[FormAlgebra] = None) -> Form:
        alg = algebra or self.cx.algebra
        basis = self.cx.basis(p, q)
        return Form(alg, {basis[i]: alg.ring.const(c) for i, c in v.items()})


# -- dimensions ------------------------------------------------------------


def h_dolbeault(ec: EvaluatedComplex, p: int, q: int) -> int:
    ker = len(ec.kernel("delbar", p, q))
    im = ec.image_echelon("delbar", p, q).rank
    return ker - im


def h_del(ec: EvaluatedComplex, p: int, q: int) -> int:
    ker = len(ec.kernel("del", p, q))
    im = ec.image_echelon("del", p, q).rank
    return ker - im


def h_bott_chern(ec: EvaluatedComplex, p: int, q: int) -> int:
    ker = len(ec.kernel("stacked", p, q))
    im = ec.image_echelon("ddbar", p, q).rank
    return ker - im


def h_aeppli(ec: EvaluatedComplex, p: int, q: int) -> int:
    ker = len(ec.kernel("ddbar", p, q))
    both = ec.image_vectors("del", p, q) + ec.image_vectors("delbar", p, q)
    return ker - linalg.span_rank(both)


def betti(ec: EvaluatedComplex, k: int) -> int:
    dim = ec.total_dim(k)
    return dim - ec.total_d_rank(k) - ec.total_d_rank(k - 1)


def dclosed_dim(ec: EvaluatedComplex, p: int, q: int) -> int:
    """dim ker(del + delbar) on pure type (p,q)."""
    return len(ec.kernel("stacked", p, q))


def ddbar_image_dim(ec: EvaluatedComplex, p: int, q: int) -> int:
    """dim del(delbar(Lambda^{p-1,q-1})) inside (p,q)."""
    if p < 1 or q < 1:
        return 0
    return ec.image_echelon("ddbar", p, q).rank


_WHICH = {
    "dolbeault": h_dolbeault,
    "del": h_del,
    "bott_chern": h_bott_chern,
    "aeppli": h_aeppli,
}


def cohomology(
    ec: EvaluatedComplex,
    which: str,
    p: Optional[int] = None,
    q: Optional[int] = None,
    k: Optional[int] = None,
    with_basis: bool = False,
):
    """Dimension (and optionally representative forms) of a cohomology.

    which is one of dolbeault, del, bott_chern, aeppli, de_rham; the
    first four take (p, q), de_rham takes k.
    """
    if which == "de_rham":
        if k is None:
            raise ValueError("de_rham cohomology needs k")
        return (betti(ec, k), None) if with_basis else betti(ec, k)
    if p is None or q is None:
        raise ValueError(f"{which} cohomology needs (p, q)")
    fn = _WHICH[which]
    dimension = fn(ec, p, q)
    if not with_basis:
        return dimension
    reps = _representatives(ec, which, p, q)
    assert len(reps) == dimension
    return dimension, [ec.vec_to_form(v, p, q) for v in reps]


def _representatives(ec: EvaluatedComplex, which: str, p: int, q: int) -> List[Vec]:
    if which == "dolbeault":
        cycles, bdry = ec.kernel("delbar", p, q), ec.image_vectors("delbar", p, q)
    elif which == "del":
        cycles, bdry = ec.kernel("del", p, q), ec.image_vectors("del", p, q)
    elif which == "bott_chern":
        cycles, bdry = ec.kernel("stacked", p, q), ec.image_vectors("ddbar", p, q)
    elif which == "aeppli":
        cycles = ec.kernel("ddbar", p, q)
        bdry = ec.image_vectors("del", p, q) + ec.image_vectors("delbar", p, q)
    else:
        raise ValueError(which)
    e = Echelon()
    for v in bdry:
        e.insert(v)
    return [v for v in cycles if e.insert(v)]


@dataclass
class CohomologyReport:
    """Full (p,q)-table of the four cohomologies plus Betti numbers.

    Computed on invariant forms only; for the nilmanifold classes in the
    catalog this is the full cohomology by the cited background results,
    and the output is labelled as invariant either way.
    """

    n: int
    point: Tuple[GaussianRational, ...]
    h_dolbeault: List[List[int]]
    h_del: List[List[int]]
    h_bc: List[List[int]]
    h_a: List[List[int]]
    betti: List[int]

    def check_conjugation_symmetry(self) -> None:
        for p in range(self.n + 1):
            for q in range(self.n + 1):
                if self.h_bc[p][q] != self.h_bc[q][p]:
                    raise AssertionError(f"h_bc symmetry broken at {(p, q)}")
                if self.h_a[p][q] != self.h_a[q][p]:
                    raise AssertionError(f"h_a symmetry broken at {(p, q)}")
                if self.h_dolbeault[p][q] != self.h_del[q][p]:
                    raise AssertionError(f"Dolbeault/del symmetry broken at {(p, q)}")

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "t": [str(z) for z in self.point],
            "h_bc": self.h_bc,
            "h_a": self.h_a,
            "h_dolbeault": self.h_dolbeault,
            "betti": self.betti,
        }


def full_report(ec: EvaluatedComplex) -> CohomologyReport:
    n = ec.n
    size = n + 1
    tables = {name: [[0] * size for _ in range(size)] for name in _WHICH}
    for p in range(size):
        for q in range(size):
            for name, fn in _WHICH.items():
                tables[name][p][q] = fn(ec, p, q)
    report = CohomologyReport(
        n=n,
        point=ec.point,
        h_dolbeault=tables["dolbeault"],
        h_del=tables["del"],
        h_bc=tables["bott_chern"],
        h_a=tables["aeppli"],
        betti=[betti(ec, k) for k in range(2 * n + 1)],
    )
    report.check_conjugation_symmetry()
    return report


# -- Hodge theory ---------------------------------------------------------


class HodgeContext:
    """Adjoints, the two fourth-order Laplacians, harmonic projectors and
    Green operators in the inner product declaring the monomial basis
    orthonormal (the invariant metric sum gamma^i (x) gammabar^i).

    Green operators come from exact solves: G = (box + H)^{-1} (1 - H),
    which is the unique operator with box G = 1 - H, G H = H G = 0.
    """

    def __init__(self, ec: EvaluatedComplex):
        self.ec = ec
        self._cache: Dict[Tuple[str, int, int], Rows] = {}

    # adjoints with the stated SOURCE bidegree
    def delstar_rows(self, p: int, q: int) -> Rows:
        """del*: (p,q) -> (p-1,q)."""
        key = ("delstar", p, q)
        if key not in self._cache:
            if p < 1:
                self._cache[key] = linalg.zero_rows(0)
            else:
                self._cache[key] = linalg.conj_transpose(
                    self.ec.del_rows(p - 1, q), self.ec.dim(p - 1, q)
                )
        return self._cache[key]

    def delbarstar_rows(self, p: int, q: int) -> Rows:
        """delbar*: (p,q) -> (p,q-1)."""
        key = ("delbarstar", p, q)
        if key not in self._cache:
            if q < 1:
                self._cache[key] = linalg.zero_rows(0)
            else:
                self._cache[key] = linalg.conj_transpose(
                    self.ec.delbar_rows(p, q - 1), self.ec.dim(p, q - 1)
                )
        return self._cache[key]

    def _compose(self, chain) -> Rows:
        """Compose a chain [(op, p, q), ...] applied right-to-left."""
        ec = self.ec
        rows = None
        for op, p, q in reversed(chain):
            if p < 0 or q < 0 or p > ec.n or q > ec.n:
                return None
            if op == "del":
                step = ec.del_rows(p, q) if ec.dim(p + 1, q) else None
            elif op == "delbar":
                step = ec.delbar_rows(p, q) if ec.dim(p, q + 1) else None
            elif op == "delstar":
                step = self.delstar_rows(p, q) if p >= 1 else None
            else:
                step = self.delbarstar_rows(p, q) if q >= 1 else None
            if step is None:
                return None
            rows = step if rows is None else linalg.mat_mul(step, rows)
        return rows

    def _zero_square(self, p, q) -> Rows:
        return linalg.zero_rows(self.ec.dim(p, q))

    def lap_bc_rows(self, p: int, q: int) -> Rows:
        """The six-term fourth-order operator with vanishing kernel on
        exact classes: dd~ (dd~)* + (dd~)* dd~ + crossed terms + lower."""
        key = ("lapbc", p, q)
        if key in self._cache:
            return self._cache[key]
        terms = [
            [("del", p - 1, q), ("delbar", p - 1, q - 1), ("delbarstar", p - 1, q), ("delstar", p, q)],
            [("delbarstar", p, q + 1), ("delstar", p + 1, q + 1), ("del", p, q + 1), ("delbar", p, q)],
            [("delbarstar", p, q + 1), ("del", p - 1, q + 1), ("delstar", p, q + 1), ("delbar", p, q)],
            [("delstar", p + 1, q), ("delbar", p + 1, q - 1), ("delbarstar", p + 1, q), ("del", p, q)],
            [("delbarstar", p, q + 1), ("delbar", p, q)],
            [("delstar", p + 1, q), ("del", p, q)],
        ]
        total = self._zero_square(p, q)
        for chain in terms:
            rows = self._compose(chain)
            if rows is not None:
                total = linalg.mat_add(total, rows)
        self._cache[key] = total
        return total

    def lap_a_rows(self, p: int, q: int) -> Rows:
        key = ("lapa", p, q)
        if key in self._cache:
            return self._cache[key]
        terms = [
            [("delstar", p + 1, q), ("delbarstar", p + 1, q + 1), ("delbar", p + 1, q), ("del", p, q)],
            [("delbar", p, q - 1), ("del", p - 1, q - 1), ("delstar", p, q - 1), ("delbarstar", p, q)],
            [("delbar", p, q - 1), ("delstar", p + 1, q - 1), ("del", p, q - 1), ("delbarstar", p, q)],
            [("del", p - 1, q), ("delbarstar", p - 1, q + 1), ("delbar", p - 1, q), ("delstar", p, q)],
            [("delbar", p, q - 1), ("delbarstar", p, q)],
            [("del", p - 1, q), ("delstar", p, q)],
        ]
        total = self._zero_square(p, q)
        for chain in terms:
            rows = self._compose(chain)
            if rows is not None:
                total = linalg.mat_add(total, rows)
        self._cache[key] = total
        return total

    # -- harmonic projector and Green operator --------------------------

    def _harmonic_green(self, which: str, p: int, q: int) -> Tuple[Rows, Rows]:
        """(H, G) for box_BC or box_A at (p,q)."""
        key = (f"hg-{which}", p, q)
        if key in self._cache:
            return self._cache[key]
        lap = self.lap_bc_rows(p, q) if which == "bc" else self.lap_a_rows(p, q)
        dim = self.ec.dim(p, q)
        kernel = linalg.nullspace(lap, dim)
        if kernel:
            kmat = linalg.rows_from_columns(kernel, dim)  # dim x r
            kstar = linalg.conj_transpose(kmat, len(kernel))
            gram = linalg.mat_mul(kstar, kmat)
            gram_inv = linalg.dense_inverse(linalg.rows_to_dense(gram, len(kernel)))
            h = linalg.mat_mul(kmat, linalg.mat_mul(linalg.dense_to_rows(gram_inv), kstar))
            h = [dict(r) for r in h] + [{} for _ in range(dim - len(h))]
        else:
            h = linalg.zero_rows(dim)
        shifted = linalg.mat_add(lap, h)
        inv = linalg.dense_inverse(linalg.rows_to_dense(shifted, dim))
        if inv is None:
            raise AssertionError("box + H must be invertible")
        one_minus_h = linalg.mat_add(
            linalg.identity_rows(dim), linalg.mat_scale(h, GaussianRational(-1))
        )
        g = linalg.mat_mul(linalg.dense_to_rows(inv), one_minus_h)
        self._cache[key] = (h, g)
        return self._cache[key]

    def harmonic_bc_rows(self, p, q):
        return self._harmonic_green("bc", p, q)[0]

    def green_bc_rows(self, p, q):
        return self._harmonic_green("bc", p, q)[1]

    def harmonic_a_rows(self, p, q):
        return self._harmonic_green("a", p, q)[0]

    def green_a_rows(self, p, q):
        return self._harmonic_green("a", p, q)[1]

    def ddbar_star_rows(self, p: int, q: int) -> Rows:
        """(del delbar)*: (p,q) -> (p-1,q-1)."""
        key = ("ddbarstar", p, q)
        if key not in self._cache:
            self._cache[key] = linalg.conj_transpose(
                self.ec.ddbar_rows(p - 1, q - 1), self.ec.dim(p - 1, q - 1)
            )
        return self._cache[key]

    def canonical_solver_rows(self, p: int, q: int) -> Rows:
        """(del delbar)* G_BC at (p,q): the minimal-norm preimage map."""
        key = ("canon", p, q)
        if key not in self._cache:
            self._cache[key] = linalg.mat_mul(
                self.ddbar_star_rows(p, q), self.green_bc_rows(p, q)
            )
        return self._cache[key]


def build_hodge(cx_or_ec, point: Sequence[GaussianRational] = ()) -> HodgeContext:
    """HodgeContext for an invariant complex at an exact parameter point."""
    if isinstance(cx_or_ec, EvaluatedComplex):
        return HodgeContext(cx_or_ec)
    return HodgeContext(EvaluatedComplex(cx_or_ec, point))


def canonical_ddbar_solution(hc: HodgeContext, y: Form) -> Form:
    """The minimal-norm x with del delbar x = y, namely (del delbar)* G_BC y.

    Raises NotSolvable when y is not in the image of del delbar.
    """
    ec = hc.ec
    if not y:
        return ec.cx.algebra.zero()
    p, q = y.bidegree()
    yv = ec.form_to_vec(y, p, q)
    if p < 1 or q < 1 or not ec.image_echelon("ddbar", p, q).contains(yv):
        raise NotSolvable(f"right-hand side is not del-delbar-exact at {(p, q)}")
    xv = linalg.mat_vec(hc.canonical_solver_rows(p, q), yv)
    return ec.vec_to_form(xv, p - 1, q - 1)


def solve_conjugate_system(hc: HodgeContext, zeta: Form, xi: Form, p: int, q: int) -> Form:
    """Canonical x in (p,q) with del x = delbar zeta and delbar x = del conj(xi).

    zeta is a (p+1,q-1)-form, xi a (q+1,p-1)-form; requires
    del delbar zeta = 0, delbar del conj(xi) = 0 and the (p,q+1)- and
    (q,p+1)-th mild lemmata on the complex (checked, PreconditionFailed
    names whichever hypothesis broke).
    """
    from .lemmata import mild  # local import to avoid an import cycle

    ec = hc.ec
    se = ec.cx.se
    alg = se.algebra
    zeta = zeta if zeta else alg.zero()
    xi = xi if xi else alg.zero()
    if zeta and not zeta.is_homogeneous(p + 1, q - 1):
        raise ValueError("zeta must be a (p+1,q-1)-form")
    if xi and not xi.is_homogeneous(q + 1, p - 1):
        raise ValueError("xi must be a (q+1,p-1)-form")
    xibar = xi.conj()
    if se.apply_del(se.apply_delbar(zeta)):
        raise PreconditionFailed("del delbar zeta != 0")
    if se.apply_delbar(se.apply_del(xibar)):
        raise PreconditionFailed("delbar del conj(xi) != 0")
    for (mp, mq) in ((p, q + 1), (q, p + 1)):
        ok, _ = mild(ec, mp, mq)
        if not ok:
            raise PreconditionFailed(f"the ({mp},{mq})-th mild lemma fails on this complex")
    x = alg.zero()
    dbz = se.apply_delbar(zeta)
    if dbz:
        yv = ec.form_to_vec(dbz, p + 1, q)
        if not ec.image_echelon("ddbar", p + 1, q).contains(yv):
            raise NotSolvable("delbar zeta escaped the del-delbar image")
        pre = linalg.mat_vec(hc.canonical_solver_rows(p + 1, q), yv)
        x = x + se.apply_delbar(ec.vec_to_form(pre, p, q - 1, alg))
    dxb = se.apply_del(xibar)
    if dxb:
        yv = ec.form_to_vec(dxb, p, q + 1)
        if not ec.image_echelon("ddbar", p, q + 1).contains(yv):
            raise NotSolvable("del conj(xi) escaped the del-delbar image")
        pre = linalg.mat_vec(hc.canonical_solver_rows(p, q + 1), yv)
        x = x - se.apply_del(ec.vec_to_form(pre, p - 1, q, alg))
    return x

"""Exact sparse linear algebra over Q(i) (and plain Q after realification).

Vectors are dicts {index: scalar}; matrices are lists of row dicts.  All
routines work for any scalar type supporting +, -, *, / and truthiness,
so the same elimination drives Gaussian-rational and realified-rational
computations.  No floating point anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .scalars import GaussianRational, QI_ONE

Vec = Dict[int, object]
Rows = List[Vec]


def vec_add(u: Vec, v: Vec) -> Vec:
    out = dict(u)
    for k, x in v.items():
        s = out.get(k)
        s = x if s is None else s + x
        if s:
            out[k] = s
        elif k in out:
            del out[k]
    return out


def vec_scale(v: Vec, c) -> Vec:
    if not c:
        return {}
    return {k: c * x for k, x in v.items()}


def vec_sub_scaled(u: Vec, c, v: Vec) -> Vec:
    """u - c*v."""
    out = dict(u)
    for k, x in v.items():
        s = out.get(k)
        d = -c * x if s is None else s - c * x
        if d:
            out[k] = d
        elif k in out:
            del out[k]
    return out


class Echelon:
    """Incremental reduced row echelon over an exact field.

    Stored rows are fully inter-reduced: each has coefficient 1 at its
    pivot index and 0 at every other pivot index.  With track=True the
    expression of each stored row over the inserted vectors is kept, so
    membership queries can return explicit combinations.
    """

    def __init__(self, track: bool = False, one=QI_ONE):
        self.pivots: Dict[int, Vec] = {}
        self.track = track
        self.one = one
        self.combos: Dict[int, Vec] = {}
        self._count = 0

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, v: Vec, combo: Optional[Vec] = None) -> Tuple[Vec, Optional[Vec]]:
        w = dict(v)
        c = dict(combo) if combo is not None else None
        for p in [k for k in w if k in self.pivots]:
            coeff = w.get(p)
            if not coeff:
                continue
            w = vec_sub_scaled(w, coeff, self.pivots[p])
            if c is not None:
                c = vec_sub_scaled(c, coeff, self.combos[p])
        return w, c

    def insert(self, v: Vec) -> bool:
        """Add a vector to the span; True if it enlarged the span."""
        combo = {self._count: self.one} if self.track else None
        self._count += 1
        w, c = self.reduce(v, combo)
        if not w:
            return False
        piv = min(w)
        inv = 1 / w[piv]
        w = vec_scale(w, inv)
        if c is not None:
            c = vec_scale(c, inv)
        for p in list(self.pivots):
            row = self.pivots[p]
            coeff = row.get(piv)
            if coeff:
                self.pivots[p] = vec_sub_scaled(row, coeff, w)
                if self.track:
                    self.combos[p] = vec_sub_scaled(self.combos[p], coeff, c)
        self.pivots[piv] = w
        if self.track:
            self.combos[piv] = c
        return True

    def contains(self, v: Vec) -> bool:
        w, _ = self.reduce(v)
        return not w

    def solve_combo(self, v: Vec) -> Optional[Vec]:
        """Coefficients over inserted vectors reproducing v, or None."""
        if not self.track:
            raise ValueError("echelon built without tracking")
        w, c = self.reduce(v, {})
        if w:
            return None
        return {k: -x for k, x in c.items()}


def span_rank(vectors: Sequence[Vec]) -> int:
    e = Echelon()
    for v in vectors:
        e.insert(v)
    return e.rank


def span_basis(vectors: Sequence[Vec]) -> List[Vec]:
    e = Echelon()
    out = []
    for v in vectors:
        if e.insert(v):
            out.append(v)
    return out


def span_contains_all(span: Sequence[Vec], candidates: Sequence[Vec]):
    """Index of the first candidate outside the span, or None."""
    e = Echelon()
    for v in span:
        e.insert(v)
    for i, v in enumerate(candidates):
        if not e.contains(v):
            return i
    return None


def matrix_rank(rows: Rows) -> int:
    return span_rank(rows)


def nullspace(rows: Rows, ncols: int, one=QI_ONE) -> List[Vec]:
    """Basis of {x : M x = 0} from the RREF of the rows of M."""
    e = Echelon()
    for r in rows:
        e.insert(r)
    pivot_cols = set(e.pivots)
    basis = []
    for f in range(ncols):
        if f in pivot_cols:
            continue
        x: Vec = {f: one}
        for p, row in e.pivots.items():
            c = row.get(f)
            if c:
                x[p] = -c * one
        basis.append(x)
    return basis


def mat_vec(rows: Rows, x: Vec) -> Vec:
    out: Vec = {}
    for i, r in enumerate(rows):
        s = None
        for k, c in r.items():
            xk = x.get(k)
            if xk:
                s = c * xk if s is None else s + c * xk
        if s:
            out[i] = s
    return out


def mat_mul(a: Rows, b: Rows) -> Rows:
    """(a @ b) where a is p x q rows and b is q x r rows."""
    out: Rows = []
    for ra in a:
        acc: Vec = {}
        for k, c in ra.items():
            if k >= len(b):
                continue
            for j, d in b[k].items():
                s = acc.get(j)
                s = c * d if s is None else s + c * d
                if s:
                    acc[j] = s
                elif j in acc:
                    del acc[j]
        out.append(acc)
    return out


def mat_add(a: Rows, b: Rows) -> Rows:
    return [vec_add(ra, rb) for ra, rb in zip(a, b)]


def mat_scale(a: Rows, c) -> Rows:
    return [vec_scale(r, c) for r in a]


def conj_transpose(rows: Rows, ncols: int) -> Rows:
    out: Rows = [{} for _ in range(ncols)]
    for i, r in enumerate(rows):
        for j, c in r.items():
            out[j][i] = c.conj() if isinstance(c, GaussianRational) else c
    return out


def identity_rows(n: int, one=QI_ONE) -> Rows:
    return [{i: one} for i in range(n)]


def zero_rows(n: int) -> Rows:
    return [{} for _ in range(n)]


def stack_rows(upper: Rows, lower: Rows) -> Rows:
    return [dict(r) for r in upper] + [dict(r) for r in lower]


def columns_of(rows: Rows, ncols: int) -> List[Vec]:
    cols: List[Vec] = [{} for _ in range(ncols)]
    for i, r in enumerate(rows):
        for j, c in r.items():
            cols[j][i] = c
    return cols


def rows_from_columns(cols: Sequence[Vec], nrows: int) -> Rows:
    out: Rows = [{} for _ in range(nrows)]
    for j, col in enumerate(cols):
        for i, c in col.items():
            out[i][j] = c
    return out


def image_basis(rows: Rows, ncols: int) -> List[Vec]:
    """Basis of the column space (image) of M."""
    return span_basis(columns_of(rows, ncols))


def span_intersection(a_vecs: Sequence[Vec], b_vecs: Sequence[Vec]) -> List[Vec]:
    """Basis of span(a) intersected with span(b)."""
    if not a_vecs or not b_vecs:
        return []
    cols = list(a_vecs) + [vec_scale(v, -1) for v in b_vecs]
    idx = set()
    for v in cols:
        idx.update(v)
    nrows = (max(idx) + 1) if idx else 0
    rows = rows_from_columns(cols, nrows)
    rels = nullspace(rows, len(cols))
    na = len(a_vecs)
    out = []
    e = Echelon()
    for rel in rels:
        v: Vec = {}
        for k, c in rel.items():
            if k < na:
                v = vec_add(v, vec_scale(a_vecs[k], c))
        if v and e.insert(v):
            out.append(v)
    return out


def solve_dense(a: List[List[object]], b: List[List[object]]):
    """Solve A X = B for dense square A; returns X or None if singular."""
    n = len(a)
    m = len(b[0]) if b else 0
    aug = [list(a[i]) + list(b[i]) for i in range(n)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if aug[r][col]:
                piv = r
                break
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:n + m] for row in aug]


def dense_inverse(a: List[List[object]]):
    n = len(a)
    zero = GaussianRational(0)
    one = QI_ONE
    if n and not isinstance(a[0][0], GaussianRational):
        zero, one = Fraction(0), Fraction(1)
    eye = [[one if i == j else zero for j in range(n)] for i in range(n)]
    return solve_dense(a, eye)


def rows_to_dense(rows: Rows, ncols: int, zero=None) -> List[List[object]]:
    zero = zero if zero is not None else GaussianRational(0)
    return [[r.get(j, zero) for j in range(ncols)] for r in rows]


def dense_to_rows(dense: List[List[object]]) -> Rows:
    return [{j: x for j, x in enumerate(row) if x} for row in dense]


# -- Hermitian positivity ------------------------------------------------


def hermitian_pivots(a: List[List[GaussianRational]]):
    """LDL* pivots of a Hermitian matrix, stopping at the first pivot <= 0.

    Returns (pivots, witness, fail_index): pivots is the list of real
    diagonal entries produced so far; on failure, witness is an exact
    vector w with w* A w = pivots[-1] <= 0, else witness is None.  The
    leading principal k-minor equals the product of the first k pivots.
    """
    n = len(a)
    work = [[a[i][j] for j in range(n)] for i in range(n)]
    l_cols: List[Dict[int, GaussianRational]] = []
    pivots: List[Fraction] = []
    for k in range(n):
        d = work[k][k]
        if d.im != 0:
            raise ValueError("matrix is not Hermitian (complex diagonal)")
        pivots.append(d.re)
        if d.re <= 0:
            w = _ldl_witness(l_cols, k)
            return pivots, w, k
        col = {}
        for i in range(k + 1, n):
            if work[i][k]:
                col[i] = work[i][k] / d
        l_cols.append(col)
        for i in range(k + 1, n):
            lik = col.get(i)
            if not lik:
                continue
            for j in range(k + 1, n):
                ljk = col.get(j)
                if ljk:
                    work[i][j] = work[i][j] - lik * d * ljk.conj()
    return pivots, None, None


def _ldl_witness(l_cols, k):
    """Solve L* w = e_k for the partial unit lower-triangular L."""
    w = {k: QI_ONE}
    for j in range(k - 1, -1, -1):
        s = GaussianRational(0)
        for i, lij in l_cols[j].items():
            wi = w.get(i)
            if wi:
                s = s + lij.conj() * wi
        if s:
            w[j] = -s
    return w


def is_positive_definite(a: List[List[GaussianRational]]):
    """(verdict, witness, fail_index) for a Hermitian matrix, exactly."""
    pivots, witness, fail = hermitian_pivots(a)
    return fail is None, witness, fail


# -- realification (for conditions quantified over real forms) ----------


def realify_vec(v: Vec) -> Vec:
    """Complex vector over Q(i) -> rational vector on a doubled index set.

    Index 2k holds the real part of coordinate k, index 2k+1 the
    imaginary part.
    """
    out: Vec = {}
    for k, z in v.items():
        if z.re:
            out[2 * k] = z.re
        if z.im:
            out[2 * k + 1] = z.im
    return out


def realify_span(vectors: Sequence[Vec]) -> List[Vec]:
    """Real span of a complex span: each vector contributes v and i*v."""
    out = []
    i = GaussianRational(0, 1)
    for v in vectors:
        out.append(realify_vec(v))
        out.append(realify_vec({k: z * i for k, z in v.items()}))
    return out


def norm2_vec(v: Vec) -> Fraction:
    total = Fraction(0)
    for z in v.values():
        total += z.norm2() if isinstance(z, GaussianRational) else z * z
    return total

"""Dense exact matrices over Z and Q, with HNF, SNF, and echelon forms.

Matrices are immutable values; every operation returns a fresh matrix.
Conventions:

* HNF is a *column* form.  Each nonzero column's pivot is its last nonzero
  entry; pivot rows increase strictly left to right; pivots are positive;
  entries in a pivot row to the right of the pivot lie in [0, pivot);
  zero columns trail.  Full-rank square matrices come out upper triangular.
* SNF is diag(d1, d2, ...) with nonnegative d1 | d2 | ... and unimodular
  transforms on both sides.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, List, Sequence, Tuple


def _freeze(rows: Iterable[Iterable]) -> Tuple[Tuple, ...]:
    return tuple(tuple(row) for row in rows)


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    data: Tuple[Tuple[int, ...], ...]

    @staticmethod
    def from_rows(rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        data = _freeze([[int(x) for x in row] for row in rows])
        r = len(data)
        c = len(data[0]) if r else (cols or 0)
        if any(len(row) != c for row in data):
            raise ValueError("ragged rows")
        return IntMatrix(r, c, data)

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix(n, n, _freeze([[1 if i == j else 0 for j in range(n)] for i in range(n)]))

    @staticmethod
    def zeros(r: int, c: int) -> "IntMatrix":
        return IntMatrix(r, c, _freeze([[0] * c for _ in range(r)]))

    def __getitem__(self, ij: Tuple[int, int]) -> int:
        return self.data[ij[0]][ij[1]]

    def column(self, j: int) -> Tuple[int, ...]:
        return tuple(self.data[i][j] for i in range(self.rows))

    def columns(self) -> List[Tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    @staticmethod
    def from_columns(cols: Sequence[Sequence[int]], rows: int | None = None) -> "IntMatrix":
        if not cols:
            return IntMatrix(rows or 0, 0, _freeze([[] for _ in range(rows or 0)]))
        r = len(cols[0])
        return IntMatrix(r, len(cols), _freeze([[int(col[i]) for col in cols] for i in range(r)]))

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, _freeze(zip(*self.data)) if self.rows else
                         _freeze([[] for _ in range(self.cols)]))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        od = other.data
        out = [
            [sum(a * od[t][j] for t, a in enumerate(row)) for j in range(other.cols)]
            for row in self.data
        ]
        return IntMatrix(self.rows, other.cols, _freeze(out))

    def mul_vec(self, v: Sequence[int]) -> Tuple[int, ...]:
        return tuple(sum(a * x for a, x in zip(row, v)) for row in self.data)

    def to_rational(self) -> "RatMatrix":
        return RatMatrix(self.rows, self.cols,
                         _freeze([[Fraction(x) for x in row] for row in self.data]))

    def det(self) -> int:
        """Exact determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = [list(row) for row in self.data]
        sign = 1
        prev = 1
        for t in range(n - 1):
            if a[t][t] == 0:
                for i in range(t + 1, n):
                    if a[i][t] != 0:
                        a[t], a[i] = a[i], a[t]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(t + 1, n):
                for j in range(t + 1, n):
                    a[i][j] = (a[i][j] * a[t][t] - a[i][t] * a[t][j]) // prev
                a[i][t] = 0
            prev = a[t][t]
        return sign * a[n - 1][n - 1]

    def is_unimodular(self) -> bool:
        return self.rows == self.cols and abs(self.det()) == 1

    def inverse_unimodular(self) -> "IntMatrix":
        """Exact inverse of a unimodular matrix (integer entries)."""
        inv = self.to_rational().inverse()
        return IntMatrix(self.rows, self.cols,
                         _freeze([[_as_int(x) for x in row] for row in inv.data]))


def _as_int(x: Fraction) -> int:
    if x.denominator != 1:
        raise ValueError(f"{x} is not an integer")
    return x.numerator


@dataclass(frozen=True)
class RatMatrix:
    rows: int
    cols: int
    data: Tuple[Tuple[Fraction, ...], ...]

    @staticmethod
    def from_rows(rows: Sequence[Sequence]) -> "RatMatrix":
        data = _freeze([[Fraction(x) for x in row] for row in rows])
        r = len(data)
        c = len(data[0]) if r else 0
        if any(len(row) != c for row in data):
            raise ValueError("ragged rows")
        return RatMatrix(r, c, data)

    @staticmethod
    def identity(n: int) -> "RatMatrix":
        return IntMatrix.identity(n).to_rational()

    @staticmethod
    def zeros(r: int, c: int) -> "RatMatrix":
        return RatMatrix(r, c, _freeze([[Fraction(0)] * c for _ in range(r)]))

    def __getitem__(self, ij: Tuple[int, int]) -> Fraction:
        return self.data[ij[0]][ij[1]]

    def column(self, j: int) -> Tuple[Fraction, ...]:
        return tuple(self.data[i][j] for i in range(self.rows))

    def columns(self) -> List[Tuple[Fraction, ...]]:
        return [self.column(j) for j in range(self.cols)]

    @staticmethod
    def from_columns(cols: Sequence[Sequence], rows: int | None = None) -> "RatMatrix":
        if not cols:
            return RatMatrix(rows or 0, 0, _freeze([[] for _ in range(rows or 0)]))
        r = len(cols[0])
        return RatMatrix(r, len(cols),
                         _freeze([[Fraction(col[i]) for col in cols] for i in range(r)]))

    def transpose(self) -> "RatMatrix":
        return RatMatrix(self.cols, self.rows, _freeze(zip(*self.data)) if self.rows else
                         _freeze([[] for _ in range(self.cols)]))

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        od = other.data
        out = [
            [sum((a * od[t][j] for t, a in enumerate(row)), Fraction(0))
             for j in range(other.cols)]
            for row in self.data
        ]
        return RatMatrix(self.rows, other.cols, _freeze(out))

    def mul_vec(self, v: Sequence) -> Tuple[Fraction, ...]:
        return tuple(sum((a * Fraction(x) for a, x in zip(row, v)), Fraction(0))
                     for row in self.data)

    def scale(self, c) -> "RatMatrix":
        c = Fraction(c)
        return RatMatrix(self.rows, self.cols,
                         _freeze([[c * x for x in row] for row in self.data]))

    def denominator_lcm(self) -> int:
        d = 1
        for row in self.data:
            for x in row:
                d = lcm(d, x.denominator)
        return d

    def to_integer(self) -> IntMatrix:
        return IntMatrix(self.rows, self.cols,
                         _freeze([[_as_int(x) for x in row] for row in self.data]))

    def inverse(self) -> "RatMatrix":
        if self.rows != self.cols:
            raise ValueError("inverse of non-square matrix")
        n = self.rows
        a = [list(row) + [Fraction(int(i == j)) for j in range(n)]
             for i, row in enumerate(self.data)]
        for t in range(n):
            piv = next((i for i in range(t, n) if a[i][t] != 0), None)
            if piv is None:
                raise ValueError("singular matrix")
            a[t], a[piv] = a[piv], a[t]
            inv_p = 1 / a[t][t]
            a[t] = [x * inv_p for x in a[t]]
            for i in range(n):
                if i != t and a[i][t] != 0:
                    f = a[i][t]
                    a[i] = [x - f * y for x, y in zip(a[i], a[t])]
        return RatMatrix(n, n, _freeze([row[n:] for row in a]))

    def det(self) -> Fraction:
        if self.rows != self.cols:
            raise ValueError("determinant of non-square matrix")
        n = self.rows
        a = [list(row) for row in self.data]
        det = Fraction(1)
        for t in range(n):
            piv = next((i for i in range(t, n) if a[i][t] != 0), None)
            if piv is None:
                return Fraction(0)
            if piv != t:
                a[t], a[piv] = a[piv], a[t]
                det = -det
            det *= a[t][t]
            inv_p = 1 / a[t][t]
            for i in range(t + 1, n):
                if a[i][t] != 0:
                    f = a[i][t] * inv_p
                    a[i] = [x - f * y for x, y in zip(a[i], a[t])]
        return det


# ---------------------------------------------------------------------------
# Canonical forms
# ---------------------------------------------------------------------------

def hnf(M: IntMatrix) -> Tuple[IntMatrix, IntMatrix]:
    """Column Hermite normal form: returns (H, U) with M @ U = H, |det U| = 1.

    Elimination runs Euclidean div-mod chains against the smallest live entry
    in each pivot row, which keeps intermediate entries small (Kannan-Bachem
    style reduction each sweep)."""
    k, n = M.rows, M.cols
    cols = [list(M.column(j)) for j in range(n)]
    u_cols = [list(IntMatrix.identity(n).column(j)) for j in range(n)]
    assigned: List[Tuple[int, int]] = []  # (pivot_row, column index into cols)
    free = list(range(n))
    for r in range(k - 1, -1, -1):
        while True:
            live = [j for j in free if cols[j][r] != 0]
            if not live:
                break
            if len(live) == 1:
                dst = live[0]
                break
            dst = min(live, key=lambda j: abs(cols[j][r]))
            p = cols[dst][r]
            for j in live:
                if j == dst:
                    continue
                q = cols[j][r] // p
                if q:
                    cols[j] = [a - q * b for a, b in zip(cols[j], cols[dst])]
                    u_cols[j] = [a - q * b for a, b in zip(u_cols[j], u_cols[dst])]
        live = [j for j in free if cols[j][r] != 0]
        if not live:
            continue
        dst = live[0]
        if cols[dst][r] < 0:
            cols[dst] = [-x for x in cols[dst]]
            u_cols[dst] = [-x for x in u_cols[dst]]
        assigned.append((r, dst))
        free.remove(dst)
    # Pivot columns ordered by pivot row, zero columns trailing.
    assigned.sort()
    order = [j for _, j in assigned] + free
    cols = [cols[j] for j in order]
    u_cols = [u_cols[j] for j in order]
    pivots = [(r, idx) for idx, (r, _) in enumerate(sorted(assigned))]
    # Reduce entries to the right of each pivot, bottom pivot first.
    for r, j in reversed(pivots):
        p = cols[j][r]
        for j2 in range(j + 1, n):
            q = cols[j2][r] // p
            if q:
                cols[j2] = [a - q * b for a, b in zip(cols[j2], cols[j])]
                u_cols[j2] = [a - q * b for a, b in zip(u_cols[j2], u_cols[j])]
    H = IntMatrix.from_columns(cols, rows=k)
    U = IntMatrix.from_columns(u_cols, rows=n)
    return H, U


def hnf_pivots(H: IntMatrix) -> List[Tuple[int, int]]:
    """(pivot_row, column) pairs of a matrix already in column HNF."""
    out = []
    for j in range(H.cols):
        col = H.column(j)
        nz = [i for i, x in enumerate(col) if x != 0]
        if nz:
            out.append((nz[-1], j))
    return out


def snf(M: IntMatrix) -> Tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form: returns (D, V, W) with D = V @ M @ W diagonal,
    nonnegative, each diagonal entry dividing the next; V, W unimodular.

    Pivoting always moves the smallest nonzero entry of the trailing block to
    the corner and eliminates by div-mod sweeps, which keeps intermediate
    entries reduced (the Kannan-Bachem precaution against blow-up)."""
    k, n = M.rows, M.cols
    a = [list(row) for row in M.data]
    v = [list(row) for row in IntMatrix.identity(k).data]
    w = [list(row) for row in IntMatrix.identity(n).data]

    def swap_rows(i1: int, i2: int) -> None:
        a[i1], a[i2] = a[i2], a[i1]
        v[i1], v[i2] = v[i2], v[i1]

    def swap_cols(j1: int, j2: int) -> None:
        for m in (a, w):
            for row in m:
                row[j1], row[j2] = row[j2], row[j1]

    def min_pivot(t: int):
        best = None
        for i in range(t, k):
            row = a[i]
            for j in range(t, n):
                x = row[j]
                if x != 0 and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        return best

    for t in range(min(k, n)):
        while True:
            best = min_pivot(t)
            if best is None:
                break
            _, pi, pj = best
            if pi != t:
                swap_rows(t, pi)
            if pj != t:
                swap_cols(t, pj)
            p = a[t][t]
            dirty = False
            for i in range(t + 1, k):
                q = a[i][t] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    v[i] = [x - q * y for x, y in zip(v[i], v[t])]
                if a[i][t]:
                    dirty = True
            for j in range(t + 1, n):
                q = a[t][j] // p
                if q:
                    for m, width in ((a, k), (w, n)):
                        for row in m:
                            row[j] -= q * row[t]
                if a[t][j]:
                    dirty = True
            if dirty:
                continue
            # Pivot must divide the rest of the block; pull in an offender row.
            offender = None
            for i in range(t + 1, k):
                if any(x % p for x in a[i][t + 1:]):
                    offender = i
                    break
            if offender is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[offender])]
            v[t] = [x + y for x, y in zip(v[t], v[offender])]
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            v[t] = [-x for x in v[t]]
    D = IntMatrix(k, n, _freeze(a))
    V = IntMatrix(k, k, _freeze(v))
    W = IntMatrix(n, n, _freeze(w))
    return D, V, W


def snf_rational(A: RatMatrix) -> Tuple[RatMatrix, IntMatrix, IntMatrix]:
    """SNF of a rational matrix: D = V @ A @ W with integer unimodular V, W
    and diagonal D whose successive quotients are integers.

    Implemented by clearing denominators, running the integer SNF, and
    rescaling D back (the two forms are equivalent under rescaling)."""
    c = A.denominator_lcm()
    D_int, V, W = snf(A.scale(c).to_integer())
    D = D_int.to_rational().scale(Fraction(1, c))
    return D, V, W


def rcef(A: RatMatrix) -> Tuple[RatMatrix, List[int]]:
    """Reduced column echelon form over Q: returns (E, pivot_rows).

    Pivot entries are 1, pivot rows are zero elsewhere, the column span is
    preserved, and zero columns trail."""
    cols = [list(A.column(j)) for j in range(A.cols)]
    pivot_rows: List[int] = []
    next_col = 0
    for r in range(A.rows):
        piv = next((j for j in range(next_col, len(cols)) if cols[j][r] != 0), None)
        if piv is None:
            continue
        cols[next_col], cols[piv] = cols[piv], cols[next_col]
        inv_p = 1 / cols[next_col][r]
        cols[next_col] = [x * inv_p for x in cols[next_col]]
        for j in range(len(cols)):
            if j != next_col and cols[j][r] != 0:
                f = cols[j][r]
                cols[j] = [x - f * y for x, y in zip(cols[j], cols[next_col])]
        pivot_rows.append(r)
        next_col += 1
    E = RatMatrix.from_columns(cols, rows=A.rows)
    return E, pivot_rows


# ---------------------------------------------------------------------------
# Text matrix format: first line "rows cols", then row-major entries.
# ---------------------------------------------------------------------------

def format_matrix(M) -> str:
    lines = [f"{M.rows} {M.cols}"]
    for row in M.data:
        lines.append(" ".join(str(x) for x in row))
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> RatMatrix:
    tokens = text.split()
    if len(tokens) < 2:
        raise ValueError("matrix text must start with 'rows cols'")
    r, c = int(tokens[0]), int(tokens[1])
    entries = tokens[2:]
    if len(entries) != r * c:
        raise ValueError(f"expected {r * c} entries, got {len(entries)}")
    data = [[Fraction(entries[i * c + j]) for j in range(c)] for i in range(r)]
    return RatMatrix.from_rows(data) if r else RatMatrix(0, c, ())


def parse_int_matrix(text: str) -> IntMatrix:
    return parse_matrix(text).to_integer()

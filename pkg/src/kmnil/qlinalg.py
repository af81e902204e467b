"""Exact linear algebra over the rationals.

Everything here works on :class:`fractions.Fraction` entries.  Elimination is
done fraction-free (Bareiss) on integer rows obtained by clearing
denominators row by row; only the final back substitution touches fractions.
Pivoting is deterministic: the first nonzero entry in column order.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

__all__ = [
    "QMatrix",
    "NoSolution",
    "rank",
    "rref",
    "kernel_basis",
    "solve",
    "IncrementalEchelon",
    "primitive",
]


class NoSolution(ValueError):
    """Raised by :func:`solve` when the system is inconsistent."""


class QMatrix:
    """Immutable dense rational matrix."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, data: Iterable[Iterable], cols: int | None = None):
        rows = tuple(tuple(Fraction(x) for x in row) for row in data)
        if cols is None:
            if not rows:
                raise ValueError("cannot infer column count of an empty matrix")
            cols = len(rows[0])
        for row in rows:
            if len(row) != cols:
                raise ValueError("ragged matrix")
        self.rows = len(rows)
        self.cols = cols
        self._data = rows

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "QMatrix":
        return cls([[0] * cols for _ in range(rows)], cols=cols)

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], cols=n)

    def __getitem__(self, ij):
        i, j = ij
        return self._data[i][j]

    def row(self, i: int) -> tuple:
        return self._data[i]

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self._data]

    def transpose(self) -> "QMatrix":
        return QMatrix(zip(*self._data), cols=self.rows) if self.rows else QMatrix([], cols=0)

    def __matmul__(self, other):
        if isinstance(other, QMatrix):
            if self.cols != other.rows:
                raise ValueError("dimension mismatch")
            cols = list(zip(*other._data)) if other.rows else [()] * other.cols
            return QMatrix(
                [[sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols] for r in self._data],
                cols=other.cols,
            )
        vec = [Fraction(x) for x in other]
        if len(vec) != self.cols:
            raise ValueError("dimension mismatch")
        return [sum((a * b for a, b in zip(r, vec)), Fraction(0)) for r in self._data]

    def __eq__(self, other):
        return isinstance(other, QMatrix) and self.cols == other.cols and self._data == other._data

    def __hash__(self):
        return hash((self.cols, self._data))

    def __repr__(self):
        body = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self._data)
        return f"QMatrix([{body}])"


def _as_qmatrix(M) -> QMatrix:
    return M if isinstance(M, QMatrix) else QMatrix(M)


def _integer_rows(M: QMatrix) -> list[list[int]]:
    out = []
    for r in M._data:
        den = 1
        for x in r:
            den = lcm(den, x.denominator)
        out.append([int(x * den) for x in r])
    return out


def _bareiss(rows: list[list[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """Fraction-free row echelon form.  Returns (echelon rows, pivot columns)."""
    m = [list(r) for r in rows]
    nrows = len(m)
    pivots: list[int] = []
    prev = 1
    k = 0
    for c in range(ncols):
        if k == nrows:
            break
        p = next((i for i in range(k, nrows) if m[i][c] != 0), None)
        if p is None:
            continue
        if p != k:
            m[k], m[p] = m[p], m[k]
        pk = m[k]
        piv = pk[c]
        for i in range(k + 1, nrows):
            mi = m[i]
            f = mi[c]
            if f == 0:
                for j in range(c + 1, ncols):
                    mi[j] = (piv * mi[j]) // prev
            else:
                for j in range(c + 1, ncols):
                    mi[j] = (piv * mi[j] - f * pk[j]) // prev
                mi[c] = 0
        prev = piv
        pivots.append(c)
        k += 1
    return m[:k], pivots


def rank(M) -> int:
    M = _as_qmatrix(M)
    if M.rows == 0 or M.cols == 0:
        return 0
    return len(_bareiss(_integer_rows(M), M.cols)[1])


def rref(M) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form (nonzero rows only) and its pivot columns."""
    M = _as_qmatrix(M)
    if M.rows == 0 or M.cols == 0:
        return [], []
    ech, pivots = _bareiss(_integer_rows(M), M.cols)
    R = [[Fraction(x, row[p]) for x in row] for row, p in zip(ech, pivots)]
    for k in range(len(R) - 1, -1, -1):
        p = pivots[k]
        for i in range(k):
            f = R[i][p]
            if f:
                Ri, Rk = R[i], R[k]
                for j in range(p, M.cols):
                    if Rk[j]:
                        Ri[j] -= f * Rk[j]
    return R, pivots


def primitive(vec: Sequence) -> list[int]:
    """Scale a rational vector to integers with gcd 1 and first nonzero entry positive."""
    fr = [Fraction(x) for x in vec]
    den = 1
    for x in fr:
        den = lcm(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return ints
    lead = next(x for x in ints if x)
    if lead < 0:
        g = -g
    return [x // g for x in ints]


def kernel_basis(M) -> list[list[int]]:
    """Basis of the right null space, one primitive integer vector per free column."""
    M = _as_qmatrix(M)
    n = M.cols
    R, pivots = rref(M) if M.rows else ([], [])
    pivset = set(pivots)
    basis = []
    for f in range(n):
        if f in pivset:
            continue
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, p in zip(R, pivots):
            v[p] = -row[f]
        basis.append(primitive(v))
    return basis


def solve(M, b: Sequence) -> list[Fraction]:
    """One exact solution of ``M x = b``; free variables are set to zero."""
    M = _as_qmatrix(M)
    b = [Fraction(x) for x in b]
    if len(b) != M.rows:
        raise ValueError("dimension mismatch")
    aug = QMatrix([list(r) + [bi] for r, bi in zip(M._data, b)], cols=M.cols + 1)
    R, pivots = rref(aug)
    if pivots and pivots[-1] == M.cols:
        raise NoSolution("inconsistent linear system")
    x = [Fraction(0)] * M.cols
    for row, p in zip(R, pivots):
        x[p] = row[M.cols]
    return x


class IncrementalEchelon:
    """Integer row echelon form grown one vector at a time.

    Vectors are sparse ``{column: int}`` dicts.  :meth:`add` reduces a vector
    against the stored rows and keeps it if something survives, which makes
    this the workhorse for selecting an independent subset of a long
    spanning list without ever forming fractions.
    """

    def __init__(self, pivot: str = "min"):
        if pivot not in ("min", "max"):
            raise ValueError("pivot must be 'min' or 'max'")
        self._choose = min if pivot == "min" else max
        self._rows: list[tuple[int, dict[int, int]]] = []
        self._pivot_cols: set[int] = set()

    def __len__(self):
        return len(self._rows)

    def reduce(self, vec: dict[int, int]) -> dict[int, int]:
        v = {c: x for c, x in vec.items() if x}
        for p, row in self._rows:
            f = v.get(p)
            if not f:
                continue
            a = row[p]
            g = gcd(a, f)
            a //= g
            f //= g
            if a != 1:
                for c in v:
                    v[c] *= a
            for c, x in row.items():
                y = v.get(c, 0) - f * x
                if y:
                    v[c] = y
                else:
                    v.pop(c, None)
        if v:
            g = 0
            for x in v.values():
                g = gcd(g, x)
            if g > 1:
                v = {c: x // g for c, x in v.items()}
        return v

    def add(self, vec: dict[int, int]) -> bool:
        v = self.reduce(vec)
        if not v:
            return False
        p = self._choose(v)
        self._rows.append((p, v))
        self._pivot_cols.add(p)
        return True

    @property
    def pivots(self) -> list[int]:
        return [p for p, _ in self._rows]

    def rref(self) -> dict[int, dict[int, Fraction]]:
        """Reduced rows keyed by pivot: 1 at the pivot, 0 at every other pivot."""
        rows = [(p, dict(r)) for p, r in self._rows]
        # later rows already vanish on earlier pivots; clear the rest bottom-up
        for k in range(len(rows) - 1, -1, -1):
            p, rk = rows[k]
            a = rk[p]
            for t in range(k):
                q, rt = rows[t]
                f = rt.get(p)
                if not f:
                    continue
                g = gcd(a, f)
                am, fm = a // g, f // g
                if am != 1:
                    for c in rt:
                        rt[c] *= am
                for c, x in rk.items():
                    y = rt.get(c, 0) - fm * x
                    if y:
                        rt[c] = y
                    else:
                        rt.pop(c, None)
                g = 0
                for x in rt.values():
                    g = gcd(g, x)
                if g > 1:
                    for c in rt:
                        rt[c] //= g
        out = {}
        for p, r in rows:
            lead = r[p]
            out[p] = {c: Fraction(x, lead) for c, x in r.items()}
        return out

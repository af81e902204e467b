"""Generalized Cartan matrices: validation, symmetrizers, type classification.

Classification matches the input against a catalog of finite and affine
Dynkin diagrams (graph isomorphism by backtracking) and cross-checks the
answer with Vinberg's trichotomy computed numerically.

Canonical numbering
-------------------
Finite types use nodes ``1..l`` in the Kac/Bourbaki layout: ``B_l`` has its
short root at node ``l``, ``C_l`` its long root at node ``l``, ``F_4`` is
``1 - 2 => 3 - 4`` with nodes 3, 4 short.  ``G_2`` is numbered with the short
root at node 1, i.e. the matrix ``[[2, -3], [-1, 2]]``.  ``E_n`` is a chain
``1..n-1`` with node ``n`` attached to node 3.

Affine types use nodes ``0..l``.  Untwisted diagrams prepend the extending
node ``0`` to the finite numbering.  ``A_{2l-1}^(2)``, ``D_{l+1}^(2)``,
``E_6^(2)`` and ``D_4^(3)`` are the transposes of ``B_l^(1)``, ``C_l^(1)``,
``F_4^(1)`` and ``G_2^(1)``; ``A_{2l}^(2)`` is ``0 <= 1 - ... - (l-1) <= l``
with marks ``(2, ..., 2, 1)``.  The node carrying mark 1 that the loop
variable attaches to is ``epsilon``: ``l`` for ``A_{2l}^(2)``, ``0`` otherwise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from . import qlinalg

__all__ = [
    "Gcm",
    "GcmError",
    "DiagonalNotTwo",
    "PositiveOffDiagonal",
    "ZeroPatternAsymmetric",
    "Decomposable",
    "NotSymmetrizable",
    "ClassificationError",
    "Finite",
    "Affine",
    "Indefinite",
    "validate_gcm",
    "symmetrizer",
    "is_symmetrizable",
    "classify",
    "diagram_automorphisms",
    "affine_marks",
    "finite_cartan",
    "affine_cartan",
    "catalog",
    "by_label",
    "compose",
    "load_gcm_json",
]


class GcmError(ValueError):
    """Base class for rejected matrices."""

    def __init__(self, message: str, indices: tuple = ()):
        super().__init__(message)
        self.indices = indices


class DiagonalNotTwo(GcmError):
    pass


class PositiveOffDiagonal(GcmError):
    pass


class ZeroPatternAsymmetric(GcmError):
    pass


class Decomposable(GcmError):
    pass


class NotSymmetrizable(ValueError):
    """No positive diagonal D makes DA symmetric; ``cycle`` witnesses the conflict."""

    def __init__(self, cycle: list[int]):
        super().__init__(f"not symmetrizable: ratios conflict around cycle {cycle}")
        self.cycle = cycle


class ClassificationError(RuntimeError):
    """Catalog match and Vinberg test disagree.  Indicates a bug."""


@dataclass(frozen=True)
class Gcm:
    entries: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def rank_l(self) -> int:
        """The affine rank ``l`` with simple roots indexed ``0..l``."""
        return self.size - 1

    def __getitem__(self, ij) -> int:
        i, j = ij
        return self.entries[i][j]

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def transpose(self) -> "Gcm":
        return Gcm(tuple(zip(*self.entries)))

    def permuted(self, perm: Sequence[int]) -> "Gcm":
        """Matrix with ``new[i][j] = old[perm[i]][perm[j]]``."""
        return Gcm(tuple(tuple(self.entries[perm[i]][perm[j]] for j in range(self.size)) for i in range(self.size)))

    def max_serre_height(self) -> int:
        """Largest height ``2 - a_ij`` of a Serre relation."""
        n = self.size
        return max(2 - self.entries[i][j] for i in range(n) for j in range(n) if i != j)

    def neighbours(self, i: int) -> list[int]:
        return [j for j in range(self.size) if j != i and self.entries[i][j] != 0]

    def __repr__(self):
        return f"Gcm({self.tolist()})"


def validate_gcm(M) -> Gcm:
    if isinstance(M, Gcm):
        M = M.entries
    rows = [list(r) for r in M]
    n = len(rows)
    if n < 2 or any(len(r) != n for r in rows):
        raise GcmError("a GCM must be square of size >= 2")
    for i in range(n):
        for j in range(n):
            x = rows[i][j]
            if int(x) != x:
                raise GcmError(f"non-integer entry at ({i},{j})", (i, j))
            rows[i][j] = int(x)
    for i in range(n):
        if rows[i][i] != 2:
            raise DiagonalNotTwo(f"a[{i}][{i}] = {rows[i][i]}, expected 2", (i, i))
    for i in range(n):
        for j in range(n):
            if i != j and rows[i][j] > 0:
                raise PositiveOffDiagonal(f"a[{i}][{j}] = {rows[i][j]} > 0", (i, j))
    for i in range(n):
        for j in range(i + 1, n):
            if (rows[i][j] == 0) != (rows[j][i] == 0):
                raise ZeroPatternAsymmetric(f"a[{i}][{j}] and a[{j}][{i}] disagree on being zero", (i, j))
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for j in range(n):
            if j not in seen and rows[i][j] != 0:
                seen.add(j)
                stack.append(j)
    if len(seen) != n:
        missing = tuple(sorted(set(range(n)) - seen))
        raise Decomposable(f"nodes {list(missing)} are not connected to node 0", missing)
    return Gcm(tuple(tuple(r) for r in rows))


def _as_gcm(G) -> Gcm:
    return G if isinstance(G, Gcm) else validate_gcm(G)


def symmetrizer(G) -> tuple[int, ...]:
    """Positive integer vector d, gcd 1, with ``d_i a_ij = d_j a_ji``.

    Ratios are propagated along a BFS spanning tree from node 0; every
    non-tree edge is checked afterwards and a conflicting cycle is reported.
    """
    G = _as_gcm(G)
    n = G.size
    d: list[Fraction | None] = [None] * n
    parent = [-1] * n
    d[0] = Fraction(1)
    order = [0]
    for i in order:
        for j in G.neighbours(i):
            if d[j] is None:
                # d_i a_ij = d_j a_ji
                d[j] = d[i] * Fraction(G[i, j], G[j, i])
                parent[j] = i
                order.append(j)
    for i in range(n):
        for j in G.neighbours(i):
            if d[i] * G[i, j] != d[j] * G[j, i]:
                raise NotSymmetrizable(_tree_cycle(parent, i, j))
    den = 1
    for x in d:
        den = lcm(den, x.denominator)
    ints = [int(x * den) for x in d]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return tuple(x // g for x in ints)


def _tree_cycle(parent, i, j):
    def path(k):
        out = [k]
        while parent[k] != -1:
            k = parent[k]
            out.append(k)
        return out

    pi, pj = path(i), path(j)
    common = next(x for x in pi if x in set(pj))
    left = pi[: pi.index(common) + 1]
    right = pj[: pj.index(common)]
    return left + right[::-1] + [i]


def is_symmetrizable(G) -> bool:
    try:
        symmetrizer(G)
    except NotSymmetrizable:
        return False
    return True


# ---------------------------------------------------------------- type tags


@dataclass(frozen=True)
class Finite:
    label: str
    to_canonical: tuple[int, ...]  # input index -> canonical node number (1-based)

    kind = "finite"

    def canonical_index(self, i: int) -> int:
        return self.to_canonical[i]

    def input_index(self, canonical: int) -> int:
        return self.to_canonical.index(canonical)


@dataclass(frozen=True)
class Affine:
    label: str
    to_canonical: tuple[int, ...]  # input index -> canonical node number (0-based)
    marks: tuple[int, ...]  # in input numbering
    comarks: tuple[int, ...]
    epsilon: int  # canonical numbering
    twist: int  # r in X_N^(r)

    kind = "affine"

    def canonical_index(self, i: int) -> int:
        return self.to_canonical[i]

    def input_index(self, canonical: int) -> int:
        return self.to_canonical.index(canonical)

    @property
    def epsilon_index(self) -> int:
        """epsilon translated back to the input numbering."""
        return self.input_index(self.epsilon)


@dataclass(frozen=True)
class Indefinite:
    label: str = "INDEFINITE"

    kind = "indefinite"


# ---------------------------------------------------------------- catalog


def _chain(n: int) -> list[list[int]]:
    a = [[0] * n for _ in range(n)]
    for i in range(n):
        a[i][i] = 2
        if i + 1 < n:
            a[i][i + 1] = a[i + 1][i] = -1
    return a


@lru_cache(maxsize=None)
def finite_cartan(series: str, l: int) -> Gcm:
    """Canonical finite-type Cartan matrix (nodes 1..l stored at 0..l-1)."""
    if series == "A" and l >= 1:
        a = _chain(l)
    elif series == "B" and l >= 2:
        a = _chain(l)
        a[l - 1][l - 2] = -2
    elif series == "C" and l >= 2:
        a = _chain(l)
        a[l - 2][l - 1] = -2
    elif series == "D" and l >= 4:
        # chain 1..l-1, node l attached to node l-2
        a = _chain(l)
        a[l - 2][l - 1] = a[l - 1][l - 2] = 0
        a[l - 3][l - 1] = a[l - 1][l - 3] = -1
    elif series == "E" and l in (6, 7, 8):
        a = _chain(l - 1)
        for r in a:
            r.append(0)
        a.append([0] * l)
        a[l - 1][l - 1] = 2
        a[2][l - 1] = a[l - 1][2] = -1
    elif series == "F" and l == 4:
        a = _chain(4)
        a[2][1] = -2
    elif series == "G" and l == 2:
        a = [[2, -3], [-1, 2]]
    else:
        raise ValueError(f"no finite type {series}{l}")
    return Gcm(tuple(tuple(r) for r in a))


def _finite_labels(n: int) -> list[tuple[str, int]]:
    out = [("A", n)]
    if n >= 2:
        out.append(("B", n))
    if n >= 3:
        out.append(("C", n))
    if n >= 4:
        out.append(("D", n))
    if n in (6, 7, 8):
        out.append(("E", n))
    if n == 4:
        out.append(("F", 4))
    if n == 2:
        out.append(("G", 2))
    return out


def _highest_root_coords(G: Gcm) -> tuple[int, ...]:
    from .roots import highest_root

    return highest_root(G, check_type=False).coords


@lru_cache(maxsize=None)
def _untwisted(series: str, l: int) -> Gcm:
    if series == "A" and l == 1:
        return Gcm(((2, -2), (-2, 2)))
    fin = finite_cartan(series, l)
    theta = _highest_root_coords(fin)
    d = symmetrizer(fin)
    B = [[d[i] * fin[i, j] for j in range(l)] for i in range(l)]
    theta_sq = sum(theta[i] * B[i][j] * theta[j] for i in range(l) for j in range(l))
    n = l + 1
    a = [[0] * n for _ in range(n)]
    a[0][0] = 2
    for i in range(l):
        for j in range(l):
            a[i + 1][j + 1] = fin[i, j]
    for j in range(l):
        # a_{j0} = -theta(alpha_j^vee), a_{0j} = -2 (theta|alpha_j) / (theta|theta)
        a[j + 1][0] = -sum(theta[k] * fin[j, k] for k in range(l))
        pair = sum(theta[k] * B[k][j] for k in range(l))
        val = Fraction(-2 * pair, theta_sq)
        assert val.denominator == 1
        a[0][j + 1] = int(val)
    return Gcm(tuple(tuple(r) for r in a))


def _a_even_twisted(l: int) -> Gcm:
    n = l + 1
    if l == 1:
        return Gcm(((2, -4), (-1, 2)))
    a = _chain(n)
    a[0][1] = -2
    a[l - 1][l] = -2
    return Gcm(tuple(tuple(r) for r in a))


# Kac's marks for the twisted diagrams, used to cross-check the kernel computation.
def _twisted_marks(series: str, N: int, l: int) -> tuple[int, ...]:
    if series == "A" and N == 2 * l:
        return tuple([2] * l + [1])
    if series == "A":
        return tuple([1, 1] + [2] * (l - 2) + [1])
    if series == "D" and N == l + 1:
        return tuple([1] * (l + 1))
    if series == "E":
        return (1, 2, 3, 2, 1)
    if series == "D" and N == 4:
        # node 2 is the middle node here, since G_2 is numbered short-root first
        return (1, 1, 2)
    raise ValueError(series)


@dataclass(frozen=True)
class CatalogEntry:
    label: str
    kind: str
    matrix: Gcm
    twist: int = 0
    epsilon: int = 0
    stored_marks: tuple[int, ...] | None = None


def _affine_entries(n: int) -> list[CatalogEntry]:
    l = n - 1
    out = []
    untwisted = [("A", l)]
    if l >= 3:
        untwisted.append(("B", l))
    if l >= 2:
        untwisted.append(("C", l))
    if l >= 4:
        untwisted.append(("D", l))
    if l in (6, 7, 8):
        untwisted.append(("E", l))
    if l == 4:
        untwisted.append(("F", 4))
    if l == 2:
        untwisted.append(("G", 2))
    for s, k in untwisted:
        fin = None if (s == "A" and k == 1) else finite_cartan(s, k)
        marks = (1, 1) if fin is None else (1,) + _highest_root_coords(fin)
        out.append(CatalogEntry(f"{s}{k}~1", "affine", _untwisted(s, k), 1, 0, marks))
    if l >= 1:
        out.append(CatalogEntry(f"A{2 * l}~2", "affine", _a_even_twisted(l), 2, l, _twisted_marks("A", 2 * l, l)))
    if l >= 3:
        out.append(
            CatalogEntry(f"A{2 * l - 1}~2", "affine", _untwisted("B", l).transpose(), 2, 0, _twisted_marks("A", 2 * l - 1, l))
        )
    if l >= 2:
        out.append(
            CatalogEntry(f"D{l + 1}~2", "affine", _untwisted("C", l).transpose(), 2, 0, _twisted_marks("D", l + 1, l))
        )
    if l == 4:
        out.append(CatalogEntry("E6~2", "affine", _untwisted("F", 4).transpose(), 2, 0, _twisted_marks("E", 6, 4)))
    if l == 2:
        out.append(CatalogEntry("D4~3", "affine", _untwisted("G", 2).transpose(), 3, 0, _twisted_marks("D", 4, 2)))
    return out


@lru_cache(maxsize=None)
def catalog(n: int) -> tuple[CatalogEntry, ...]:
    """All catalog entries of matrix size ``n``."""
    entries = [CatalogEntry(f"{s}{l}", "finite", finite_cartan(s, l)) for s, l in _finite_labels(n)]
    entries += _affine_entries(n)
    return tuple(entries)


def _isomorphism(G: Gcm, C: Gcm) -> tuple[int, ...] | None:
    """Permutation p with ``G[p[i]][p[j]] == C[i][j]`` (catalog node i -> input node p[i])."""
    n = G.size

    def signature(M, i):
        return tuple(sorted((M[i, j], M[j, i]) for j in range(n) if j != i))

    sig_G = [signature(G, i) for i in range(n)]
    sig_C = [signature(C, i) for i in range(n)]
    if sorted(sig_G) != sorted(sig_C):
        return None
    p = [-1] * n
    used = [False] * n

    def extend(i):
        if i == n:
            return True
        for cand in range(n):
            if used[cand] or sig_G[cand] != sig_C[i]:
                continue
            if all(G[cand, p[k]] == C[i, k] and G[p[k], cand] == C[k, i] for k in range(i)):
                p[i] = cand
                used[cand] = True
                if extend(i + 1):
                    return True
                used[cand] = False
        return False

    return tuple(p) if extend(0) else None


# ---------------------------------------------------------------- Vinberg


def _vinberg(G: Gcm) -> str:
    A = np.array(G.tolist(), dtype=float)
    n = G.size
    ones = np.ones(n)
    bounds = [(1, None)] * n
    # u >= 1, A u >= 1
    res = linprog(np.zeros(n), A_ub=-A, b_ub=-ones, bounds=bounds, method="highs")
    if res.status == 0:
        return "finite"
    kernel = qlinalg.kernel_basis(qlinalg.QMatrix(G.tolist()))
    if len(kernel) == 1 and (all(x > 0 for x in kernel[0]) or all(x < 0 for x in kernel[0])):
        return "affine"
    res = linprog(np.zeros(n), A_ub=A, b_ub=-ones, bounds=bounds, method="highs")
    if res.status == 0:
        return "indefinite"
    raise ClassificationError(f"Vinberg test inconclusive for {G}")


def classify(G):
    G = _as_gcm(G)
    n = G.size
    found = None
    for entry in catalog(n):
        p = _isomorphism(G, entry.matrix)
        if p is not None:
            found = (entry, p)
            break
    numeric = _vinberg(G)
    if found is None:
        if numeric != "indefinite":
            raise ClassificationError(f"{G} is {numeric} by Vinberg but matches no catalog entry")
        return Indefinite()
    entry, p = found
    if numeric != entry.kind:
        raise ClassificationError(f"catalog says {entry.label} but Vinberg says {numeric}")
    to_canonical = [0] * n
    for canon, inp in enumerate(p):
        to_canonical[inp] = canon
    if entry.kind == "finite":
        return Finite(entry.label, tuple(c + 1 for c in to_canonical))
    marks = _kernel_positive(G)
    comarks = _kernel_positive(G.transpose())
    stored = tuple(entry.stored_marks[to_canonical[i]] for i in range(n))
    if stored != marks:
        raise ClassificationError(f"{entry.label}: kernel marks {marks} differ from catalog marks {stored}")
    return Affine(entry.label, tuple(to_canonical), marks, comarks, entry.epsilon, entry.twist)


def _kernel_positive(G: Gcm) -> tuple[int, ...]:
    ker = qlinalg.kernel_basis(qlinalg.QMatrix(G.tolist()))
    if len(ker) != 1:
        raise ClassificationError("affine matrix must have corank 1")
    v = ker[0]
    if v[0] < 0:
        v = [-x for x in v]
    if not all(x > 0 for x in v):
        raise ClassificationError("affine null vector is not positive")
    return tuple(v)


def affine_marks(G, gtype: Affine | None = None):
    """(marks, comarks, delta) for an affine matrix; delta is a RootVec."""
    from .roots import RootVec

    G = _as_gcm(G)
    if gtype is None:
        gtype = classify(G)
    if not isinstance(gtype, Affine):
        raise ValueError("affine_marks needs an affine GCM")
    return gtype.marks, gtype.comarks, RootVec(gtype.marks)


# ---------------------------------------------------------------- Aut(A)


def diagram_automorphisms(G) -> list[tuple[int, ...]]:
    """All permutations s with ``a[s(i)][s(j)] == a[i][j]``, in lexicographic order."""
    G = _as_gcm(G)
    n = G.size
    out = []
    p = [-1] * n
    used = [False] * n

    def degree(i):
        return sorted((G[i, j], G[j, i]) for j in range(n) if j != i)

    degs = [degree(i) for i in range(n)]

    def extend(i):
        if i == n:
            out.append(tuple(p))
            return
        for c in range(n):
            if used[c] or degs[c] != degs[i]:
                continue
            if all(G[c, p[k]] == G[i, k] and G[p[k], c] == G[k, i] for k in range(i)):
                p[i] = c
                used[c] = True
                extend(i + 1)
                used[c] = False

    extend(0)
    return out


def compose(s1: Sequence[int], s2: Sequence[int]) -> tuple[int, ...]:
    """``(s1 s2)(i) = s1(s2(i))``."""
    return tuple(s1[s2[i]] for i in range(len(s2)))


def load_gcm_json(path) -> Gcm:
    import json
    from pathlib import Path

    data = json.loads(Path(path).read_text())
    if not isinstance(data, dict) or "matrix" not in data:
        raise GcmError('GCM file must be a JSON object with a "matrix" key')
    return validate_gcm(data["matrix"])


def affine_cartan(label: str) -> Gcm:
    """Catalog matrix for an affine label such as ``"A1~1"`` or ``"A2~2"``."""
    for n in range(2, 20):
        for entry in catalog(n):
            if entry.label == label and entry.kind == "affine":
                return entry.matrix
    raise KeyError(label)


def by_label(label: str) -> Gcm:
    """Catalog matrix for a finite or affine label."""
    if "~" in label:
        return affine_cartan(label)
    return finite_cartan(label[0], int(label[1:]))

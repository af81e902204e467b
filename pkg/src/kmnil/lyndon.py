"""Lyndon words and the standard bracketing of the free Lie algebra.

A Lie polynomial is stored inside the tensor algebra as a dict mapping
words (tuples of letters) to integer coefficients.  The standard bracketing
P_w of a Lyndon word w satisfies P_w = w + (lexicographically larger words),
which is what makes restriction to Lyndon positions a unitriangular change
of coordinates.
"""

from __future__ import annotations

from math import factorial, gcd
from typing import Iterator, Sequence

Word = tuple[int, ...]
Poly = dict[Word, int]

_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


def word_label(w: Sequence[int]) -> str:
    return "".join(_DIGITS[a] for a in w)


def label_word(s: str) -> Word:
    try:
        return tuple(_DIGITS.index(ch) for ch in s)
    except ValueError:
        raise ValueError(f"bad basis label {s!r}") from None


def is_lyndon(w: Sequence[int]) -> bool:
    """Strictly smaller than every proper rotation (Duval's test)."""
    n = len(w)
    if n == 0:
        return False
    i, j = 0, 1
    while j < n:
        if w[i] == w[j]:
            i += 1
        elif w[i] < w[j]:
            i = 0
        else:
            return False
        j += 1
    return i == 0


def content(w: Sequence[int], n: int) -> tuple[int, ...]:
    c = [0] * n
    for a in w:
        c[a] += 1
    return tuple(c)


def multiset_words(coords: Sequence[int]) -> Iterator[Word]:
    """All words with the given letter counts, in lexicographic order."""
    counts = list(coords)
    total = sum(counts)
    w: list[int] = []

    def rec():
        if len(w) == total:
            yield tuple(w)
            return
        for a, c in enumerate(counts):
            if c:
                counts[a] -= 1
                w.append(a)
                yield from rec()
                w.pop()
                counts[a] += 1

    yield from rec()


def lyndon_words(coords: Sequence[int]) -> list[Word]:
    """Lyndon words of the given content, lexicographically sorted."""
    return [w for w in multiset_words(coords) if is_lyndon(w)]


def _mobius(n: int) -> int:
    out, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            out = -out
        p += 1
    return -out if n > 1 else out


def witt_dimension(coords: Sequence[int]) -> int:
    """Dimension of the multidegree component of the free Lie algebra."""
    n = sum(coords)
    if n == 0:
        return 0
    g = 0
    for c in coords:
        g = gcd(g, c)
    total = 0
    for d in range(1, g + 1):
        if g % d:
            continue
        m = n // d
        multinom = factorial(m)
        for c in coords:
            multinom //= factorial(c // d)
        total += _mobius(d) * multinom
    assert total % n == 0
    return total // n


def standard_factorization(w: Word) -> tuple[Word, Word]:
    """w = uv with v the longest proper Lyndon suffix."""
    for k in range(1, len(w)):
        if is_lyndon(w[k:]):
            return w[:k], w[k:]
    raise ValueError(f"{w} has no standard factorization")


def poly_mul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for a, x in p.items():
        for b, y in q.items():
            k = a + b
            out[k] = out.get(k, 0) + x * y
    return {k: v for k, v in out.items() if v}


def poly_bracket(p: Poly, q: Poly) -> Poly:
    out = poly_mul(p, q)
    for k, v in poly_mul(q, p).items():
        out[k] = out.get(k, 0) - v
    return {k: v for k, v in out.items() if v}


class StandardPolys:
    """Per-instance memo of P_w as dicts, for fast coefficient lookup."""

    def __init__(self):
        self._memo: dict[Word, Poly] = {}

    def __call__(self, w: Word) -> Poly:
        p = self._memo.get(w)
        if p is None:
            if len(w) == 1:
                p = {w: 1}
            else:
                u, v = standard_factorization(w)
                p = poly_bracket(self(u), self(v))
            self._memo[w] = p
        return p

    def forget(self, keep) -> None:
        """Drop memoized polys whose word fails the predicate."""
        self._memo = {w: p for w, p in self._memo.items() if keep(w)}


_shared = StandardPolys()


def standard_poly(w: Sequence[int]) -> Poly:
    """P_w, the standard bracketing of a Lyndon word, expanded in words."""
    return dict(_shared(tuple(w)))

"""Root lattice arithmetic, simple reflections and real roots."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "RootVec",
    "BilinearForm",
    "NotFiniteType",
    "SimplyLaced",
    "simple_root",
    "reflect",
    "pairing",
    "bilinear_form",
    "real_roots_up_to_height",
    "positive_roots",
    "highest_root",
    "highest_short_root",
    "i0_index",
]


class NotFiniteType(ValueError):
    pass


class SimplyLaced(ValueError):
    pass


@dataclass(frozen=True)
class RootVec:
    """An element of the root lattice, as coordinates over the simple roots."""

    coords: tuple[int, ...]

    def __init__(self, coords: Iterable[int]):
        object.__setattr__(self, "coords", tuple(int(c) for c in coords))

    @property
    def height(self) -> int:
        return sum(self.coords)

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __add__(self, other: "RootVec") -> "RootVec":
        return RootVec(a + b for a, b in zip(self.coords, other.coords))

    def __sub__(self, other: "RootVec") -> "RootVec":
        return RootVec(a - b for a, b in zip(self.coords, other.coords))

    def __neg__(self) -> "RootVec":
        return RootVec(-a for a in self.coords)

    def scale(self, k: int) -> "RootVec":
        return RootVec(k * a for a in self.coords)

    def is_nonneg(self) -> bool:
        return all(a >= 0 for a in self.coords)

    def is_positive(self) -> bool:
        return self.is_nonneg() and any(self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __le__(self, other: "RootVec") -> bool:  # partial order of Q
        return all(a <= b for a, b in zip(self.coords, other.coords))

    def sort_key(self):
        """Order used everywhere for degrees: by height, then lexicographic."""
        return (self.height, self.coords)

    def tojson(self) -> list[int]:
        return list(self.coords)

    def __repr__(self):
        return f"RootVec({list(self.coords)})"

    def __str__(self):
        return "[" + ",".join(str(c) for c in self.coords) + "]"


def simple_root(n: int, i: int) -> RootVec:
    return RootVec(1 if k == i else 0 for k in range(n))


def _entries(G) -> tuple[tuple[int, ...], ...]:
    return G.entries if hasattr(G, "entries") else tuple(tuple(r) for r in G)


def pairing(G, beta: RootVec, i: int) -> int:
    """<beta, alpha_i^vee> = sum_j beta_j a_ij."""
    A = _entries(G)
    return sum(b * a for b, a in zip(beta.coords, A[i]))


def reflect(G, i: int, beta: RootVec) -> RootVec:
    c = list(beta.coords)
    c[i] -= pairing(G, beta, i)
    return RootVec(c)


@dataclass(frozen=True)
class BilinearForm:
    gram: tuple[tuple[Fraction, ...], ...]

    def __call__(self, x: RootVec, y: RootVec) -> Fraction:
        n = len(self.gram)
        return sum((x[i] * self.gram[i][j] * y[j] for i in range(n) for j in range(n) if x[i] and y[j]), Fraction(0))

    def norm2(self, x: RootVec) -> Fraction:
        return self(x, x)


def bilinear_form(G) -> BilinearForm:
    from .gcm import symmetrizer

    d = symmetrizer(G)
    A = _entries(G)
    n = len(A)
    return BilinearForm(tuple(tuple(Fraction(d[i] * A[i][j]) for j in range(n)) for i in range(n)))


def real_roots_up_to_height(G, H: int | None) -> set[RootVec]:
    """Positive real roots of height <= H by upward closure from the simple roots.

    ``H = None`` means no bound, which only terminates for finite type.
    """
    A = _entries(G)
    n = len(A)
    found = {simple_root(n, i) for i in range(n)}
    frontier = list(found)
    while frontier:
        nxt = []
        for beta in frontier:
            for i in range(n):
                gamma = reflect(A, i, beta)
                if gamma.is_positive() and (H is None or gamma.height <= H) and gamma not in found:
                    found.add(gamma)
                    nxt.append(gamma)
        frontier = nxt
    return found


def _require_finite(G, check_type: bool):
    if not check_type:
        return
    from .gcm import Finite, classify

    if not isinstance(classify(G), Finite):
        raise NotFiniteType(f"{G} is not of finite type")


def positive_roots(G, check_type: bool = True) -> list[RootVec]:
    """All positive roots of a finite-type matrix, sorted by height then coords."""
    _require_finite(G, check_type)
    return sorted(real_roots_up_to_height(G, None), key=RootVec.sort_key)


def _maximum(roots: Sequence[RootVec]) -> RootVec:
    top = max(roots, key=RootVec.sort_key)
    assert all(r <= top for r in roots), "no unique maximum"
    return top


def highest_root(G, check_type: bool = True) -> RootVec:
    roots = positive_roots(G, check_type)
    theta = _maximum(roots)
    rootset = set(roots)
    n = len(theta)
    assert all(theta + simple_root(n, i) not in rootset for i in range(n))
    return theta


def highest_short_root(G) -> RootVec:
    roots = positive_roots(G)
    form = bilinear_form(G)
    lengths = {form.norm2(r) for r in roots}
    if len(lengths) == 1:
        raise SimplyLaced("all roots have the same length")
    short = min(lengths)
    return _maximum([r for r in roots if form.norm2(r) == short])


def i0_index(G) -> int:
    """The unique index i with theta_1 + alpha_i a root (input numbering)."""
    theta1 = highest_short_root(G)
    rootset = set(positive_roots(G, check_type=False))
    n = len(theta1)
    hits = [i for i in range(n) if theta1 + simple_root(n, i) in rootset]
    assert len(hits) == 1, hits
    return hits[0]

"""Truncated nilradicals and Borel subalgebras built from Serre relations.

The nilradical is the free Lie algebra on e_0..e_l modulo the ideal generated
by (ad e_i)^{1 - a_ij} e_j, computed one multidegree at a time up to a height
cap N.  Free Lie elements live in Lyndon coordinates: x = sum c_w P_w over the
Lyndon words w of a fixed content.  The ideal of degree beta is spanned by the
Serre generators of that degree and by [e_i, I_{beta - alpha_i}]; the quotient
basis is the set of Lyndon words left over after row reducing the ideal with
pivots on the lexicographically largest words.

All dimension statements are made over the rationals.  Dimensions of graded
pieces and of solution spaces of rational linear systems do not change under
extension of the base field in characteristic 0, so they hold over any such
field.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from . import lyndon, qlinalg
from .gcm import Gcm, NotSymmetrizable, symmetrizer, validate_gcm
from .qlinalg import IncrementalEchelon, QMatrix
from .roots import RootVec, simple_root

__all__ = [
    "CapTooSmall",
    "HeightOverflow",
    "LieElt",
    "GradedAlgebra",
    "BorelAlgebra",
    "BorelElt",
    "build_nilradical",
    "build_borel",
    "bracket",
    "mult",
    "peterson_mult_oracle",
    "degrees_up_to",
    "serre_element",
    "check_invariants",
    "jacobi_failures",
    "CacheError",
]


class CapTooSmall(ValueError):
    pass


class HeightOverflow(ValueError):
    pass


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class LieElt:
    """Homogeneous element: a sparse combination of basis labels of one degree."""

    degree: RootVec
    coords: Mapping[str, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {k: _frac(v) for k, v in self.coords.items() if v}
        object.__setattr__(self, "coords", clean)

    def is_zero(self) -> bool:
        return not self.coords

    def __add__(self, other: "LieElt") -> "LieElt":
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if other.degree != self.degree:
            raise ValueError("cannot add elements of different degrees")
        out = dict(self.coords)
        for k, v in other.coords.items():
            out[k] = out.get(k, 0) + v
        return LieElt(self.degree, out)

    def __neg__(self) -> "LieElt":
        return LieElt(self.degree, {k: -v for k, v in self.coords.items()})

    def __sub__(self, other: "LieElt") -> "LieElt":
        return self + (-other)

    def scale(self, c) -> "LieElt":
        c = _frac(c)
        return LieElt(self.degree, {k: c * v for k, v in self.coords.items()})

    def __eq__(self, other):
        if not isinstance(other, LieElt):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        return self.degree == other.degree and self.coords == other.coords

    def __hash__(self):
        return hash((self.degree, tuple(sorted(self.coords.items()))))

    def tojson(self) -> dict[str, str]:
        return {k: _render(v) for k, v in sorted(self.coords.items())}

    def __repr__(self):
        body = " + ".join(f"{_render(v)}*{k}" for k, v in sorted(self.coords.items())) or "0"
        return f"LieElt({self.degree}: {body})"


def _render(x: Fraction) -> str:
    x = _frac(x)
    return f"{x.numerator}/{x.denominator}"


def _parse_frac(s: str) -> Fraction:
    num, _, den = s.partition("/")
    return Fraction(int(num), int(den or 1))


def degrees_up_to(n: int, N: int, box: Sequence[int] | None = None) -> list[RootVec]:
    """Nonzero points of Q+ with height <= N, sorted by height then coords."""
    out = []
    for h in range(1, N + 1):
        for comp in _compositions(h, n):
            if box is None or all(c <= b for c, b in zip(comp, box)):
                out.append(RootVec(comp))
    return out


def _compositions(h: int, n: int) -> Iterator[tuple[int, ...]]:
    if n == 1:
        yield (h,)
        return
    for first in range(h + 1):
        for rest in _compositions(h - first, n - 1):
            yield (first,) + rest


# ------------------------------------------------------------------ free side


class _Component:
    """Free Lie data and quotient data for one alive multidegree."""

    __slots__ = ("words", "index", "urows", "pivots", "red", "basis", "ideal")

    def __init__(self, words):
        self.words: list[tuple[int, ...]] = words
        self.index = {w: k for k, w in enumerate(words)}
        self.urows: list[dict[int, int]] = []
        self.pivots: dict[int, dict[int, Fraction]] = {}
        self.basis: list[int] = []
        self.ideal: list[dict[int, int]] = []


class _FreeBuilder:
    def __init__(self, G: Gcm, N: int, box):
        self.G = G
        self.N = N
        self.n = G.size
        self.box = box
        self.polys = lyndon.StandardPolys()
        self.comps: dict[RootVec, _Component] = {}
        self.dead: set[RootVec] = set()

    # restriction of a Lie polynomial, given by a coefficient function, to Lyndon positions
    def _to_lyndon(self, comp: _Component, restr: Sequence[int]) -> list[int]:
        """Solve c U = r for the Lyndon coordinates c (U is unitriangular)."""
        res = list(restr)
        for k, row in enumerate(comp.urows):
            ck = res[k]
            if ck:
                for j, u in row.items():
                    res[j] -= ck * u
        return res

    def _setup(self, beta: RootVec) -> _Component:
        comp = _Component(lyndon.lyndon_words(beta.coords))
        for w in comp.words:
            p = self.polys(w)
            row = {}
            for j in range(comp.index[w] + 1, len(comp.words)):
                v = p.get(comp.words[j])
                if v:
                    row[j] = v
            comp.urows.append(row)
        return comp

    def _bracket_restr(self, comp: _Component, u, v) -> list[int]:
        """Restriction of [P_u, P_v] to the Lyndon words of comp."""
        pu, pv = self.polys(u), self.polys(v)
        lu, lv = len(u), len(v)
        out = []
        for w in comp.words:
            x = pu.get(w[:lu], 0)
            if x:
                x *= pv.get(w[lu:], 0)
            y = pv.get(w[:lv], 0)
            if y:
                y *= pu.get(w[lv:], 0)
            out.append(x - y)
        return out

    def _ad_generator_rows(self, i: int, gamma: RootVec, comp: _Component) -> list[dict[int, int]]:
        """Lyndon-position restriction of [e_i, P_w] for every Lyndon w of degree gamma."""
        words = self.comps[gamma].words if gamma in self.comps else lyndon.lyndon_words(gamma.coords)
        rows = []
        for w in words:
            p = self.polys(w)
            row = {}
            for k, x in enumerate(comp.words):
                val = 0
                if x[0] == i:
                    val += p.get(x[1:], 0)
                if x[-1] == i:
                    val -= p.get(x[:-1], 0)
                if val:
                    row[k] = val
            rows.append(row)
        return rows

    def _serre_poly(self, i: int, j: int) -> lyndon.Poly:
        p = {(j,): 1}
        for _ in range(1 - self.G[i, j]):
            p = lyndon.poly_bracket({(i,): 1}, p)
        return p

    def build(self, algebra: "GradedAlgebra"):
        G, n = self.G, self.n
        serre_at: dict[RootVec, list[tuple[int, int]]] = {}
        for i in range(n):
            for j in range(n):
                if i != j:
                    deg = simple_root(n, i).scale(1 - G[i, j]) + simple_root(n, j)
                    serre_at.setdefault(deg, []).append((i, j))
        for beta in degrees_up_to(n, self.N, self.box):
            h = beta.height
            if h == 1:
                comp = self._setup(beta)
                comp.basis = [0]
                self.comps[beta] = comp
                algebra._set_degree(beta, [comp.words[0]], 1, 0)
                continue
            preds = [i for i in range(n) if beta[i] > 0 and (beta - simple_root(n, i)).height > 0]
            alive_preds = [i for i in preds if (beta - simple_root(n, i)) in self.comps]
            if not alive_preds:
                self.dead.add(beta)
                free = lyndon.witt_dimension(beta.coords)
                algebra._set_degree(beta, [], free, free)
                continue
            comp = self._setup(beta)
            f = len(comp.words)
            ech = IncrementalEchelon()
            kept: list[list[int]] = []

            def offer(restr):
                if ech.add(dict(enumerate(restr))):
                    kept.append(list(restr))

            for i, j in serre_at.get(beta, []):
                p = self._serre_poly(i, j)
                offer([p.get(w, 0) for w in comp.words])
            for i in preds:
                if len(ech) == f:
                    break
                gamma = beta - simple_root(n, i)
                rows = self._ad_generator_rows(i, gamma, comp)
                if gamma in self.dead:
                    sources = [{k: 1} for k in range(len(rows))]
                else:
                    sources = self.comps[gamma].ideal
                for c in sources:
                    acc = [0] * f
                    for k, ck in c.items():
                        for j2, v in rows[k].items():
                            acc[j2] += ck * v
                    offer(acc)
                    if len(ech) == f:
                        break
            self._finish(beta, comp, kept)
            dim = len(comp.basis)
            if dim == 0:
                self.dead.add(beta)
                algebra._set_degree(beta, [], f, f)
                continue
            self.comps[beta] = comp
            algebra._set_degree(beta, [comp.words[k] for k in comp.basis], f, f - dim)

    def _finish(self, beta, comp: _Component, kept: list[list[int]]):
        f = len(comp.words)
        if not kept:
            comp.basis = list(range(f))
            return
        # pivots on the largest Lyndon words leave the lex-least complement
        ech = IncrementalEchelon(pivot="max")
        for r in kept:
            ech.add(dict(enumerate(self._to_lyndon(comp, r))))
        reduced = ech.rref()
        comp.basis = [k for k in range(f) if k not in reduced]
        for pc, full in reduced.items():
            comp.pivots[pc] = {k: v for k, v in full.items() if k != pc}
            comp.ideal.append(dict(zip(*_int_sparse(full))))

    def quotient_coords(self, beta: RootVec, restr: Sequence[int]) -> dict[int, Fraction]:
        comp = self.comps[beta]
        c = self._to_lyndon(comp, restr)
        out = {k: Fraction(c[k]) for k in comp.basis if c[k]}
        for p, row in comp.pivots.items():
            cp = c[p]
            if cp:
                for k, v in row.items():
                    out[k] = out.get(k, 0) - cp * v
        return {k: v for k, v in out.items() if v}

    def bracket(self, u, v, beta: RootVec) -> dict[tuple, Fraction]:
        comp = self.comps[beta]
        restr = self._bracket_restr(comp, u, v)
        return {comp.words[k]: val for k, val in self.quotient_coords(beta, restr).items()}


def _int_sparse(row: dict[int, Fraction]):
    keys = sorted(row)
    vals = qlinalg.primitive([row[k] for k in keys]) if keys else []
    return keys, vals


# ------------------------------------------------------------------ algebra


class GradedAlgebra:
    """Truncated quotient ñ+(<= N): bases per degree and structure constants.

    Instances are immutable once built.  Structure constants are filled in
    lazily under a lock, so concurrent readers only ever see complete entries.
    """

    def __init__(self, G: Gcm, N: int, box=None):
        self.gcm = G
        self.height_cap = N
        self.box = tuple(box) if box is not None else None
        self.n = G.size
        self.basis: dict[RootVec, tuple[str, ...]] = {}
        self.free_dims: dict[RootVec, int] = {}
        self.ideal_dims: dict[RootVec, int] = {}
        self.label_degree: dict[str, RootVec] = {}
        self.label_pos: dict[str, int] = {}
        self._brackets: dict[tuple[str, str], dict[str, Fraction]] = {}
        self._lock = threading.Lock()
        self._builder: _FreeBuilder | None = None
        self._complete_table = False
        self._decomp: dict[str, list[tuple[int, LieElt]]] = {}

    def _set_degree(self, beta: RootVec, words, free_dim: int, ideal_dim: int):
        labels = tuple(lyndon.word_label(w) for w in words)
        self.basis[beta] = labels
        self.free_dims[beta] = free_dim
        self.ideal_dims[beta] = ideal_dim
        for k, lab in enumerate(labels):
            self.label_degree[lab] = beta
            self.label_pos[lab] = k

    # -- queries

    def in_range(self, beta: RootVec) -> bool:
        if beta.height > self.height_cap:
            return False
        return self.box is None or all(c <= b for c, b in zip(beta.coords, self.box))

    def mult(self, beta: RootVec) -> int:
        beta = RootVec(beta)
        if not beta.is_positive():
            return 0
        if not self.in_range(beta):
            raise HeightOverflow(f"degree {beta} lies beyond the truncation (N={self.height_cap})")
        return len(self.basis[beta])

    def degrees(self, alive_only: bool = True) -> list[RootVec]:
        ds = [b for b in self.basis if not alive_only or self.basis[b]]
        return sorted(ds, key=RootVec.sort_key)

    def dims_by_height(self) -> list[int]:
        out = [0] * self.height_cap
        for b, labels in self.basis.items():
            out[b.height - 1] += len(labels)
        return out

    def generator(self, i: int) -> LieElt:
        beta = simple_root(self.n, i)
        return LieElt(beta, {self.basis[beta][0]: 1})

    def basis_elt(self, label: str) -> LieElt:
        return LieElt(self.label_degree[label], {label: 1})

    def basis_elts(self, beta: RootVec) -> list[LieElt]:
        return [self.basis_elt(lab) for lab in self.basis.get(beta, ())]

    def zero(self, beta: RootVec) -> LieElt:
        return LieElt(beta, {})

    def vector(self, x: LieElt) -> list[Fraction]:
        """Coordinates of x against the ordered basis of its degree."""
        labels = self.basis.get(x.degree, ())
        return [x.coords.get(lab, Fraction(0)) for lab in labels]

    def from_vector(self, beta: RootVec, vec: Sequence) -> LieElt:
        labels = self.basis.get(beta, ())
        return LieElt(beta, {lab: v for lab, v in zip(labels, vec)})

    # -- brackets

    def bracket_labels(self, u: str, v: str) -> dict[str, Fraction]:
        if u == v:
            return {}
        key, sign = ((u, v), 1) if self._order(u) < self._order(v) else ((v, u), -1)
        hit = self._brackets.get(key)
        if hit is None:
            beta = self.label_degree[u] + self.label_degree[v]
            if not self.in_range(beta):
                raise HeightOverflow(f"[{u},{v}] has degree {beta} beyond the truncation")
            with self._lock:
                hit = self._brackets.get(key)
                if hit is None:
                    hit = self._compute_bracket(key[0], key[1], beta)
                    self._brackets[key] = hit
        if sign == 1:
            return hit
        return {k: -c for k, c in hit.items()}

    def _order(self, lab: str):
        return (self.label_degree[lab].sort_key(), lab)

    def _compute_bracket(self, u: str, v: str, beta: RootVec) -> dict[str, Fraction]:
        if not self.basis.get(beta):
            return {}
        if self._builder is None:
            if self._complete_table:
                return {}
            raise RuntimeError("structure constants unavailable")
        raw = self._builder.bracket(lyndon.label_word(u), lyndon.label_word(v), beta)
        return {lyndon.word_label(w): c for w, c in raw.items()}

    def bracket(self, x: LieElt, y: LieElt, truncate: bool = False) -> LieElt:
        beta = x.degree + y.degree
        if x.is_zero() or y.is_zero():
            return LieElt(beta, {})
        if not self.in_range(beta):
            if truncate:
                return LieElt(beta, {})
            raise HeightOverflow(f"bracket degree {beta} exceeds the truncation")
        out: dict[str, Fraction] = {}
        for u, a in x.coords.items():
            for v, b in y.coords.items():
                for k, c in self.bracket_labels(u, v).items():
                    out[k] = out.get(k, 0) + a * b * c
        return LieElt(beta, out)

    def ad_power(self, x: LieElt, k: int, y: LieElt) -> LieElt:
        for _ in range(k):
            y = self.bracket(x, y)
        return y

    def all_brackets(self) -> dict[tuple[str, str], dict[str, Fraction]]:
        """Every structure constant with combined height within range."""
        labels = sorted(self.label_degree, key=self._order)
        for a, u in enumerate(labels):
            for v in labels[a + 1 :]:
                if self.in_range(self.label_degree[u] + self.label_degree[v]):
                    self.bracket_labels(u, v)
        return {k: v for k, v in self._brackets.items() if v}

    # -- generation by the e_i

    def decompose(self, label: str) -> list[tuple[int, LieElt]]:
        """Write a basis element of height >= 2 as sum_i [e_i, z_i]."""
        hit = self._decomp.get(label)
        if hit is not None:
            return hit
        beta = self.label_degree[label]
        cols, owners = [], []
        for i in range(self.n):
            gamma = beta - simple_root(self.n, i)
            if not gamma.is_positive():
                continue
            for b in self.basis_elts(gamma):
                img = self.bracket(self.generator(i), b)
                cols.append(self.vector(img))
                owners.append((i, b))
        target = [Fraction(int(lab == label)) for lab in self.basis[beta]]
        M = QMatrix([[c[r] for c in cols] for r in range(len(target))])
        sol = qlinalg.solve(M, target)
        parts: dict[int, LieElt] = {}
        for s, (i, b) in zip(sol, owners):
            if s:
                z = b.scale(s)
                parts[i] = parts[i] + z if i in parts else z
        out = sorted(parts.items())
        with self._lock:
            self._decomp[label] = out
        return out

    # -- persistence

    def to_json(self) -> dict:
        dims = {_key(b): len(self.basis[b]) for b in sorted(self.basis, key=RootVec.sort_key)}
        basis = {_key(b): list(self.basis[b]) for b in sorted(self.basis, key=RootVec.sort_key) if self.basis[b]}
        brackets = {}
        for (u, v), val in sorted(self.all_brackets().items(), key=lambda kv: (self._order(kv[0][0]), self._order(kv[0][1]))):
            brackets[f"({u},{v})"] = {k: _render(c) for k, c in sorted(val.items())}
        out = {
            "version": 1,
            "gcm": self.gcm.tolist(),
            "height": self.height_cap,
            "dims": dims,
            "basis": basis,
            "free_dims": {_key(b): self.free_dims[b] for b in sorted(self.basis, key=RootVec.sort_key)},
            "brackets": brackets,
        }
        if self.box is not None:
            out["box"] = list(self.box)
        return out

    @classmethod
    def from_json(cls, data: dict, check: bool = True) -> "GradedAlgebra":
        if data.get("version") != 1:
            raise CacheError(f"unsupported cache version {data.get('version')!r}")
        try:
            G = validate_gcm(data["gcm"])
            alg = cls(G, int(data["height"]), data.get("box"))
            basis = data.get("basis", {})
            for key in data["dims"]:
                beta = RootVec(_unkey(key))
                labels = basis.get(key, [])
                if len(labels) != data["dims"][key]:
                    raise CacheError(f"dimension mismatch at {key}")
                words = [lyndon.label_word(s) for s in labels]
                free = data.get("free_dims", {}).get(key, lyndon.witt_dimension(beta.coords))
                alg._set_degree(beta, words, free, free - len(words))
            for key, val in data["brackets"].items():
                u, v = key.strip("()").split(",")
                alg._brackets[(u, v)] = {k: _parse_frac(c) for k, c in val.items()}
        except (KeyError, ValueError, TypeError) as exc:
            if isinstance(exc, CacheError):
                raise
            raise CacheError(f"malformed cache: {exc}") from exc
        alg._complete_table = True
        if check:
            problems = check_invariants(alg)
            if problems:
                raise CacheError("cache failed validation: " + "; ".join(problems[:3]))
        return alg

    def __repr__(self):
        return f"GradedAlgebra({self.gcm.tolist()}, N={self.height_cap}, dims={self.dims_by_height()})"


class CacheError(ValueError):
    pass


def _key(b: RootVec) -> str:
    return "[" + ",".join(str(c) for c in b.coords) + "]"


def _unkey(s: str) -> list[int]:
    return [int(t) for t in s.strip("[]").split(",")]


def build_nilradical(G, N: int, box: Sequence[int] | None = None) -> GradedAlgebra:
    """Build ñ+ truncated at height N (optionally also at coordinates <= box)."""
    G = G if isinstance(G, Gcm) else validate_gcm(G)
    if N < G.max_serre_height():
        raise CapTooSmall(f"N={N} is below the largest Serre height {G.max_serre_height()}")
    alg = GradedAlgebra(G, N, box)
    builder = _FreeBuilder(G, N, alg.box)
    builder.build(alg)
    alg._builder = builder
    return alg


def bracket(alg: GradedAlgebra, x: LieElt, y: LieElt) -> LieElt:
    return alg.bracket(x, y)


def mult(alg: GradedAlgebra, beta) -> int:
    return alg.mult(RootVec(beta))


def serre_element(alg: GradedAlgebra, i: int, j: int) -> LieElt:
    return alg.ad_power(alg.generator(i), 1 - alg.gcm[i, j], alg.generator(j))


def check_invariants(alg: GradedAlgebra, jacobi: bool = True) -> list[str]:
    """Generator dims, Serre vanishing, antisymmetry and Jacobi on basis triples."""
    problems = []
    n, G = alg.n, alg.gcm
    for i in range(n):
        if alg.mult(simple_root(n, i)) != 1:
            problems.append(f"generator degree {i} has dim != 1")
    for i in range(n):
        for j in range(n):
            if i != j and 2 - G[i, j] <= alg.height_cap:
                deg = simple_root(n, i).scale(1 - G[i, j]) + simple_root(n, j)
                if alg.in_range(deg) and not serre_element(alg, i, j).is_zero():
                    problems.append(f"Serre element ({i},{j}) is nonzero")
    labels = sorted(alg.label_degree, key=alg._order)
    for u in labels:
        for v in labels:
            if alg.in_range(alg.label_degree[u] + alg.label_degree[v]):
                a = alg.bracket_labels(u, v)
                b = alg.bracket_labels(v, u)
                if {k: -c for k, c in b.items()} != a:
                    problems.append(f"antisymmetry fails for ({u},{v})")
    if jacobi:
        for x, y, z in jacobi_failures(alg):
            problems.append(f"Jacobi fails for ({x},{y},{z})")
    return problems


def jacobi_failures(alg: GradedAlgebra, limit: int | None = None) -> list[tuple[str, str, str]]:
    labels = sorted(alg.label_degree, key=alg._order)
    bad = []
    for a, x in enumerate(labels):
        for b in range(a + 1, len(labels)):
            y = labels[b]
            for z in labels[b + 1 :]:
                deg = alg.label_degree[x] + alg.label_degree[y] + alg.label_degree[z]
                if not alg.in_range(deg):
                    continue
                X, Y, Z = alg.basis_elt(x), alg.basis_elt(y), alg.basis_elt(z)
                s = alg.bracket(X, alg.bracket(Y, Z)) + alg.bracket(Y, alg.bracket(Z, X)) + alg.bracket(Z, alg.bracket(X, Y))
                if not s.is_zero():
                    bad.append((x, y, z))
                    if limit and len(bad) >= limit:
                        return bad
    return bad


# ------------------------------------------------------------------ Borel


@dataclass(frozen=True)
class BorelElt:
    """h-part (coordinates in the chosen basis of h) plus one homogeneous nil part."""

    h: tuple[Fraction, ...]
    x: LieElt

    @property
    def degree(self) -> RootVec:
        return self.x.degree

    def is_zero(self) -> bool:
        return not any(self.h) and self.x.is_zero()


class BorelAlgebra:
    """b+(<= N) = h + ñ+(<= N) for a realization of A.

    The basis of h is alpha_0^vee, ..., alpha_l^vee followed by m' extra
    vectors d_k, each dual to one simple root chosen greedily so that the
    simple roots become linearly independent on h.
    """

    def __init__(self, nil: GradedAlgebra):
        self.nil = nil
        G = nil.gcm
        n = G.size
        A = QMatrix(G.tolist())
        m = qlinalg.rank(A)
        rows = [list(G.entries[a]) for a in range(n)]  # alpha_j(alpha_a^vee) = a_aj
        extras = []
        for j in range(n):
            if qlinalg.rank(QMatrix(rows)) == n:
                break
            cand = rows + [[int(k == j) for k in range(n)]]
            if qlinalg.rank(QMatrix(cand)) > qlinalg.rank(QMatrix(rows)):
                rows = cand
                extras.append(j)
        self.rank_A = m
        self.extra_indices = tuple(extras)
        self.h_dim = len(rows)
        assert self.h_dim == 2 * n - m
        # pairing[a][j] = alpha_j(h_a)
        self.pairing = QMatrix(rows)
        ker = qlinalg.kernel_basis(A.transpose())
        self.center_basis = [tuple(Fraction(x) for x in v) + (Fraction(0),) * len(extras) for v in ker]
        self.dual_basis = [tuple(qlinalg.solve(self.pairing.transpose(), [Fraction(int(k == i)) for k in range(n)])) for i in range(n)]

    @property
    def gcm(self) -> Gcm:
        return self.nil.gcm

    @property
    def center_dim(self) -> int:
        return len(self.center_basis)

    def root_value(self, beta: RootVec, h: Sequence) -> Fraction:
        """beta(h) for h given in the basis of h."""
        n = self.nil.n
        total = Fraction(0)
        for a, ha in enumerate(h):
            if ha:
                total += ha * sum(beta[j] * self.pairing[a, j] for j in range(n))
        return total

    def h_unit(self, a: int) -> tuple[Fraction, ...]:
        return tuple(Fraction(int(k == a)) for k in range(self.h_dim))

    def bracket(self, u: BorelElt, v: BorelElt) -> BorelElt:
        """[u, v] in b+; the result is purely nilpotent (h is abelian)."""
        parts = self.nil.bracket(u.x, v.x) if not (u.x.is_zero() or v.x.is_zero()) else None
        res = []
        if parts is not None and not parts.is_zero():
            res.append(parts)
        if not v.x.is_zero() and any(u.h):
            res.append(v.x.scale(self.root_value(v.degree, u.h)))
        if not u.x.is_zero() and any(v.h):
            res.append(u.x.scale(-self.root_value(u.degree, v.h)))
        zero_h = (Fraction(0),) * self.h_dim
        if not res:
            deg = u.degree + v.degree
            return BorelElt(zero_h, LieElt(deg, {}))
        total = res[0]
        for r in res[1:]:
            total = total + r
        return BorelElt(zero_h, total)


def build_borel(G, N: int, box=None) -> BorelAlgebra:
    return BorelAlgebra(build_nilradical(G, N, box))


# ------------------------------------------------------------------ oracle


def peterson_mult_oracle(G, beta, _memo=None) -> int:
    """Root multiplicity from the Peterson recurrence, with exact rationals.

    (beta | beta - 2 rho) c_beta = sum_{b' + b'' = beta} (b'|b'') c_b' c_b'',
    where c_beta = sum_{k >= 1} mult(beta / k) / k.  When the left coefficient
    vanishes for a non-simple beta, beta is not a root: along any chain of
    simple reflections from a simple root the coefficient strictly increases
    for real roots, and it is positive for imaginary ones.
    """
    G = G if isinstance(G, Gcm) else validate_gcm(G)
    d = symmetrizer(G)  # raises NotSymmetrizable
    n = G.size
    beta = RootVec(beta)
    if not beta.is_positive():
        return 0
    B = [[d[i] * G[i, j] for j in range(n)] for i in range(n)]

    def form(x, y):
        return sum(x[i] * B[i][j] * y[j] for i in range(n) if x[i] for j in range(n) if y[j])

    cvals: dict[tuple, Fraction] = {}
    mults: dict[tuple, int] = {}
    boxes = sorted(itertools.product(*(range(c + 1) for c in beta.coords)), key=lambda t: (sum(t), t))
    for gamma in boxes:
        if sum(gamma) == 0:
            continue
        g = RootVec(gamma)
        lower = Fraction(0)
        for k in range(2, max(gamma) + 1):
            if all(c % k == 0 for c in gamma):
                lower += Fraction(mults[tuple(c // k for c in gamma)], k)
        if sum(gamma) == 1:
            mults[gamma], cvals[gamma] = 1, Fraction(1)
            continue
        coef = form(gamma, gamma) - 2 * sum(gamma[i] * d[i] for i in range(n))
        rhs = Fraction(0)
        for part in itertools.product(*(range(c + 1) for c in gamma)):
            if sum(part) == 0 or part == gamma:
                continue
            other = tuple(a - b for a, b in zip(gamma, part))
            c1, c2 = cvals[part], cvals[other]
            if c1 and c2:
                rhs += form(part, other) * c1 * c2
        if coef == 0:
            assert rhs == 0, (gamma, rhs)
            m = Fraction(0)
        else:
            m = rhs / coef - lower
        if m.denominator != 1 or m < 0:
            raise ArithmeticError(f"Peterson recurrence produced non-integral multiplicity {m} at {gamma}")
        mults[gamma] = int(m)
        cvals[gamma] = m + lower
    return mults[beta.coords]

"""Automorphisms of the truncations ñ+(<= N) and b+(<= N).

Elements are handled inhomogeneously: basis labels are unique across degrees,
so an element of ñ+(<= N) is a dict label -> coefficient, and an element of
b+(<= N) is a pair (h-coordinates, such a dict).  A TruncMap stores the image
of every basis vector.  Brackets computed here drop components above the
truncation, which is the bracket of the quotient by the ideal of larger
heights.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Sequence

from . import qlinalg
from .gcm import diagram_automorphisms
from .liealg import BorelAlgebra, GradedAlgebra, LieElt, build_nilradical
from .qlinalg import QMatrix
from .roots import RootVec, simple_root

__all__ = [
    "TruncMap",
    "AutCheck",
    "ZeroTorusEntry",
    "NotDiagramAutomorphism",
    "NotInvertible",
    "identity_map",
    "torus_action",
    "exp_ad",
    "exp_map",
    "diagram_lift",
    "homomorphism_from_generators",
    "derivation_map",
    "gamma0_borel",
    "is_automorphism",
    "heisenberg_aut_check",
    "compose",
]


class ZeroTorusEntry(ValueError):
    pass


class NotDiagramAutomorphism(ValueError):
    pass


class NotInvertible(ValueError):
    pass


Vec = dict  # label -> Fraction


def _clean(v: Vec) -> Vec:
    return {k: Fraction(c) for k, c in v.items() if c}


def _add(a: Vec, b: Vec, s=1) -> Vec:
    out = dict(a)
    for k, c in b.items():
        out[k] = out.get(k, 0) + s * c
    return _clean(out)


def _scale(a: Vec, s) -> Vec:
    return _clean({k: s * c for k, c in a.items()})


def _homogeneous_parts(alg: GradedAlgebra, v: Vec) -> dict[RootVec, LieElt]:
    parts: dict[RootVec, dict] = {}
    for k, c in v.items():
        parts.setdefault(alg.label_degree[k], {})[k] = c
    return {d: LieElt(d, cs) for d, cs in parts.items()}


def nil_bracket(alg: GradedAlgebra, u: Vec, v: Vec) -> Vec:
    """Bracket of inhomogeneous elements, dropping degrees beyond the truncation."""
    out: Vec = {}
    for du, pu in _homogeneous_parts(alg, u).items():
        for dv, pv in _homogeneous_parts(alg, v).items():
            if alg.in_range(du + dv):
                out = _add(out, dict(alg.bracket(pu, pv).coords))
    return out


@dataclass(frozen=True)
class BElt:
    """Element of b+(<= N); ``h`` is empty when working in ñ+ alone."""

    h: tuple[Fraction, ...]
    x: Vec

    def __add__(self, o: "BElt") -> "BElt":
        return BElt(tuple(a + b for a, b in zip(self.h, o.h)), _add(self.x, o.x))

    def scale(self, s) -> "BElt":
        return BElt(tuple(s * a for a in self.h), _scale(self.x, s))

    def __eq__(self, o):
        return isinstance(o, BElt) and tuple(self.h) == tuple(o.h) and _clean(self.x) == _clean(o.x)

    def __hash__(self):
        return hash((self.h, tuple(sorted(self.x.items()))))

    def tojson(self) -> dict:
        out = {k: f"{c.numerator}/{c.denominator}" for k, c in sorted(self.x.items())}
        for a, c in enumerate(self.h):
            if c:
                out[f"h{a}"] = f"{c.numerator}/{c.denominator}"
        return out


class _Space:
    """The vector space a TruncMap acts on: ñ+(<= N) or b+(<= N)."""

    def __init__(self, alg: GradedAlgebra, bor: BorelAlgebra | None = None):
        self.alg = alg
        self.bor = bor
        self.hd = bor.h_dim if bor is not None else 0
        self.labels = [lab for d in alg.degrees() for lab in alg.basis[d]]
        self.h_labels = [f"h{a}" for a in range(self.hd)]

    def zero(self) -> BElt:
        return BElt((Fraction(0),) * self.hd, {})

    def basis(self) -> list[tuple[str, BElt]]:
        out = []
        for a in range(self.hd):
            out.append((self.h_labels[a], BElt(tuple(Fraction(int(k == a)) for k in range(self.hd)), {})))
        for lab in self.labels:
            out.append((lab, BElt((Fraction(0),) * self.hd, {lab: Fraction(1)})))
        return out

    def vector(self, v: BElt) -> list[Fraction]:
        return list(v.h) + [v.x.get(lab, Fraction(0)) for lab in self.labels]

    def bracket(self, u: BElt, v: BElt) -> BElt:
        x = nil_bracket(self.alg, u.x, v.x)
        if self.bor is not None:
            for lab, c in v.x.items():
                val = self.bor.root_value(self.alg.label_degree[lab], u.h)
                if val:
                    x = _add(x, {lab: c * val})
            for lab, c in u.x.items():
                val = self.bor.root_value(self.alg.label_degree[lab], v.h)
                if val:
                    x = _add(x, {lab: -c * val})
        return BElt((Fraction(0),) * self.hd, x)


@dataclass
class TruncMap:
    """Linear map on ñ+(<= N) or b+(<= N) given by the images of basis vectors."""

    alg: GradedAlgebra
    images: dict[str, BElt]
    bor: BorelAlgebra | None = None
    note: str = ""

    @property
    def space(self) -> _Space:
        return _Space(self.alg, self.bor)

    def __call__(self, v: BElt | LieElt) -> BElt:
        if isinstance(v, LieElt):
            v = BElt((Fraction(0),) * (self.bor.h_dim if self.bor else 0), dict(v.coords))
        out = self.space.zero()
        for a, c in enumerate(v.h):
            if c:
                out = out + self.images[f"h{a}"].scale(c)
        for lab, c in v.x.items():
            out = out + self.images[lab].scale(c)
        return out

    def matrix(self) -> QMatrix:
        """Columns are images of the basis (h first, then nil by degree)."""
        sp = self.space
        cols = [sp.vector(self.images[lab]) for lab, _ in sp.basis()]
        return QMatrix([[c[r] for c in cols] for r in range(len(cols))])

    def __eq__(self, other):
        return isinstance(other, TruncMap) and self.images.keys() == other.images.keys() and all(
            self.images[k] == other.images[k] for k in self.images
        )

    def degree_block(self, beta: RootVec) -> QMatrix:
        """Component of the map from degree beta to degree beta."""
        labels = self.alg.basis.get(beta, ())
        return QMatrix([[self.images[c].x.get(r, Fraction(0)) for c in labels] for r in labels])


def compose(f: TruncMap, g: TruncMap) -> TruncMap:
    """f after g."""
    return TruncMap(f.alg, {k: f(v) for k, v in g.images.items()}, f.bor)


def identity_map(alg: GradedAlgebra, bor: BorelAlgebra | None = None) -> TruncMap:
    return TruncMap(alg, {lab: v for lab, v in _Space(alg, bor).basis()}, bor)


def torus_action(alg: GradedAlgebra, t: Sequence, bor: BorelAlgebra | None = None) -> TruncMap:
    t = [Fraction(x) for x in t]
    if any(x == 0 for x in t):
        raise ZeroTorusEntry("torus entries must be nonzero")
    sp = _Space(alg, bor)
    images = {}
    for lab, v in sp.basis():
        if lab.startswith("h"):
            images[lab] = v
            continue
        beta = alg.label_degree[lab]
        s = Fraction(1)
        for ti, bi in zip(t, beta.coords):
            s *= ti**bi
        images[lab] = v.scale(s)
    return TruncMap(alg, images, bor)


def exp_map(f_images: dict[str, BElt], alg: GradedAlgebra, bor=None) -> TruncMap:
    """exp of a nilpotent linear map given by basis images."""
    sp = _Space(alg, bor)
    nil = TruncMap(alg, f_images, bor)
    images = {}
    limit = len(sp.labels) + sp.hd + 1
    for lab, v in sp.basis():
        total, term = v, v
        for k in range(1, limit + 1):
            term = nil(term).scale(Fraction(1, k))
            if not any(term.h) and not term.x:
                break
            total = total + term
        else:
            raise ValueError("map is not nilpotent")
        images[lab] = total
    return TruncMap(alg, images, bor)


def _ad_images(alg: GradedAlgebra, x: BElt, bor=None) -> dict[str, BElt]:
    sp = _Space(alg, bor)
    return {lab: sp.bracket(x, v) for lab, v in sp.basis()}


def exp_ad(alg: GradedAlgebra, x: LieElt, bor: BorelAlgebra | None = None) -> TruncMap:
    """exp(ad x) for x of positive degree; a finite sum since ad x raises height."""
    if not x.is_zero() and not x.degree.is_positive():
        raise ValueError("exp_ad needs an element of positive degree")
    hd = bor.h_dim if bor else 0
    xb = BElt((Fraction(0),) * hd, dict(x.coords))
    return exp_map(_ad_images(alg, xb, bor), alg, bor)


def homomorphism_from_generators(alg: GradedAlgebra, gen_images: Sequence[Vec]) -> TruncMap:
    """The truncated homomorphism with e_i -> gen_images[i].

    Higher basis vectors are written as sum_i [e_i, z_i] and mapped to
    sum_i [phi(e_i), phi(z_i)].  This is well defined exactly when the
    images satisfy the Serre relations modulo the truncation.
    """
    images: dict[str, Vec] = {}
    for d in alg.degrees():
        for lab in alg.basis[d]:
            if d.height == 1:
                images[lab] = _clean(gen_images[d.coords.index(1)])
                continue
            acc: Vec = {}
            for i, z in alg.decompose(lab):
                phz: Vec = {}
                for k, c in z.coords.items():
                    phz = _add(phz, _scale(images[k], c))
                acc = _add(acc, nil_bracket(alg, images[alg.basis[simple_root(alg.n, i)][0]], phz))
            images[lab] = acc
    return TruncMap(alg, {k: BElt((), v) for k, v in images.items()})


def diagram_lift(alg: GradedAlgebra, sigma: Sequence[int]) -> TruncMap:
    sigma = tuple(sigma)
    if sigma not in set(diagram_automorphisms(alg.gcm)):
        raise NotDiagramAutomorphism(f"{sigma} does not preserve the matrix")
    n = alg.n
    gens = [{alg.basis[simple_root(n, sigma[i])][0]: Fraction(1)} for i in range(n)]
    return homomorphism_from_generators(alg, gens)


def derivation_map(alg: GradedAlgebra, d) -> TruncMap:
    """A derivation of ñ+ (from deriv) as a linear map on the truncation."""
    from .deriv import apply_derivation

    images = {}
    memo: dict = {}
    for deg in alg.degrees():
        for lab in alg.basis[deg]:
            target = deg + d.degree
            if target.is_positive() and not alg.in_range(target):
                images[lab] = BElt((), {})
                continue
            images[lab] = BElt((), dict(apply_derivation(alg, d, alg.basis_elt(lab), memo).coords))
    return TruncMap(alg, images)


def gamma0_borel(bor: BorelAlgebra, phi: Sequence[Sequence] | None = None, z: Sequence[Sequence] | None = None) -> TruncMap:
    """tau fixing every e_i, with tau(alpha_i^*) = alpha_i^* + z_i and tau = phi on c.

    ``phi`` is an m' x m' matrix acting on coordinates over ``bor.center_basis``
    (columns are images), and each ``z_i`` is a coordinate vector over the same
    basis.  When c = 0 only the identity qualifies and it is returned with a note.
    """
    alg = bor.alg if hasattr(bor, "alg") else bor.nil
    mp = bor.center_dim
    n, hd = alg.n, bor.h_dim
    if mp == 0:
        m = identity_map(alg, bor)
        m.note = "center is zero: only the identity qualifies"
        return m
    phi = [[Fraction(x) for x in row] for row in (phi if phi is not None else [[int(i == j) for j in range(mp)] for i in range(mp)])]
    z = [[Fraction(x) for x in zi] for zi in (z if z is not None else [[0] * mp for _ in range(n)])]
    if qlinalg.rank(QMatrix(phi)) < mp:
        raise NotInvertible("phi is not invertible on c")
    C = bor.center_basis

    def cvec(coeffs):
        return tuple(sum((coeffs[k] * C[k][a] for k in range(mp)), Fraction(0)) for a in range(hd))

    # write h_a = sum_i alpha_i(h_a) alpha_i^* + sum_k w_k c_k, then apply tau
    duals = bor.dual_basis
    cols = [list(dv) for dv in duals] + [list(c) for c in C]
    Bmat = QMatrix([[col[a] for col in cols] for a in range(hd)])
    images = {}
    for a in range(hd):
        coeff = qlinalg.solve(Bmat, [Fraction(int(k == a)) for k in range(hd)])
        out = [Fraction(0)] * hd
        for i in range(n):
            zi = cvec(z[i])
            for b in range(hd):
                out[b] += coeff[i] * (duals[i][b] + zi[b])
        w = coeff[n:]
        phw = [sum((phi[r][c] * w[c] for c in range(mp)), Fraction(0)) for r in range(mp)]
        cw = cvec(phw)
        for b in range(hd):
            out[b] += cw[b]
        images[f"h{a}"] = BElt(tuple(out), {})
    for lab, v in _Space(alg, bor).basis():
        if not lab.startswith("h"):
            images[lab] = v
    return TruncMap(alg, images, bor)


@dataclass
class AutCheck:
    ok: bool
    witness: dict | None = None

    def __bool__(self):
        return self.ok


def is_automorphism(m: TruncMap) -> AutCheck:
    """Bijectivity (per degree, then globally) and bracket preservation."""
    sp = m.space
    alg = m.alg
    blocks = []
    if sp.hd:
        blocks.append(("h", [sp.vector(m.images[h]) for h in sp.h_labels]))
    for d in alg.degrees():
        blocks.append((d, [sp.vector(m.images[lab]) for lab in alg.basis[d]]))
    for deg, vecs in blocks:
        if vecs and qlinalg.rank(QMatrix(vecs)) < len(vecs):
            return AutCheck(False, {"degree": deg if deg == "h" else deg.tojson(), "reason": "rank drop"})
    allv = [v for _, vs in blocks for v in vs]
    if allv and qlinalg.rank(QMatrix(allv)) < len(allv):
        return AutCheck(False, {"reason": "not bijective"})
    basis = sp.basis()
    for a, (l1, v1) in enumerate(basis):
        for l2, v2 in basis[a + 1 :]:
            if not l1.startswith("h") and not l2.startswith("h"):
                if not alg.in_range(alg.label_degree[l1] + alg.label_degree[l2]):
                    continue
            lhs = m(sp.bracket(v1, v2))
            rhs = sp.bracket(m(v1), m(v2))
            if lhs != rhs:
                return AutCheck(False, {"pair": [l1, l2], "lhs": lhs.tojson(), "rhs": rhs.tojson()})
    return AutCheck(True)


# ------------------------------------------------------------------ the A2 Heisenberg fixture


def _heis_map(alg, a, b) -> TruncMap:
    """Columns tau(x) = a, tau(y) = b, tau(z) = (0, 0, a1 b2 - b1 a2) on x=e0, y=e1, z=[e0,e1]."""
    x, y, zl = "0", "1", "01"
    det = a[0] * b[1] - b[0] * a[1]
    imgs = {
        x: BElt((), _clean({x: a[0], y: a[1], zl: a[2]})),
        y: BElt((), _clean({x: b[0], y: b[1], zl: b[2]})),
        zl: BElt((), _clean({zl: det})),
    }
    return TruncMap(alg, imgs)


def _as_rows(m: TruncMap, order=("0", "1", "01")) -> list[list[Fraction]]:
    """Matrix in the basis x, y, z; column k is the image of the k-th vector."""
    return [[m.images[c].x.get(r, Fraction(0)) for c in order] for r in order]


def heisenberg_aut_check(seed: int = 0, trials: int = 10) -> dict:
    rng = random.Random(seed)
    alg = build_nilradical([[2, -1], [-1, 2]], 3)
    assert alg.basis[RootVec([1, 1])] == ("01",)
    F = lambda: Fraction(rng.randint(-9, 9), rng.randint(1, 5))  # noqa: E731
    report: dict = {}

    # (1) members of the matrix set are automorphisms
    members = []
    while len(members) < trials:
        a, b = [F(), F(), F()], [F(), F(), F()]
        if a[0] * b[1] - b[0] * a[1]:
            members.append((a, b))
    report["members_are_automorphisms"] = all(bool(is_automorphism(_heis_map(alg, a, b))) for a, b in members)
    report["identity"] = bool(is_automorphism(_heis_map(alg, [1, 0, 0], [0, 1, 0])))
    report["singular_rejected"] = not is_automorphism(_heis_map(alg, [1, 2, 0], [2, 4, 0]))

    # (2) solving the bracket constraints for tau(z) lands in the set
    landed = True
    for a, b in members:
        # unknown c = tau(z); tau([x,y]) = [tau x, tau y]; [tau x, tau z] = 0; [tau y, tau z] = 0
        ax = {"0": a[0], "1": a[1], "01": a[2]}
        by = {"0": b[0], "1": b[1], "01": b[2]}
        rows, rhs = [], []
        xy = nil_bracket(alg, ax, by)
        for k, lab in enumerate(("0", "1", "01")):
            rows.append([Fraction(int(j == k)) for j in range(3)])
            rhs.append(xy.get(lab, Fraction(0)))
        for src in (ax, by):
            cols = [nil_bracket(alg, src, {lab: Fraction(1)}) for lab in ("0", "1", "01")]
            for lab in ("0", "1", "01"):
                rows.append([c.get(lab, Fraction(0)) for c in cols])
                rhs.append(Fraction(0))
        M = QMatrix(rows)
        c = qlinalg.solve(M, rhs)
        unique = not qlinalg.kernel_basis(M)
        det = a[0] * b[1] - b[0] * a[1]
        landed &= unique and list(c) == [0, 0, det]
    report["solved_maps_in_set"] = landed

    def is_set_member(rows):
        return rows[0][2] == 0 and rows[1][2] == 0 and rows[2][2] == rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0] != 0

    # (3) the displayed subgroups
    e0, e1 = alg.generator(0), alg.generator(1)
    sub = {}
    p, q = F() or Fraction(1), F() or Fraction(2)
    m = compose(exp_ad(alg, e0.scale(q)), exp_ad(alg, e1.scale(-p)))
    sub["exp_D''"] = _as_rows(m) == [[1, 0, 0], [0, 1, 0], [p, q, 1]] and is_set_member(_as_rows(m))
    m = torus_action(alg, [p, q])
    sub["torus"] = _as_rows(m) == [[p, 0, 0], [0, q, 0], [0, 0, p * q]] and bool(is_automorphism(m))
    from .deriv import Derivation

    d0 = Derivation(RootVec([-1, 1]), (e1, LieElt(RootVec([-1, 2]), {})))
    m = exp_map({k: v.scale(p) for k, v in derivation_map(alg, d0).images.items()}, alg)
    sub["exp_F_d0"] = _as_rows(m) == [[1, 0, 0], [p, 1, 0], [0, 0, 1]] and bool(is_automorphism(m))
    d1 = Derivation(RootVec([1, -1]), (LieElt(RootVec([2, -1]), {}), e0))
    m = exp_map({k: v.scale(q) for k, v in derivation_map(alg, d1).images.items()}, alg)
    sub["exp_F_d1"] = _as_rows(m) == [[1, q, 0], [0, 1, 0], [0, 0, 1]] and bool(is_automorphism(m))
    m = diagram_lift(alg, (1, 0))
    sub["aut_A"] = _as_rows(m) == [[0, 1, 0], [1, 0, 0], [0, 0, -1]] and bool(is_automorphism(m))
    sub["aut_A_order_2"] = compose(m, m) == identity_map(alg)
    report["subgroups"] = sub
    report["status"] = "pass" if all(v for k, v in report.items() if k != "subgroups") and all(sub.values()) else "fail"
    return report

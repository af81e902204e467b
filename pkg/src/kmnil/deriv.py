"""Graded derivations of ñ+ and b+.

A derivation of ñ+ is fixed by the images y_i = d(e_i), and a choice of
images extends to a derivation exactly when it kills every Serre element.
For degree beta the unknowns are the coordinates of y_i in ñ+_{beta+alpha_i},
and d((ad e_i)^{r+1} e_j) = 0 with r = -a_ij expands by the Leibniz rule into

    sum_{s=0}^{r} (ad e_i)^s [y_i, (ad e_i)^{r-s} e_j] + (ad e_i)^{r+1} y_j = 0.

This lives in degree beta + (r+1) alpha_i + alpha_j, so once the cap N covers
that height the kernel is Der(ñ+)_beta of the untruncated algebra.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from . import qlinalg
from .gcm import Affine, Finite, Indefinite, classify
from .liealg import BorelAlgebra, BorelElt, CapTooSmall, GradedAlgebra, HeightOverflow, LieElt
from .qlinalg import QMatrix
from .roots import RootVec, highest_root, reflect, simple_root

__all__ = [
    "Derivation",
    "DerivationSpace",
    "NotFiniteType",
    "NotAffineType",
    "der_space_n",
    "der_space_b",
    "candidate_degrees_n",
    "outer_finite",
    "affine_outer_check",
    "verify_moody",
    "h1_report",
    "apply_derivation",
    "inner_derivation",
    "sweep",
]


class NotFiniteType(ValueError):
    pass


class NotAffineType(ValueError):
    pass


@dataclass(frozen=True)
class Derivation:
    """A derivation given by generator images (and h images for b+)."""

    degree: RootVec
    e_images: tuple[LieElt, ...]
    h_images: tuple[BorelElt, ...] | None = None


@dataclass
class DerivationSpace:
    degree: RootVec
    basis: list[Derivation]
    inner_dim: int
    outer_dim: int
    validity_cap: int
    outer_basis: list[Derivation] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def report(self, status: str | None = None) -> dict:
        out = {"degree": self.degree.tojson(), "dim": self.dim, "inner": self.inner_dim, "outer": self.outer_dim}
        if status is not None:
            out["status"] = status
        return out


# ------------------------------------------------------------------ the nilradical


def _block_degrees(alg: GradedAlgebra, beta: RootVec) -> list[tuple[RootVec, int]]:
    n = alg.n
    out = []
    for i in range(n):
        g = beta + simple_root(n, i)
        if g.is_positive():
            if not alg.in_range(g):
                raise CapTooSmall(f"degree {g} of d(e_{i}) is beyond the truncation")
            out.append((g, alg.mult(g)))
        else:
            out.append((g, 0))
    return out


def _check_cap(alg: GradedAlgebra, beta: RootVec, sizes: Sequence[int]) -> int:
    """Every Serre constraint touching a nonempty block must be evaluable."""
    n, G = alg.n, alg.gcm
    need = 0
    for i in range(n):
        for j in range(n):
            if i != j and (sizes[i] or sizes[j]):
                deg = beta + simple_root(n, i).scale(1 - G[i, j]) + simple_root(n, j)
                need = max(need, deg.height)
                if deg.is_positive() and not alg.in_range(deg):
                    raise CapTooSmall(
                        f"constraint for ({i},{j}) at degree {beta} needs height {deg.height} > N={alg.height_cap}"
                    )
    return need


def _serre_constraint(alg: GradedAlgebra, i: int, j: int, y: Sequence[LieElt]) -> LieElt:
    G = alg.gcm
    r = -G[i, j]
    ei, ej = alg.generator(i), alg.generator(j)
    chain = [ej]
    for _ in range(r):
        chain.append(alg.bracket(ei, chain[-1]))
    total = alg.ad_power(ei, r + 1, y[j])
    for s in range(r + 1):
        term = alg.ad_power(ei, s, alg.bracket(y[i], chain[r - s]))
        total = total + term
    return total


class _System:
    """Unknown layout and constraint evaluation for Der(ñ+)_beta."""

    def __init__(self, alg: GradedAlgebra, beta: RootVec):
        self.alg = alg
        self.beta = beta
        blocks = _block_degrees(alg, beta)
        self.block_degrees = [g for g, _ in blocks]
        self.sizes = [m for _, m in blocks]
        self.offsets = [sum(self.sizes[:i]) for i in range(alg.n)]
        self.nvars = sum(self.sizes)
        self.cap_needed = _check_cap(alg, beta, self.sizes) if self.nvars else 0

    def images(self, vec: Sequence) -> tuple[LieElt, ...]:
        out = []
        for i, (g, m) in enumerate(zip(self.block_degrees, self.sizes)):
            off = self.offsets[i]
            out.append(self.alg.from_vector(g, vec[off : off + m]) if m else LieElt(g, {}))
        return tuple(out)

    def vector(self, imgs: Sequence[LieElt]) -> list[Fraction]:
        vec: list[Fraction] = []
        for i, m in enumerate(self.sizes):
            if m:
                if not imgs[i].is_zero() and imgs[i].degree != self.block_degrees[i]:
                    raise ValueError("image has the wrong degree")
                vec.extend(self.alg.vector(LieElt(self.block_degrees[i], imgs[i].coords)))
        return vec

    def pairs(self):
        n = self.alg.n
        return [(i, j) for i in range(n) for j in range(n) if i != j and (self.sizes[i] or self.sizes[j])]

    def residual(self, imgs: Sequence[LieElt]) -> list[Fraction]:
        out: list[Fraction] = []
        for i, j in self.pairs():
            val = _serre_constraint(self.alg, i, j, imgs)
            deg = self.beta + simple_root(self.alg.n, i).scale(1 - self.alg.gcm[i, j]) + simple_root(self.alg.n, j)
            if deg.is_positive():
                out.extend(self.alg.vector(LieElt(deg, val.coords)))
        return out

    def matrix(self) -> QMatrix:
        cols = []
        for k in range(self.nvars):
            unit = [Fraction(int(t == k)) for t in range(self.nvars)]
            cols.append(self.residual(self.images(unit)))
        nrows = len(cols[0]) if cols else 0
        return QMatrix([[c[r] for c in cols] for r in range(nrows)]) if nrows else QMatrix.zeros(0, self.nvars)


def _kernel(M: QMatrix, nvars: int) -> list[list[Fraction]]:
    if M.rows == 0:
        return [[Fraction(int(t == k)) for t in range(nvars)] for k in range(nvars)]
    return [[Fraction(x) for x in v] for v in qlinalg.kernel_basis(M)]


def _split(kernel, witnesses):
    """(inner rank, outer representatives among kernel vectors)."""
    inner_rank = qlinalg.rank(QMatrix(witnesses)) if witnesses else 0
    rows = list(witnesses)
    r = inner_rank
    outer = []
    for v in kernel:
        cand = rows + [v]
        rk = qlinalg.rank(QMatrix(cand))
        if rk > r:
            rows, r = cand, rk
            outer.append(v)
    return inner_rank, outer


def inner_derivation(alg: GradedAlgebra, x: LieElt) -> Derivation:
    """ad x, recorded by its generator images [x, e_i]."""
    imgs = tuple(alg.bracket(x, alg.generator(i)) for i in range(alg.n))
    return Derivation(x.degree, imgs)


def der_space_n(alg: GradedAlgebra, beta) -> DerivationSpace:
    beta = RootVec(beta)
    n = alg.n
    sysm = _System(alg, beta)
    if sysm.nvars == 0:
        return DerivationSpace(beta, [], 0, 0, alg.height_cap)
    M = sysm.matrix()
    kernel = _kernel(M, sysm.nvars)
    witnesses = []
    if beta.is_zero():
        for k in range(n):
            imgs = [alg.generator(i) if i == k else LieElt(simple_root(n, i), {}) for i in range(n)]
            witnesses.append(sysm.vector(imgs))
    elif beta.is_positive() and alg.mult(beta) > 0:
        for x in alg.basis_elts(beta):
            witnesses.append(sysm.vector(inner_derivation(alg, x).e_images))
    for w in witnesses:
        assert not any(M @ w) if M.rows else True, "inner witness violates the Serre constraints"
    inner_rank, outer = _split(kernel, witnesses)
    basis = [Derivation(beta, sysm.images(v)) for v in kernel]
    return DerivationSpace(
        beta,
        basis,
        inner_rank,
        len(kernel) - inner_rank,
        alg.height_cap,
        [Derivation(beta, sysm.images(v)) for v in outer],
    )


def is_derivation_n(alg: GradedAlgebra, d: Derivation) -> bool:
    """Generator images kill every Serre element (direct Leibniz evaluation)."""
    sysm = _System(alg, d.degree)
    if sysm.nvars == 0:
        return all(y.is_zero() for y in d.e_images)
    return not any(sysm.residual(d.e_images))


def candidate_degrees_n(alg: GradedAlgebra, H: int) -> list[RootVec]:
    n = alg.n
    out = {RootVec([0] * n)}
    for g in alg.degrees():
        if g.height <= H:
            for i in range(n):
                out.add(g - simple_root(n, i))
    return sorted(out, key=RootVec.sort_key)


# ------------------------------------------------------------------ applying derivations


def apply_derivation(alg: GradedAlgebra, d: Derivation, x: LieElt, _memo=None) -> LieElt:
    """Evaluate a derivation given by generator images on any element."""
    memo = {} if _memo is None else _memo
    target = x.degree + d.degree
    out = LieElt(target, {})
    for lab, c in x.coords.items():
        out = out + _apply_label(alg, d, lab, memo).scale(c)
    return out


def _apply_label(alg: GradedAlgebra, d: Derivation, lab: str, memo) -> LieElt:
    hit = memo.get(lab)
    if hit is not None:
        return hit
    deg = alg.label_degree[lab]
    target = deg + d.degree
    if not target.is_positive():
        res = LieElt(target, {})
    elif deg.height == 1:
        i = deg.coords.index(1)
        res = d.e_images[i]
    else:
        if not alg.in_range(target):
            raise HeightOverflow(f"d({lab}) has degree {target} beyond the truncation")
        res = LieElt(target, {})
        for i, z in alg.decompose(lab):
            res = res + alg.bracket(d.e_images[i], z) + alg.bracket(alg.generator(i), apply_derivation(alg, d, z, memo))
    memo[lab] = res
    return res


# ------------------------------------------------------------------ explicit outer derivations


def outer_finite(G, alg: GradedAlgebra) -> list[tuple[int, RootVec, Derivation]]:
    """The l+1 outer derivations e_j -> delta_ij e_{s_i(theta)} of a finite type."""
    if not isinstance(classify(alg.gcm), Finite):
        raise NotFiniteType("outer_finite needs a finite-type matrix")
    n = alg.n
    theta = highest_root(alg.gcm)
    out = []
    for i in range(n):
        target = reflect(alg.gcm, i, theta)
        beta = target - simple_root(n, i)
        vec = alg.basis_elts(target)
        assert len(vec) == 1
        imgs = tuple(vec[0] if j == i else LieElt(beta + simple_root(n, j), {}) for j in range(n))
        d = Derivation(beta, imgs)
        space = der_space_n(alg, beta)
        sysm = _System(alg, beta)
        assert not any(sysm.residual(imgs)), f"d_{i} fails a Serre constraint"
        witnesses = [sysm.vector(inner_derivation(alg, x).e_images) for x in alg.basis_elts(beta)] if beta.is_positive() else []
        base = qlinalg.rank(QMatrix(witnesses)) if witnesses else 0
        assert qlinalg.rank(QMatrix(witnesses + [sysm.vector(imgs)])) == base + 1, f"d_{i} is inner"
        assert space.outer_dim >= 1
        out.append((i, beta, d))
    return out


def affine_outer_check(G, alg: GradedAlgebra, k: int) -> dict:
    """Outer derivations at k r delta, and at the odd multiples of delta for twisted types."""
    gtype = classify(alg.gcm)
    if not isinstance(gtype, Affine):
        raise NotAffineType("affine_outer_check needs an affine matrix")
    n, r = alg.n, gtype.twist
    delta = RootVec(gtype.marks)
    eps = gtype.epsilon_index
    beta = delta.scale(k * r)
    need = (beta + simple_root(n, eps)).height + alg.gcm.max_serre_height()
    if need > alg.height_cap:
        raise CapTooSmall(f"checking {k * r} delta needs N >= {need}")
    space = der_space_n(alg, beta)
    # outer part representable with d(e_i) = 0 for i != epsilon
    sysm = _System(alg, beta)
    kernel = [sysm.vector(b.e_images) for b in space.basis]
    eps_only = [v for v in _restricted_kernel(sysm, eps)]
    witnesses = [sysm.vector(inner_derivation(alg, x).e_images) for x in alg.basis_elts(beta)]
    combined = qlinalg.rank(QMatrix(witnesses + eps_only)) if (witnesses or eps_only) else 0
    normalizable = combined == space.dim
    report = {
        "degree": beta.tojson(),
        "dim": space.dim,
        "mult": alg.mult(beta),
        "inner": space.inner_dim,
        "outer": space.outer_dim,
        "normalizable": normalizable,
        "status": "pass" if (space.outer_dim == 1 and space.dim == alg.mult(beta) + 1 and normalizable) else "fail",
        "other": [],
    }
    for kk in range(1, k * r):
        if kk % r == 0:
            continue
        b2 = delta.scale(kk)
        sp = der_space_n(alg, b2)
        report["other"].append({"degree": b2.tojson(), "dim": sp.dim, "outer": sp.outer_dim, "status": "pass" if sp.outer_dim == 0 else "fail"})
    if any(o["status"] != "pass" for o in report["other"]):
        report["status"] = "fail"
    return report


def _restricted_kernel(sysm: _System, keep: int) -> list[list[Fraction]]:
    """Kernel vectors with every block other than ``keep`` forced to zero."""
    M = sysm.matrix()
    off, m = sysm.offsets[keep], sysm.sizes[keep]
    if m == 0:
        return []
    sub = QMatrix([[M[r, off + c] for c in range(m)] for r in range(M.rows)]) if M.rows else None
    ker = _kernel(sub, m) if sub is not None else [[Fraction(int(t == c)) for t in range(m)] for c in range(m)]
    out = []
    for v in ker:
        full = [Fraction(0)] * sysm.nvars
        full[off : off + m] = v
        out.append(full)
    return out


# ------------------------------------------------------------------ sweeps and reports


def sweep(fn: Callable[[RootVec], dict], degrees: Sequence[RootVec], jobs: int = 1) -> list[dict]:
    """Apply fn over degrees, possibly in threads; results sorted by degree."""
    degrees = sorted(degrees, key=RootVec.sort_key)
    if jobs <= 1:
        results = [fn(b) for b in degrees]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(fn, degrees))
    return [r for _, r in sorted(zip(degrees, results), key=lambda t: t[0].sort_key())]


def _moody_line(alg: GradedAlgebra, beta: RootVec) -> dict:
    sp = der_space_n(alg, beta)
    if beta.is_zero():
        expected = alg.n
    elif beta.is_positive():
        expected = alg.mult(beta)
    else:
        expected = 0
    ok = sp.outer_dim == 0 and sp.dim == expected
    line = sp.report("pass" if ok else "fail")
    line["expected"] = expected
    return line


def verify_moody(G, alg: GradedAlgebra, H: int, jobs: int = 1) -> dict:
    """Der(ñ+)_beta = ad(b+)_beta for every candidate degree up to height H."""
    gtype = classify(alg.gcm)
    if not isinstance(gtype, Indefinite):
        raise ValueError("verify_moody needs an indefinite matrix")
    if H + alg.gcm.max_serre_height() > alg.height_cap:
        raise CapTooSmall(f"H={H} needs N >= {H + alg.gcm.max_serre_height()}")
    lines = sweep(lambda b: _moody_line(alg, b), candidate_degrees_n(alg, H), jobs)
    return {
        "check": "Der(n+) = ad(b+) on n+ for indefinite type",
        "height": H,
        "degrees": lines,
        "violations": [l for l in lines if l["status"] != "pass"],
        "status": "pass" if all(l["status"] == "pass" for l in lines) else "fail",
    }


def h1_report(alg: GradedAlgebra, H: int, jobs: int = 1) -> dict:
    """dim H^1(ñ+, ñ+) degree by degree over candidates of height <= H.

    H^1 = Der / ad(ñ+).  Degree 0 has no ad(ñ+) part, so it contributes the
    l+1 diagonal derivations; every other degree contributes its outer part.
    """
    need = H - 1 + alg.gcm.max_serre_height()
    if need > alg.height_cap:
        raise CapTooSmall(f"H={H} needs N >= {need}")
    gtype = classify(alg.gcm)

    def line(beta):
        sp = der_space_n(alg, beta)
        rep = sp.report()
        rep["h1"] = sp.dim if beta.is_zero() else sp.outer_dim
        return rep

    lines = sweep(line, candidate_degrees_n(alg, H), jobs)
    total = sum(l["h1"] for l in lines)
    n = alg.n
    out = {"check": "dim H^1(n+, n+)", "height": H, "type": gtype.kind, "degrees": [l for l in lines if l["dim"]]}
    out["total"] = total
    out["degree0"] = next(l["h1"] for l in lines if not any(l["degree"]))
    out["outer_elsewhere"] = total - out["degree0"]
    if isinstance(gtype, Finite):
        expected = 2 * n
    elif isinstance(gtype, Indefinite):
        expected = n
    else:
        delta = RootVec(gtype.marks)
        steps = [k for k in range(1, H + 1) if delta.scale(k * gtype.twist).height + 1 <= H]
        expected = n + len(steps)
    out["expected"] = expected
    out["status"] = "pass" if total == expected else "fail"
    return out


# ------------------------------------------------------------------ the Borel subalgebra


def der_space_b(bor: BorelAlgebra, beta) -> DerivationSpace:
    beta = RootVec(beta)
    nil = bor.nil
    n, hd = nil.n, bor.h_dim
    zero_h = (Fraction(0),) * hd
    sysm = _System(nil, beta)
    e_vars = sysm.nvars
    if beta.is_zero():
        h_block = hd  # d(h_a) in h
        e_sizes = [1] * n
    elif beta.is_positive():
        h_block = nil.mult(beta)
        e_sizes = sysm.sizes
    else:
        h_block = 0
        e_sizes = sysm.sizes
    e_offsets = [hd * h_block + sum(e_sizes[:i]) for i in range(n)]
    nvars = hd * h_block + sum(e_sizes)
    if nvars == 0:
        return DerivationSpace(beta, [], 0, 0, nil.height_cap)

    def unpack(vec):
        hs = []
        for a in range(hd):
            chunk = vec[a * h_block : (a + 1) * h_block]
            if beta.is_zero():
                hs.append(BorelElt(tuple(chunk), LieElt(beta, {})))
            else:
                hs.append(BorelElt(zero_h, nil.from_vector(beta, chunk) if h_block else LieElt(beta, {})))
        es = []
        for i in range(n):
            chunk = vec[e_offsets[i] : e_offsets[i] + e_sizes[i]]
            g = beta + simple_root(n, i)
            if beta.is_zero():
                es.append(nil.generator(i).scale(chunk[0]))
            else:
                es.append(nil.from_vector(g, chunk) if e_sizes[i] else LieElt(g, {}))
        return hs, es

    def residual(vec):
        hs, es = unpack(vec)
        out: list[Fraction] = []
        if beta.is_zero():
            for a in range(hd):
                for i in range(n):
                    out.append(bor.root_value(simple_root(n, i), hs[a].h))
        else:
            for a in range(hd):
                for b in range(a + 1, hd):
                    if h_block:
                        x = hs[b].x.scale(bor.root_value(beta, bor.h_unit(a))) - hs[a].x.scale(bor.root_value(beta, bor.h_unit(b)))
                        out.extend(nil.vector(LieElt(beta, x.coords)))
            for a in range(hd):
                ba = bor.root_value(beta, bor.h_unit(a))
                for i in range(n):
                    g = beta + simple_root(n, i)
                    if not g.is_positive():
                        continue
                    val = nil.bracket(hs[a].x, nil.generator(i)) + es[i].scale(ba)
                    out.extend(nil.vector(LieElt(g, val.coords)))
        if e_vars or beta.is_zero():
            if beta.is_zero():
                out.extend(sysm.residual(es))
            else:
                out.extend(sysm.residual(es))
        return out

    cols = []
    for k in range(nvars):
        cols.append(residual([Fraction(int(t == k)) for t in range(nvars)]))
    nrows = len(cols[0])
    M = QMatrix([[c[r] for c in cols] for r in range(nrows)]) if nrows else QMatrix.zeros(0, nvars)
    kernel = _kernel(M, nvars)

    def pack(hs, es):
        vec: list[Fraction] = []
        for a in range(hd):
            if beta.is_zero():
                vec.extend(hs[a].h)
            elif h_block:
                vec.extend(nil.vector(LieElt(beta, hs[a].x.coords)))
        for i in range(n):
            if beta.is_zero():
                vec.append(es[i].coords.get(nil.basis[simple_root(n, i)][0], Fraction(0)))
            elif e_sizes[i]:
                vec.extend(nil.vector(LieElt(beta + simple_root(n, i), es[i].coords)))
        return vec

    witnesses = []
    if beta.is_zero():
        for b in range(hd):
            hb = bor.h_unit(b)
            hs = [BorelElt(zero_h, LieElt(beta, {}))] * hd
            es = [nil.generator(i).scale(bor.root_value(simple_root(n, i), hb)) for i in range(n)]
            witnesses.append(pack(hs, es))
    elif beta.is_positive():
        for x in nil.basis_elts(beta):
            hs = [BorelElt(zero_h, x.scale(-bor.root_value(beta, bor.h_unit(a)))) for a in range(hd)]
            es = [nil.bracket(x, nil.generator(i)) for i in range(n)]
            witnesses.append(pack(hs, es))
    for w in witnesses:
        assert not any(M @ w) if M.rows else True
    inner_rank, outer = _split(kernel, witnesses)

    def as_derivation(v):
        hs, es = unpack(v)
        return Derivation(beta, tuple(es), tuple(hs))

    return DerivationSpace(beta, [as_derivation(v) for v in kernel], inner_rank, len(kernel) - inner_rank, nil.height_cap, [as_derivation(v) for v in outer])


def borel_degree0_expected(bor: BorelAlgebra) -> int:
    """dim hom(h, c) + dim ad(h) = h_dim * m' + (h_dim - m')."""
    return bor.h_dim * bor.center_dim + (bor.h_dim - bor.center_dim)

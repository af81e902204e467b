"""Exact checks of the binomial, Beta-integral and sl2-string identities.

These are the closed forms used while proving that the only outer
derivations of a finite-type nilradical are the d_i.  Everything is exact
rational arithmetic; the integral is evaluated from monomial antiderivatives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial, prod

__all__ = [
    "IdentityReport",
    "vandermonde_check",
    "vandermonde_omitted_term",
    "beta_sum",
    "beta_integral",
    "coeff_3_16",
    "coeff_alternating_sum",
    "coeff_closed_form",
    "sl2_string_check",
    "identity_sweep",
]


@dataclass
class IdentityReport:
    name: str
    params: dict
    lhs: Fraction
    rhs: Fraction
    passed: bool
    extra: dict = field(default_factory=dict)

    def tojson(self) -> dict:
        out = {"identity": self.name, **self.params, "lhs": _render(self.lhs), "rhs": _render(self.rhs), "pass": self.passed}
        out.update({k: _render(v) if isinstance(v, Fraction) else v for k, v in self.extra.items()})
        return out


def _render(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _C(n: int, k: int) -> int:
    return comb(n, k) if 0 <= k <= n and n >= 0 else 0


def vandermonde_check(r: int, r1: int, k0: int, k: int) -> IdentityReport:
    """sum_{s+j=k} C(r+1, j+1) C(r1-k0-1, s) against C(r+r1-k0, k+1)."""
    m = r1 - k0 - 1
    lhs = sum(_C(r + 1, j + 1) * _C(m, k - j) for j in range(k + 1))
    rhs = _C(r + r1 - k0, k + 1)
    return IdentityReport(
        "vandermonde",
        {"r": r, "r1": r1, "k0": k0, "k": k},
        Fraction(lhs),
        Fraction(rhs),
        lhs == rhs,
        {"omitted_term": vandermonde_omitted_term(r1, k0, k)},
    )


def vandermonde_omitted_term(r1: int, k0: int, k: int) -> int:
    """The j = -1 term C(r+1, 0) C(r1-k0-1, k+1) missing from the left side.

    Full Vandermonde gives LHS + this = RHS, so the two agree exactly when
    k >= r1 - k0 - 1, which is the range the alternating sum runs over.
    """
    return _C(r1 - k0 - 1, k + 1)


def _poly_mul(p: list[Fraction], q: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def beta_integral(a_exp: int, b_exp: int) -> Fraction:
    """int_0^1 (1-x)^a_exp x^b_exp dx by expanding the polynomial and integrating monomials."""
    poly = [Fraction(1)]
    for _ in range(a_exp):
        poly = _poly_mul(poly, [Fraction(1), Fraction(-1)])
    poly = [Fraction(0)] * b_exp + poly
    return sum((c / (d + 1) for d, c in enumerate(poly)), Fraction(0))


def beta_sum(r1: int, k0: int) -> IdentityReport:
    s = sum((Fraction((-1) ** k * comb(k0 + 1, k), r1 - k0 + k) for k in range(k0 + 2)), Fraction(0))
    b = beta_integral(k0 + 1, r1 - k0 - 1)
    # Euler's closed form B(p, q) = (p-1)!(q-1)!/(p+q-1)! as a third route
    euler = Fraction(factorial(r1 - k0 - 1) * factorial(k0 + 1), factorial(r1 + 1))
    return IdentityReport("beta_sum", {"r1": r1, "k0": k0}, s, b, s == b and s != 0 and b == euler, {"euler": euler})


def coeff_alternating_sum(r: int, r1: int, k0: int) -> Fraction:
    total = Fraction(0)
    for k in range(r1 - k0 - 1, r1 + 1):
        num = (-1) ** (r1 - k) * _C(r + r1 - k0, k + 1) * _C(r + r1 - k0 - k - 1, r1 - k) * _C(k0 + 1, r1 - k)
        total += Fraction(num, _C(r1, k))
    return total


def coeff_closed_form(r: int, r1: int, k0: int, sign_exponent: int | None = None) -> Fraction:
    """(-1)^e (r1+1)...(r1+r-k0) / (r-k0-1)! times the Beta integral.

    The exponent defaults to r1, as printed; the alternating sum actually
    carries the sign (-1)^(k0+1).
    """
    e = r1 if sign_exponent is None else sign_exponent
    rising = prod(range(r1 + 1, r1 + r - k0 + 1))
    return Fraction((-1) ** e * rising, factorial(r - k0 - 1)) * beta_integral(k0 + 1, r1 - k0 - 1)


def coeff_3_16(r: int, r1: int, k0: int, corrected_sign: bool = False) -> IdentityReport:
    """The alternating coefficient sum against its closed form; pass iff equal and nonzero."""
    lhs = coeff_alternating_sum(r, r1, k0)
    rhs = coeff_closed_form(r, r1, k0, k0 + 1 if corrected_sign else None)
    return IdentityReport(
        "coeff_3_16" + ("_corrected_sign" if corrected_sign else ""),
        {"r": r, "r1": r1, "k0": k0},
        lhs,
        rhs,
        lhs == rhs and lhs != 0,
        {"abs_equal": abs(lhs) == abs(rhs), "nonzero": lhs != 0},
    )


# -- sl2 strings, realized on homogeneous polynomials in x, y


def _e(poly: dict) -> dict:
    """x d/dy"""
    out: dict = {}
    for (a, b), c in poly.items():
        if b:
            key = (a + 1, b - 1)
            out[key] = out.get(key, 0) + c * b
    return {k: v for k, v in out.items() if v}


def _f(poly: dict) -> dict:
    """y d/dx"""
    out: dict = {}
    for (a, b), c in poly.items():
        if a:
            key = (a - 1, b + 1)
            out[key] = out.get(key, 0) + c * a
    return {k: v for k, v in out.items() if v}


def _h(poly: dict) -> dict:
    return {k: (k[0] - k[1]) * c for k, c in poly.items() if k[0] != k[1]}


def sl2_string_check(r: int, k: int) -> IdentityReport:
    """f e^k v = k(r+1-k) e^{k-1} v for the lowest weight vector v of V(r)."""
    basis = [{(a, r - a): Fraction(1)} for a in range(r + 1)]
    # the realization satisfies [e,f] = h and [h,e] = 2e on V(r)
    for p in basis:
        ef = _e(_f(p))
        fe = _f(_e(p))
        comm = {key: ef.get(key, 0) - fe.get(key, 0) for key in set(ef) | set(fe)}
        assert {a: b for a, b in comm.items() if b} == _h(p)
        he, eh = _h(_e(p)), _e(_h(p))
        comm = {key: he.get(key, 0) - eh.get(key, 0) for key in set(he) | set(eh)}
        assert {a: b for a, b in comm.items() if b} == {key: 2 * c for key, c in _e(p).items()}
    v = basis[0]  # y^r, weight -r
    w = v
    for _ in range(k):
        w = _e(w)
    lhs_vec = _f(w)
    expected = Fraction(k * (r + 1 - k))
    if k == 0:
        coeff = Fraction(0) if not lhs_vec else None
    else:
        prev = v
        for _ in range(k - 1):
            prev = _e(prev)
        (key, pc), = prev.items()
        coeff = Fraction(lhs_vec.get(key, 0), pc) if set(lhs_vec) <= {key} else None
    passed = coeff is not None and coeff == expected
    return IdentityReport("sl2_string", {"r": r, "k": k}, coeff if coeff is not None else Fraction(-1), expected, passed)


def identity_sweep(rmax: int = 8, sl2_max: int = 10, paper_domain: bool = False) -> dict:
    """Run every identity over 0 <= k <= r1 <= r <= rmax, 0 <= k0 < r1.

    With ``paper_domain`` the Vandermonde sweep is restricted to
    k >= r1 - k0 - 1 and coeff_3_16 uses the corrected sign.
    """
    groups: dict[str, list[IdentityReport]] = {"vandermonde": [], "beta_sum": [], "coeff_3_16": [], "sl2_string": []}
    for r in range(rmax + 1):
        for r1 in range(1, r + 1):
            for k0 in range(r1):
                for k in range(r1 + 1):
                    if paper_domain and k < r1 - k0 - 1:
                        continue
                    groups["vandermonde"].append(vandermonde_check(r, r1, k0, k))
                if r > r1:
                    groups["coeff_3_16"].append(coeff_3_16(r, r1, k0, corrected_sign=paper_domain))
    for r1 in range(1, rmax + 1):
        for k0 in range(r1):
            groups["beta_sum"].append(beta_sum(r1, k0))
    for r in range(sl2_max + 1):
        for k in range(r + 1):
            groups["sl2_string"].append(sl2_string_check(r, k))
    summary = {
        name: {"cases": len(reps), "failures": sum(not x.passed for x in reps), "status": "pass" if all(x.passed for x in reps) else "fail"}
        for name, reps in groups.items()
    }
    return {"groups": groups, "summary": summary, "status": "pass" if all(s["status"] == "pass" for s in summary.values()) else "fail"}

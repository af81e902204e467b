"""Affine and indefinite types.

Affine: one extra outer derivation in each degree k r delta, supported on
the generator e_epsilon.  Indefinite: every derivation is ad of an element
of the Borel subalgebra, checked degree by degree.
"""

from kmnil import affine_outer_check, build_nilradical, verify_moody

A11 = [[2, -2], [-2, 2]]
alg = build_nilradical(A11, 11)
for k in (1, 2, 3):
    rep = affine_outer_check(A11, alg, k)
    print(f"A1 affine, degree {rep['degree']}: dim {rep['dim']} = mult {rep['mult']} + outer {rep['outer']}")

A22 = [[2, -4], [-1, 2]]
rep = affine_outer_check(A22, build_nilradical(A22, 13), 1)
print(f"A2 twisted, 2 delta = {rep['degree']}: outer {rep['outer']}; at delta: {rep['other']}")

for G, N, H in [([[2, -3], [-3, 2]], 11, 6), ([[2, -2, -2], [-2, 2, -2], [-2, -2, 2]], 9, 5)]:
    rep = verify_moody(G, build_nilradical(G, N), H)
    outer = sum(l["outer"] for l in rep["degrees"])
    print(f"{G}: {len(rep['degrees'])} degrees up to height {H}, total outer {outer}, {rep['status']}")

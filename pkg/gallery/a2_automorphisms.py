"""The automorphism group of the A2 nilradical as 3x3 matrices.

On the basis x = e_0, y = e_1, z = [e_0, e_1] an automorphism is fixed by
the images of x and y; z then goes to (a1 b2 - b1 a2) z.  The torus,
exp(ad), the exponentials of the two outer derivations and the diagram
swap all sit inside this set.
"""

from fractions import Fraction

from kmnil import build_nilradical, diagram_lift, exp_ad, heisenberg_aut_check, is_automorphism, torus_action

alg = build_nilradical([[2, -1], [-1, 2]], 3)


def show(name, m):
    order = ("0", "1", "01")
    rows = [[m.images[c].x.get(r, Fraction(0)) for c in order] for r in order]
    print(name, "automorphism" if is_automorphism(m) else "NOT an automorphism")
    for row in rows:
        print("   ", " ".join(f"{str(v):>5}" for v in row))


show("torus (2, 1/3)", torus_action(alg, [2, Fraction(1, 3)]))
show("exp ad e_0", exp_ad(alg, alg.generator(0)))
show("diagram swap", diagram_lift(alg, (1, 0)))

rep = heisenberg_aut_check(seed=1)
print("matrix-set checks:", {k: v for k, v in rep.items() if k != "subgroups"})
print("subgroups:", rep["subgroups"])

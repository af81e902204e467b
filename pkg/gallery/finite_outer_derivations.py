"""Outer derivations of finite-type nilradicals.

For finite type there is exactly one outer derivation per simple root,
living in degree s_i(theta) - alpha_i and sending e_i to the root vector of
s_i(theta).  Together with the l+1 diagonal derivations this gives
dim H^1 = 2(l+1).
"""

from kmnil import build_nilradical, candidate_degrees_n, der_space_n, h1_report, highest_root, outer_finite

for name, G in [("A2", [[2, -1], [-1, 2]]), ("B2", [[2, -1], [-2, 2]]), ("G2", [[2, -3], [-1, 2]])]:
    theta = highest_root(G)
    N = theta.height - 1 + max(2 - a for row in G for a in row)
    alg = build_nilradical(G, N)
    print(f"{name}: theta = {theta}, cap N = {N}")
    for i, beta, d in outer_finite(G, alg):
        print(f"  d_{i}: degree {beta}, e_{i} -> {d.e_images[i]}")
    spaces = [der_space_n(alg, b) for b in candidate_degrees_n(alg, theta.height)]
    total = sum(sp.dim for sp in spaces)
    print(f"  total dim of graded Der = {total}, dim H^1 = {h1_report(alg, theta.height)['total']}")
    print()

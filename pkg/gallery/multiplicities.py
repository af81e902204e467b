"""Root multiplicities of a few nilradicals, built from the Serre presentation.

Each algebra is the free Lie algebra on e_0..e_l modulo the Serre relations,
truncated at a height cap.  The dimensions are compared with the Peterson
recurrence, which knows nothing about the construction.
"""

from kmnil import build_nilradical, classify, peterson_mult_oracle

CASES = [
    ("G2", [[2, -3], [-1, 2]], 6),
    ("A1 affine", [[2, -2], [-2, 2]], 8),
    ("A2 twisted", [[2, -4], [-1, 2]], 9),
    ("hyperbolic", [[2, -3], [-3, 2]], 8),
]

for name, G, N in CASES:
    alg = build_nilradical(G, N)
    print(f"{name}: {classify(G).label}, dims by height {alg.dims_by_height()}")
    for beta in alg.degrees():
        m = alg.mult(beta)
        if m > 1 or beta.height == N:
            print(f"  mult{beta} = {m}   oracle {peterson_mult_oracle(G, beta)}")
    print()

# the imaginary roots of A1 affine are the multiples of delta = (1,1), each of multiplicity one
alg = build_nilradical([[2, -2], [-2, 2]], 8)
print("A1 affine, k delta:", [alg.mult((k, k)) for k in range(1, 5)])

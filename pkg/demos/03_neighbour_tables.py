"""Closed-form neighbour maps for the bounded family, checked against sorting."""
from gaplab import bounded_family, exchange_table, gap_set, seven_table
from gaplab.neighbor_theory import bounded_regime

c = bounded_family(2)

# four rectangles exchanged by (n, m) -> (|n + shift|, |m + shift'|)
t = exchange_table(1, 1, 9, c)
for case in t.cases:
    r = case.rects[0]
    print(f"{case.label:32} n in [{r.n0},{r.n1}) m in [{r.m0},{r.m1})  size {case.size}")
_, oracle = gap_set(3, 28, c.alpha, c.beta)
print("exchange map equals sorted order:", t.neighbor_table() == oracle)

# for q_k < N <= q_{k+1} at most seven cases remain
for N in (10, 29, 300):
    k, swapped = bounded_regime(N, c)
    t = seven_table(k, N, c)
    _, oracle = gap_set(N, N, c.alpha, c.beta)
    print(f"N={N:3d} level {k} swapped={swapped!s:5}  {t.distinct} lengths, "
          f"agrees with oracle: {t.neighbor_table() == oracle}")

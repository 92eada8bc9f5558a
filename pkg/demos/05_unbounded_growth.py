"""Why the second family has unboundedly many gap lengths."""
from gaplab import delta_k, gap_set, phi_induction_map, prop42_table, unbounded_family, unbounded_witnesses

c = unbounded_family(2)

# delta_k is tiny but positive, and a_{4k+1} copies of it fit below ||q_{4k+1} alpha||
for k in (1, 2):
    d, rep = delta_k(k, c)
    print(f"k={k}: delta ~ {d.approx(c.alpha, c.beta):.3e}; chain certified: {rep.ok}")

# the twelve-case table on E_{267,268}, its derivation from the exchange map,
# and the brute-force sort all give the same permutation
table = prop42_table(1, c)
_, oracle = gap_set(267, 268, c.alpha, c.beta)
print("twelve cases:", len(table.cases), "regions;", table.distinct, "lengths")
print("table == oracle:", table.neighbor_table() == oracle, "| induced map == oracle:",
      phi_induction_map(1, c) == oracle)

# one witness length per c = 0 .. a_5 - 1, all present in E_267
w = unbounded_witnesses(1, c)
g, _ = gap_set(267, 267, c.alpha, c.beta)
print(len(w), "witnesses, all present:", all(x in g.counts for x in w))
print("level 2 would give", len(unbounded_witnesses(2, c)), "witnesses at N =", c.qk(9))

"""Count distinct gap lengths of E_N for both families."""
import numpy as np

from gaplab import bounded_family, gap_set, primitive_gaps, unbounded_family

bounded = bounded_family(2)
unbounded = unbounded_family(1)

Ns = np.arange(1, 121)
counts_b = np.array([gap_set(N, N, bounded.alpha, bounded.beta)[0].distinct for N in Ns])
counts_u = np.array([gap_set(N, N, unbounded.alpha, unbounded.beta)[0].distinct for N in Ns])
print("bounded   : max", counts_b.max(), "histogram", np.bincount(counts_b)[1:])
print("unbounded : max", counts_u.max(), "histogram", np.bincount(counts_u)[1:])

# gaps are integer triples (dn, dm, dc) meaning dn*alpha + dm*beta + dc
g, _ = gap_set(21, 21, bounded.alpha, bounded.beta)
prim = set(primitive_gaps(g, bounded.alpha, bounded.beta))
for t in g.sorted_triples(bounded.alpha, bounded.beta):
    print(f"  {tuple(t)!s:18} x{g.counts[t]:4d}  ~{t.approx(bounded.alpha, bounded.beta):.3e}"
          + ("  primitive" if t in prim else ""))

# at N = q_5 = 267 the unbounded family already exceeds seven lengths
g, _ = gap_set(267, 267, unbounded.alpha, unbounded.beta)
print("unbounded family, N = 267:", g.distinct, "distinct lengths")

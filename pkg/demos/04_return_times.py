"""First return of a translation to a window takes at most three values."""
import numpy as np

from gaplab import three_gap_return

rng = np.random.default_rng(7)
for _ in range(5):
    M = int(rng.integers(20, 400))
    r = int(rng.integers(1, M))
    while np.gcd(r, M) != 1:
        r = int(rng.integers(1, M))
    N = int(rng.integers(1, M + 1))
    p = three_gap_return(r, M, N)
    print(f"r={r:3d} M={M:3d} N={N:3d}: tau1={p.tau1} tau2={p.tau2} "
          f"windows [0,{p.N1}) [{p.N1},{p.N2}) [{p.N2},{N}); values seen {sorted(set(p.tau.tolist()))}")

# the three windows are translated blocks: check one profile by hand
p = three_gap_return(9, 28, 10)
print(p.segments(), p.identities())

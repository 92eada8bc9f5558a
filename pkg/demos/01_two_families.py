"""Build both families and look at how fast their convergents grow."""
from gaplab import bounded_family, unbounded_family, verify_family_invariants

bounded = bounded_family(3)

# q'_k = b'_k q_k + 1 ties the two denominators together at every level
for k in range(1, 4):
    q, qp, bp = bounded.qk(k), bounded.qpk(k), bounded.bpk(k)
    print(f"level {k}: q_k has {q.bit_length():5d} bits, q'_k has {qp.bit_length():5d} bits, "
          f"q'_k - b'_k q_k = {qp - bp * q}")

print(f"q_2 = {bounded.qk(2)} = 3^9 + 3^6 + 1 = {3 ** 9 + 3 ** 6 + 1}")

# the unbounded family works in blocks of four partial quotients
unbounded = unbounded_family(2)
print("a_1..a_10  =", [unbounded.ak(i) for i in range(1, 11)])
print("a'_1..a'_10 =", [unbounded.apk(i) for i in range(1, 11)])
print("q_5, q'_5 =", unbounded.qk(5), unbounded.qpk(5))

# every structural identity is checked with exact integers; one known
# divergence between a printed closed form and the recurrence is reported as FLAG
print(verify_family_invariants(unbounded))

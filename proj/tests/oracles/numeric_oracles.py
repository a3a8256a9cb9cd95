#!/usr/bin/env python3
"""High-precision and enumeration oracles for values frozen into the unit tests."""
from fractions import Fraction
from itertools import combinations
from math import comb
import mpmath as mp

mp.mp.dps = 40

# step size: 4 ln(25000)/25000
print("clog4", mp.nstr(4 * mp.log(25000) / 25000, 20))

# upper bound D=G=L=mu=1, n=10, K=100, l=2
def ub(n, K, mu, L, G, D, l):
    T = mp.mpf(n * K)
    lt = mp.log(T)
    return D**2 / T**l + 2**13 * G**2 * L**2 * lt**3 / (T**2 * mu**4) \
        + 2**15 * G**2 * L**2 * n**2 * lt**4 / (T**3 * mu**4)
print("ub(10,100)", mp.nstr(ub(10, 100, 1, 1, 1, 1, 2), 20))
print("ub(4,4096)", mp.nstr(ub(4, 4096, 1, 1, 1, 1, 2), 20))

# partial sum pmf by enumerating balanced sign sequences
def enum_pmf(n, i):
    counts = {}
    total = 0
    for plus in combinations(range(n), n // 2):
        s = set(plus)
        k = sum(1 if p in s else -1 for p in range(i))
        counts[k] = counts.get(k, 0) + 1
        total += 1
    return {k: Fraction(c, total) for k, c in sorted(counts.items())}

for n, i in [(4, 2), (6, 3), (8, 4), (2, 1)]:
    p = enum_pmf(n, i)
    eabs = sum(abs(k) * v for k, v in p.items())
    print("pmf", n, i, {k: str(v) for k, v in p.items()}, "E|s|", eabs)

# lemma13 at n=256, i=128 with the closed form
n, i = 256, 128
h = n // 2
num = sum(abs(k) * comb(h, (i + k) // 2) * comb(h, (i - k) // 2)
          for k in range(-i, i + 1, 2))
E = Fraction(num, comb(n, i))
print("E|s_128| n=256", float(E), "sqrt(i)/32", mp.sqrt(i) / 32)
pneg = Fraction(sum(comb(h, (i + k) // 2) * comb(h, (i - k) // 2)
                    for k in range(-i, 0, 2)), comb(n, i))
print("P(<0)", float(pneg))

# hand traces on the F2 family (L=1, G=1), alpha = 0.1
def g(x, first, L=1.0, G=1.0):
    c = L if x < 0 else 1.0
    return c * x + (G / 2 if first else -G / 2)
x = 0.0
x -= 0.1 * g(x, True); a = x
x -= 0.1 * g(x, False)
print("trace (1,2)", a, x)
x = 0.0
x -= 0.1 * g(x, False); b = x
x -= 0.1 * g(x, True)
print("trace (2,1)", b, x)

#!/usr/bin/env python3
"""Reference model of the seed derivation, xoshiro256** and the shuffle.

Used once to produce the golden values frozen in tests/test_permutation.cpp.
Independent of the C++ sources.
"""

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def splitmix64_next(state):
    state = (state + GOLDEN) & MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return state, z ^ (z >> 31)


def mix(x):
    return splitmix64_next(x)[1]


def derive(base, sweep, repeat):
    h = mix(base)
    h = mix(h ^ (sweep & MASK))
    h = mix(h ^ (repeat & MASK))
    st = h
    words = []
    for _ in range(4):
        st, w = splitmix64_next(st)
        words.append(w)
    return words


def rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & MASK


class Xoshiro:
    def __init__(self, s):
        self.s = list(s)

    def next(self):
        s = self.s
        result = (rotl((s[1] * 5) & MASK, 7) * 9) & MASK
        t = (s[1] << 17) & MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = rotl(s[3], 45)
        return result

    def bounded(self, n):
        limit = ((1 << 64) // n) * n
        while True:
            v = self.next()
            if v < limit:
                return v % n


def shuffle(rng, n):
    a = list(range(1, n + 1))
    for i in range(n, 1, -1):
        j = rng.bounded(i)
        a[i - 1], a[j] = a[j], a[i - 1]
    return a


if __name__ == "__main__":
    for lineage in [(0, 0, 0), (0, 0, 1), (12345, 3, 7)]:
        print(lineage, [hex(w) for w in derive(*lineage)])
    r = Xoshiro(derive(0, 0, 0))
    print("first outputs", [hex(r.next()) for _ in range(4)])
    r = Xoshiro(derive(0, 0, 0))
    print("shuffle(10) x3", [shuffle(r, 10) for _ in range(3)])
    r = Xoshiro(derive(42, 1, 2))
    print("bounded(7) x8", [r.bounded(7) for _ in range(8)])

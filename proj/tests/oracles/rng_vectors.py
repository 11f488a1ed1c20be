"""Independent Python model of the hashing and RNG primitives.

Prints the constants hard-coded in tests/test_numeric_rng.cpp. Written from
the documented definitions in docs/determinism.md, not from the C++ code.
"""

M = (1 << 64) - 1


def fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & M
    return h


def mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M
    return z ^ (z >> 31)


GAMMA = 0x9E3779B97F4A7C15


def splitmix(seed: int, n: int):
    out = []
    for _ in range(n):
        seed = (seed + GAMMA) & M
        out.append(mix64(seed))
    return out


def rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & M


class Xoshiro:
    def __init__(self, seed):
        self.s = splitmix(seed, 4)

    def next(self):
        s = self.s
        result = (rotl((s[1] * 5) & M, 7) * 9) & M
        t = (s[1] << 17) & M
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = rotl(s[3], 45)
        return result

    def below(self, bound):
        threshold = ((1 << 64) - bound) % bound
        while True:
            r = self.next()
            if r >= threshold:
                return r % bound


def le64(v):
    return v.to_bytes(8, "little")


def instance_seed(g, tid, i):
    return mix64(fnv1a64(le64(g) + tid.encode() + b"\0" + le64(i)))


def substream(seed, k):
    return mix64((seed + (k + 1) * GAMMA) & M)


def retry(seed, n):
    return mix64(seed ^ mix64(n))


if __name__ == "__main__":
    for s in [b"", b"a", b"foobar", b"Emily has 15 apples."]:
        print("fnv", s, hex(fnv1a64(s)))
    print("splitmix(0)", [hex(x) for x in splitmix(0, 4)])
    x = Xoshiro(42)
    print("xoshiro(42)", [hex(x.next()) for _ in range(4)])
    x = Xoshiro(7)
    print("xoshiro(7).below(10)", [x.below(10) for _ in range(12)])
    print("instance_seed(42,emily_apples,0)", instance_seed(42, "emily_apples", 0))
    print("instance_seed(42,emily_apples,1)", instance_seed(42, "emily_apples", 1))
    print("instance_seed(0,t,0)", hex(instance_seed(0, "t", 0)))
    print("substream(instance_seed(0,t,0),0)", hex(substream(instance_seed(0, "t", 0), 0)))
    print("retry(1234,1)", hex(retry(1234, 1)), "retry(1234,2)", hex(retry(1234, 2)))
    # Binding for params n: IntRange(1,9), m: IntRange(-5,5) with instance seed 99:
    # draw 0 uses Xoshiro(substream(99, 0)); in_range(lo,hi) = lo + below(hi-lo+1).
    r = Xoshiro(substream(99, 0))
    print("binding(99)", 1 + r.below(9), -5 + r.below(11))

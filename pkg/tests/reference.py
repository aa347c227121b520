"""Plain-integer reference generators used as oracles for the compiled kernels."""

MASK = (1 << 64) - 1


def splitmix64_outputs(state, count):
    out = []
    for _ in range(count):
        state = (state + 0x9E3779B97F4A7C15) & MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        out.append(z ^ (z >> 31))
    return out


def rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & MASK


class Xoshiro256StarStar:
    def __init__(self, words):
        self.s = list(words)

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

    def double(self):
        return (self.next() >> 11) / 2.0**53

    def below(self, bound):
        threshold = (1 << 64) % bound
        while True:
            x = self.next()
            if x >= threshold:
                return x % bound


def fnv1a(data):
    h = 0xCBF29CE484222325
    for b in data:
        h = ((h ^ b) * 0x100000001B3) & MASK
    return h


def reference_stream(master_seed, label, index):
    seed = master_seed ^ fnv1a(label.encode()) ^ ((index * 0xD1B54A32D192ED03) & MASK)
    return Xoshiro256StarStar(splitmix64_outputs(seed, 4))


def reference_shuffle(gen, m):
    a = list(range(m))
    for i in range(m - 1, 0, -1):
        j = gen.below(i + 1)
        a[i], a[j] = a[j], a[i]
    return a

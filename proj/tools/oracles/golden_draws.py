"""Pure-Python mt19937_64 and seed derivation, used to pin golden values in the
C++ tests independently of the C++ standard library."""

M = (1 << 64) - 1


def mt19937_64(seed):
    n, m = 312, 156
    a = 0xB5026F5AA96619E9
    upper, lower = 0xFFFFFFFF80000000, 0x7FFFFFFF
    mt = [0] * n
    mt[0] = seed & M
    for i in range(1, n):
        mt[i] = (6364136223846793005 * (mt[i - 1] ^ (mt[i - 1] >> 62)) + i) & M
    idx = n
    while True:
        if idx >= n:
            for i in range(n):
                x = (mt[i] & upper) | (mt[(i + 1) % n] & lower)
                xa = x >> 1
                if x & 1:
                    xa ^= a
                mt[i] = mt[(i + m) % n] ^ xa
            idx = 0
        y = mt[idx]
        idx += 1
        y ^= (y >> 29) & 0x5555555555555555
        y ^= (y << 17) & 0x71D67FFFEDA60000
        y ^= (y << 37) & 0xFFF7EEE000000000
        y ^= y >> 43
        yield y & M


def splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & M
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & M
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & M
    return x ^ (x >> 31)


def derive_seed(base, stream):
    return splitmix64(base ^ splitmix64((stream + 0x632BE59BD9B4E019) & M))


def uniform01(gen):
    return (next(gen) >> 11) * 2.0**-53


if __name__ == "__main__":
    assert next(mt19937_64(5489)) == 14514284786278117030
    g = mt19937_64(42)
    print("noise seed=42 phi=0.01:", repr(0.01 * (2 * uniform01(g) - 1)))
    print("derive_seed(42, 1):", derive_seed(42, 1))
    g = mt19937_64(derive_seed(42, 1))
    print("run seed=42 first pair noise phi=0.01:", repr(0.01 * (2 * uniform01(g) - 1)))

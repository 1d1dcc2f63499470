# Reference subset draws for 250 synthetic scene ids, from a standalone mt19937_64.
import json

class MT64:
    def __init__(self, seed):
        self.mt = [0] * 312
        self.mt[0] = seed & 0xFFFFFFFFFFFFFFFF
        for i in range(1, 312):
            self.mt[i] = (6364136223846793005 * (self.mt[i - 1] ^ (self.mt[i - 1] >> 62)) + i) & 0xFFFFFFFFFFFFFFFF
        self.i = 312

    def __call__(self):
        if self.i >= 312:
            for k in range(312):
                x = (self.mt[k] & 0xFFFFFFFF80000000) | (self.mt[(k + 1) % 312] & 0x7FFFFFFF)
                xa = x >> 1
                if x & 1:
                    xa ^= 0xB5026F5AA96619E9
                self.mt[k] = self.mt[(k + 156) % 312] ^ xa
            self.i = 0
        y = self.mt[self.i]
        self.i += 1
        y ^= (y >> 29) & 0x5555555555555555
        y ^= (y << 17) & 0x71D67FFFEDA60000
        y ^= (y << 37) & 0xFFF7EEE000000000
        y ^= y >> 43
        return y & 0xFFFFFFFFFFFFFFFF

def bounded(rng, bound):
    threshold = (2**64 - bound) % bound
    while True:
        x = rng()
        if x >= threshold:
            return x % bound

def sample(ids, seed, n):
    ids = sorted(set(ids))
    rng = MT64(seed)
    for i in range(n):
        j = i + bounded(rng, len(ids) - i)
        ids[i], ids[j] = ids[j], ids[i]
    return sorted(ids[:n])

check = MT64(5489)
for _ in range(9999):
    check()
assert check() == 9981545732273789042

ids = [f"scene{n:04d}_00" for n in range(250)]
out = {"scene_ids": ids, "n": 200, "subsets": {str(s): sample(ids, s, 200) for s in (0, 1, 2)}}
with open("ost_subset_expected.json", "w") as f:
    json.dump(out, f, indent=1)
    f.write("\n")

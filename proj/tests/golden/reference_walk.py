#!/usr/bin/env python3
# Copyright 2026 The sstlab Authors
# SPDX-License-Identifier: Apache-2.0
"""Independent re-implementation of the seeded generator and the pose walk.

Writes the golden files read by the C++ tests:
  rng_1234567.txt   first 8 outputs of Rng(1234567)
  walk_seed7.txt    20-step walk, seed 7, start (4,0,2), default probabilities
"""
import sys
from pathlib import Path

M = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15


def mix(z):
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M
    return z ^ (z >> 31)


def rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & M


class Xoshiro:
    def __init__(self, seed):
        self.s = []
        x = seed
        for _ in range(4):
            x = (x + GAMMA) & M
            self.s.append(mix(x))

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

    def uniform(self):
        return (self.next() >> 11) * 2.0**-53


SIZES = (9, 18, 6)


def walk(seed, start, length=20, probs=(1 / 3, 1 / 3, 1 / 3), flip=0.2):
    rng = Xoshiro(seed)
    dirs = [1 if rng.uniform() < 0.5 else -1 for _ in range(3)]
    p = list(start)
    out = [tuple(p)]
    for _ in range(1, length):
        u = rng.uniform()
        acc, dim = 0.0, 0
        for d in range(3):
            if probs[d] <= 0:
                continue
            acc += probs[d]
            dim = d
            if u < acc:
                break
        if rng.uniform() < flip:
            dirs[dim] = -dirs[dim]
        if dim == 1:
            p[1] = (p[1] + dirs[1]) % 18
        else:
            nxt = p[dim] + dirs[dim]
            if nxt < 0 or nxt >= SIZES[dim]:
                dirs[dim] = -dirs[dim]
                nxt = p[dim] + dirs[dim]
            p[dim] = nxt
        out.append(tuple(p))
    return out


def main():
    here = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent
    r = Xoshiro(1234567)
    (here / "rng_1234567.txt").write_text("".join(f"{r.next()}\n" for _ in range(8)))
    (here / "walk_seed7.txt").write_text(
        "".join(f"object0_e{e}_a{a}_l{l}\n" for e, a, l in walk(7, (4, 0, 2))))


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Replays the tree stream of unif:1:3, seed 42 and counts the fifth level.

Standalone re-implementation of the vertex key derivation and the
inverse-cdf draw. Prints Z_1..Z_5 and W_5 = Z_5 / 32; the unit tests
freeze the printed values.
"""
import sys

M = (1 << 64) - 1
TREE_TAG = 0x7472656500000001


def mix64(x):
    x = (x + 0x9E3779B97F4A7C15) & M
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & M
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & M
    return x ^ (x >> 31)


def root_key(seed):
    h = mix64(seed)
    h = mix64(h ^ TREE_TAG)
    return mix64((h + 0) & M)


def child_key(parent, j):
    return mix64(parent ^ ((0xD1B54A32D192ED03 * (j + 1)) & M))


def unit(bits):
    return (bits >> 11) * 2.0 ** -53


def children(key, a=1, b=3):
    u = unit(mix64(key ^ 0x5851F42D4C957F2D))
    mass = 1.0 / (b - a + 1)
    acc = 0.0
    for k in range(1, b + 1):
        if k >= a:
            acc += mass
        if u < acc:
            return k
    return b


def main(seed=42, depth=5):
    level = [root_key(seed)]
    sizes = []
    for _ in range(depth):
        nxt = []
        for v in level:
            nxt.extend(child_key(v, j) for j in range(children(v)))
        level = nxt
        sizes.append(len(level))
    print("Z", *sizes)
    print("W_%d = %d/%d = %.17g" % (depth, sizes[-1], 2 ** depth, sizes[-1] / 2 ** depth))


if __name__ == "__main__":
    main(*(int(a) for a in sys.argv[1:]))

"""Counter-based per-run random streams.

Scheme (shared bit-for-bit by the numba kernels, the NumPy fallback, and the
pure-Python reference here):

  key(root, i)  = mix64(root + (i+1)*GOLDEN)          per-run key, i = run index
  state[j]      = mix64(key + (j+1)*GOLDEN), j = 0..3  xoshiro256++ seed
  u64 stream    = xoshiro256++
  uniform       = ((u64 >> 11) + 0.5) * 2^-53          open (0,1)

mix64 is the splitmix64 finalizer. All arithmetic mod 2^64. Each 1-D noise
draw consumes exactly two uniforms regardless of family, so streams stay
aligned across families; a uniform start location consumes one more.

This module is the documented reference implementation, used directly for
single deterministic draws and in tests; the hot paths reimplement it.
"""

from __future__ import annotations

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z &= MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def run_key(root_seed: int, run_index: int) -> int:
    return mix64((root_seed + (run_index + 1) * GOLDEN) & MASK)


class Xoshiro256PP:
    """Pure-Python xoshiro256++ matched to the kernel implementations."""

    def __init__(self, root_seed: int, run_index: int = 0):
        key = run_key(root_seed, run_index)
        self.s = [mix64((key + (j + 1) * GOLDEN) & MASK) for j in range(4)]
        if not any(self.s):
            self.s[0] = GOLDEN

    @staticmethod
    def _rotl(x: int, k: int) -> int:
        return ((x << k) | (x >> (64 - k))) & MASK

    def next_u64(self) -> int:
        s = self.s
        result = (self._rotl((s[0] + s[3]) & MASK, 23) + s[0]) & MASK
        t = (s[1] << 17) & MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = self._rotl(s[3], 45)
        return result

    def uniform(self) -> float:
        return ((self.next_u64() >> 11) + 0.5) * 2.0**-53

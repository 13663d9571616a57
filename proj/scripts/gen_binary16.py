#!/usr/bin/env python3
"""Writes tests/data/binary16_reference.txt: one "float32_bits half_bits" hex pair
per line, converted by numpy (round to nearest even, subnormals kept).

NaN inputs are left out; the tests check the canonical NaN separately."""
import pathlib
import sys

import numpy as np

rng = np.random.default_rng(20240611)


def halves_to_f32_bits(h):
    return h.view(np.float16).astype(np.float32).view(np.uint32)


parts = []

# every finite half value, exactly
all_h = np.arange(0, 1 << 16, dtype=np.uint16)
finite = all_h[(all_h & 0x7C00) != 0x7C00]
parts.append(halves_to_f32_bits(finite[::7]))

# midpoints between neighbouring halves: the tie cases
lo = finite[(finite & 0x7FFF) < 0x7BFF][::6]
a = lo.view(np.float16).astype(np.float64)
b = (lo + 1).view(np.float16).astype(np.float64)
mid = ((a + b) / 2).astype(np.float32)
parts.append(mid.view(np.uint32))
# one ulp of float32 either side of each midpoint
parts.append(np.nextafter(mid, np.float32(np.inf)).view(np.uint32))
parts.append(np.nextafter(mid, np.float32(-np.inf)).view(np.uint32))

# overflow boundary and a few fixed points
fixed = np.array([0.0, -0.0, 1.0, 0.1, 65504.0, 65519.996, 65520.0, 65536.0, 1e10, np.inf, -np.inf,
                  2.0**-24, 2.0**-25, 2.0**-25 * 1.0000001, 2.0**-26, 2.0**-14, 2.0**-14 - 2.0**-25,
                  1.0 / 3.0, 2048.0, 2049.0, 2050.0, 4097.0], dtype=np.float32)
parts.append(fixed.view(np.uint32))
parts.append((-fixed).view(np.uint32))

# random bit patterns in the half range and beyond
bits = rng.integers(0, 1 << 32, size=8000, dtype=np.uint64).astype(np.uint32)
bits = bits[(bits & 0x7F800000) != 0x7F800000]
parts.append(bits)
exps = rng.integers(100, 145, size=8000).astype(np.uint32)
mant = rng.integers(0, 1 << 23, size=8000).astype(np.uint32)
sign = rng.integers(0, 2, size=8000).astype(np.uint32)
parts.append((sign << 31) | (exps << 23) | mant)

src = np.concatenate(parts).astype(np.uint32)
f = src.view(np.float32)
src = src[~np.isnan(f)]
with np.errstate(over="ignore"):
    half = src.view(np.float32).astype(np.float16).view(np.uint16)

out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "tests/data/binary16_reference.txt")
with out.open("w") as fh:
    fh.write(f"# numpy {np.__version__}: float32 bits, binary16 bits (RNE)\n")
    for s, h in zip(src.tolist(), half.tolist()):
        fh.write(f"{s:08x} {h:04x}\n")
print(f"{len(src)} cases -> {out}")

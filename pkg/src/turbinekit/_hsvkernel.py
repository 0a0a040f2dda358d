"""Optional numba fast path for the per-layer HSV shift.

Bit-identical to the chunked numpy implementation in augment.py (same
float32 operations in the same order, strict IEEE math); augment.py falls
back to the numpy path when numba is unavailable. Kept in its own module
so the on-disk JIT cache invalidates only when this file changes.
"""

from __future__ import annotations

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

HAVE_NUMBA = numba is not None

if HAVE_NUMBA:

    @numba.njit(cache=True, fastmath=False)
    def hsv_shift_u8(rgb, hue_shift, sat_shift, val_factor, out):  # pragma: no cover
        f32 = np.float32
        for i in range(rgb.shape[0]):
            r = f32(rgb[i, 0])
            g = f32(rgb[i, 1])
            b = f32(rgb[i, 2])
            maxc = max(r, max(g, b))
            minc = min(r, min(g, b))
            delta = maxc - minc
            safe = max(delta, f32(1e-30))
            if maxc == r:
                h = (g - b) / safe
                if h < f32(0.0):
                    h += f32(6.0)
            elif maxc == g:
                h = (b - r) / safe + f32(2.0)
            else:
                h = (r - g) / safe + f32(4.0)
            h *= f32(60.0)
            h += hue_shift
            if h >= f32(360.0):
                h -= f32(360.0)
            s = delta / max(maxc, f32(1e-30)) * f32(255.0) + sat_shift
            s = min(f32(255.0), max(f32(0.0), s)) / f32(255.0)
            v = min(f32(255.0), max(f32(0.0), maxc * val_factor))
            h /= f32(60.0)
            for c in range(3):
                n = f32(5.0) if c == 0 else (f32(3.0) if c == 1 else f32(1.0))
                k = n + h
                if k >= f32(6.0):
                    k -= f32(6.0)

                frac = min(k, f32(4.0) - k)
                frac = min(f32(1.0), max(f32(0.0), frac))
                val = v * (f32(1.0) - s * frac)
                out[i, c] = np.uint8(min(f32(255.0), max(f32(0.0), np.rint(val))))

else:  # pragma: no cover
    hsv_shift_u8 = None

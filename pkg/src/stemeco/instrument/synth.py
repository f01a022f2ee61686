"""Deterministic synthetic frame generation.

A frame is the sum of the specimen's Gaussian features evaluated on the
pixel grid, optionally modulated by a contrast bump centered at the
probe position (so probe moves are visible in the image), plus seeded
Gaussian noise. Synthesis is a pure function of its arguments: the
noise stream is keyed by (rng_seed, channel, frame_index) through a
counter-based generator, so identical inputs produce bit-identical
pixel arrays regardless of call order or host thread.
"""

from __future__ import annotations

import numpy as np

# Contrast bump applied where the probe is parked.
PROBE_CONTRAST = 0.6
PROBE_SPOT_WIDTH = 0.05

_M64 = (1 << 64) - 1


def _mix64(z: int) -> int:
    # splitmix64 finalizer; frozen so noise keys never change
    z = (z + 0x9E3779B97F4A7C15) & _M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


def noise_key(rng_seed: int, channel: int, frame_index: int) -> list[int]:
    """128-bit Philox key derived from the noise stream coordinates."""
    a = _mix64(rng_seed & _M64)
    b = _mix64(a ^ _mix64(channel & _M64))
    c = _mix64(b ^ _mix64(frame_index & _M64))
    return [b, c]


def standard_normals(key: list[int], n: int) -> np.ndarray:
    """n standard normal draws from a fixed-key Philox counter stream.

    Uses the raw Philox integers with a Box-Muller transform instead of
    a library distribution so the stream is stable across library
    versions (the golden frame checksum depends on it).
    """
    if n == 0:
        return np.zeros(0)
    m = (n + 1) // 2
    raw = np.random.Philox(key=key).random_raw(2 * m)
    u1 = ((raw[:m] >> 11) + 1) * 2.0 ** -53  # (0, 1]: log() is safe
    u2 = (raw[m:] >> 11) * 2.0 ** -53        # [0, 1)
    radius = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * np.pi * u2
    return np.concatenate([radius * np.cos(theta), radius * np.sin(theta)])[:n]


def render_pixels(specimen, width: int, height: int, probe,
                  rng_seed: int, channel: int, frame_index: int) -> np.ndarray:
    """Render one frame as a (height, width) float32 array, >= 0 everywhere.

    ``specimen`` is a SpecimenModel; ``probe`` is ProbeCoordinates or None.
    """
    xs = (np.arange(width) + 0.5) / width
    ys = (np.arange(height) + 0.5) / height
    gx, gy = np.meshgrid(xs, ys)

    image = np.zeros((height, width))
    for feat in specimen.features:
        d2 = (gx - feat.x) ** 2 + (gy - feat.y) ** 2
        image += feat.amplitude * np.exp(-d2 / (2.0 * feat.width ** 2))

    if probe is not None:
        d2 = (gx - probe.x) ** 2 + (gy - probe.y) ** 2
        image *= 1.0 + PROBE_CONTRAST * np.exp(-d2 / (2.0 * PROBE_SPOT_WIDTH ** 2))

    if specimen.noise_sigma > 0.0:
        key = noise_key(rng_seed, channel, frame_index)
        noise = standard_normals(key, width * height).reshape(height, width)
        image += specimen.noise_sigma * noise

    return np.clip(image, 0.0, None).astype("<f4")

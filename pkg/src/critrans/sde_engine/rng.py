"""Counter-based Gaussian stream addressed by (master seed, path index, step).

Each path owns a Philox key built from the master seed (low 64 bits) and the
path index (high 64 bits). Step j of a path reads counter blocks
``j*w .. j*w + w - 1`` with ``w = ceil(k/4)``, so any window of steps can be
regenerated without touching the rest of the stream.
"""

from __future__ import annotations

import numpy as np

__all__ = ["path_key", "gaussian_block", "blocks_per_step"]

_MASK64 = (1 << 64) - 1
_TWO_PI = 2.0 * np.pi


def path_key(master_seed: int, path_index: int) -> int:
    if path_index < 0:
        raise ValueError("path_index must be nonnegative")
    return (int(master_seed) & _MASK64) | ((int(path_index) & _MASK64) << 64)


def blocks_per_step(k: int) -> int:
    return max(1, -(-k // 4))


def gaussian_block(master_seed: int, path_index: int, step_start: int, n_steps: int,
                   k: int) -> np.ndarray:
    """Standard normals of shape (n_steps, k) for steps step_start .. step_start+n_steps-1."""
    if n_steps <= 0:
        return np.empty((0, k))
    w = blocks_per_step(k)
    bg = np.random.Philox(key=path_key(master_seed, path_index), counter=step_start * w)
    raw = bg.random_raw(4 * w * n_steps).reshape(n_steps, 4 * w)
    # 53-bit uniforms strictly inside (0, 1)
    u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * (1.0 / 9007199254740992.0)
    r = np.sqrt(-2.0 * np.log(u[:, 0::2]))
    ang = _TWO_PI * u[:, 1::2]
    z = np.empty((n_steps, 4 * w))
    z[:, 0::2] = r * np.cos(ang)
    z[:, 1::2] = r * np.sin(ang)
    return z[:, :k]

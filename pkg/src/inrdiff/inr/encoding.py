"""NeRF-style positional encoding for 3D coordinates.

Layout (L frequencies, include_input=True):
``[x, y, z, sin(2^0 pi x..z), cos(2^0 pi x..z), ..., sin(2^{L-1} pi x..z), cos(2^{L-1} pi x..z)]``
i.e. frequency-major blocks of three, sin before cos. With the default
L=4 the encoded dimension is 3 + 3*2*4 = 27.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["PeConfig", "positional_encode"]


@dataclass(frozen=True)
class PeConfig:
    num_frequencies: int = 4
    include_input: bool = True
    base: float = np.pi

    @property
    def encoded_dim(self) -> int:
        return 3 * self.include_input + 3 * 2 * self.num_frequencies

    def to_dict(self) -> dict:
        return {
            "num_frequencies": self.num_frequencies,
            "include_input": self.include_input,
            "base": self.base,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PeConfig":
        return cls(int(d["num_frequencies"]), bool(d["include_input"]), float(d["base"]))


def positional_encode(points, cfg: PeConfig = PeConfig(), dtype=np.float32) -> np.ndarray:
    """Encode (n, 3) coordinates to (n, encoded_dim)."""
    x = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite coordinates")
    parts = [x] if cfg.include_input else []
    for k in range(cfg.num_frequencies):
        arg = (2.0**k * cfg.base) * x
        parts.append(np.sin(arg))
        parts.append(np.cos(arg))
    return np.concatenate(parts, axis=1).astype(dtype)

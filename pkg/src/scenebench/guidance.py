"""Guidance-composition arithmetic over an abstract denoiser, plus a linear
toy denoiser for desk-scale checks of the semantic-combination identity.

Modes:
  cfg       z = z_u + w (z_c0 - z_u)
  rte       z = z_u + w (z_c0 - z_u) + w' (z_c1 - z_c2)
  negative  z = z_u + w (z_c0 - z_c2)
  positive  z = z_u + w (z_c0 - z_u) + w' (z_c1 - z_u)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

UNCONDITIONAL = None  # condition token for the unconditioned branch

MODES = ("cfg", "rte", "negative", "positive")


class GuidanceError(ValueError):
    pass


def _check_dims(*vectors: np.ndarray) -> None:
    shapes = {v.shape for v in vectors}
    if len(shapes) != 1:
        raise GuidanceError(f"prediction vectors disagree in shape: {sorted(shapes)}")


def cfg_combine(z_uncond: np.ndarray, z_cond: np.ndarray, w: float) -> np.ndarray:
    _check_dims(z_uncond, z_cond)
    return z_uncond + w * (z_cond - z_uncond)


def rte_combine(
    z_uncond: np.ndarray,
    z_c0: np.ndarray,
    z_c1: np.ndarray,
    z_c2: np.ndarray,
    w: float,
    w_prime: float,
) -> np.ndarray:
    _check_dims(z_uncond, z_c0, z_c1, z_c2)
    return z_uncond + w * (z_c0 - z_uncond) + w_prime * (z_c1 - z_c2)


def negative_combine(
    z_uncond: np.ndarray, z_cond: np.ndarray, z_c2: np.ndarray, w: float
) -> np.ndarray:
    _check_dims(z_uncond, z_cond, z_c2)
    return z_uncond + w * (z_cond - z_c2)


def positive_combine(
    z_uncond: np.ndarray, z_cond: np.ndarray, z_c1: np.ndarray, w: float, w_prime: float
) -> np.ndarray:
    _check_dims(z_uncond, z_cond, z_c1)
    return z_uncond + w * (z_cond - z_uncond) + w_prime * (z_c1 - z_uncond)


@dataclass(frozen=True)
class GuidanceSpec:
    mode: str
    w: float
    w_prime: float = 0.0
    c0: Optional[str] = None
    c1: Optional[str] = None
    c2: Optional[str] = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise GuidanceError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.mode == "rte" and (self.c1 is None or self.c2 is None):
            raise GuidanceError("rte mode requires both c1 and c2")
        if self.mode == "negative" and self.c2 is None:
            raise GuidanceError("negative mode requires c2")
        if self.mode == "positive" and self.c1 is None:
            raise GuidanceError("positive mode requires c1")


@dataclass(frozen=True)
class ToyDenoiser:
    """Exactly linear denoiser: z(x, c) = A x + E(c), z(x, unconditional) = A x."""

    matrix: np.ndarray  # (d, d)
    embeddings: Dict[str, np.ndarray]  # condition token -> (d,)

    def __call__(self, x: np.ndarray, condition: Optional[str]) -> np.ndarray:
        z = self.matrix @ x
        if condition is not UNCONDITIONAL:
            try:
                z = z + self.embeddings[condition]
            except KeyError:
                raise GuidanceError(f"no embedding for condition {condition!r}") from None
        return z


def combine_step(denoiser, x: np.ndarray, spec: GuidanceSpec) -> np.ndarray:
    z_u = denoiser(x, UNCONDITIONAL)
    z_c0 = denoiser(x, spec.c0)
    if spec.mode == "cfg":
        return cfg_combine(z_u, z_c0, spec.w)
    if spec.mode == "rte":
        return rte_combine(z_u, z_c0, denoiser(x, spec.c1), denoiser(x, spec.c2), spec.w, spec.w_prime)
    if spec.mode == "negative":
        return negative_combine(z_u, z_c0, denoiser(x, spec.c2), spec.w)
    return positive_combine(z_u, z_c0, denoiser(x, spec.c1), spec.w, spec.w_prime)


def toy_denoise_loop(
    toy: ToyDenoiser,
    spec: GuidanceSpec,
    x0: np.ndarray,
    steps: int,
    eta: float = 0.1,
    record: bool = False,
):
    """Iterate x <- x - eta * z over `steps` steps with the spec's combination.

    Returns the final state, or the full (steps+1, d) trajectory when
    `record` is set.
    """
    if steps < 1:
        raise GuidanceError(f"steps must be >= 1, got {steps}")
    x = np.asarray(x0, dtype=np.float64)
    trajectory = [x.copy()]
    for _ in range(steps):
        x = x - eta * combine_step(toy, x, spec)
        if not np.all(np.isfinite(x)):
            raise GuidanceError("state diverged to a non-finite value")
        trajectory.append(x.copy())
    return np.stack(trajectory) if record else x

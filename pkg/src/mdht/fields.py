"""Real scalar fields sampled on periodic grids.

A field lives on the torus prod_k [-B_k/2, B_k/2) with S_k samples per
axis taken at cell centers: axis coordinate i -> (i + 1/2) B/S - B/2.
Cell-centered sampling keeps indicator-supported integrands exact when
region boundaries align with cell edges; the offset is invisible to any
frequency-diagonal operation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass
class SampledField:
    shape: tuple
    box: tuple
    values: np.ndarray

    def __post_init__(self):
        self.shape = tuple(int(s) for s in self.shape)
        self.box = tuple(float(b) for b in self.box)
        if len(self.shape) != len(self.box):
            raise ValueError("shape and box must have the same length")
        for s in self.shape:
            if not _is_power_of_two(s):
                raise ValueError(f"grid shape {self.shape} must be powers of two")
        if any(b <= 0 for b in self.box):
            raise ValueError("box lengths must be positive")
        self.values = np.asarray(self.values, dtype=np.float64).reshape(self.shape)
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field values must be finite")

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def cell_volume(self) -> float:
        v = 1.0
        for b, s in zip(self.box, self.shape):
            v *= b / s
        return v

    def axis_coordinates(self, k: int) -> np.ndarray:
        b, s = self.box[k], self.shape[k]
        return (np.arange(s) + 0.5) * (b / s) - b / 2

    def l2_norm_sq(self) -> float:
        return self.cell_volume * float(np.sum(self.values**2))

    def l2_norm(self) -> float:
        return float(np.sqrt(self.l2_norm_sq()))

    def with_values(self, values) -> "SampledField":
        return SampledField(self.shape, self.box, values)

    def same_grid(self, other: "SampledField") -> bool:
        return self.shape == other.shape and self.box == other.box

    # ------------------------------------------------------------- file IO

    def save(self, path, extra_header: dict | None = None):
        """Two-part container: one JSON header line, then raw float64 payload."""
        header = {"dim": self.dim, "shape": list(self.shape), "box": list(self.box)}
        if extra_header:
            header.update(extra_header)
        with open(path, "wb") as fh:
            fh.write(json.dumps(header, sort_keys=True).encode())
            fh.write(b"\n")
            fh.write(np.ascontiguousarray(self.values, dtype="<f8").tobytes())

    @classmethod
    def load(cls, path) -> "SampledField":
        with open(path, "rb") as fh:
            header = json.loads(fh.readline().decode())
            payload = fh.read()
        shape = tuple(header["shape"])
        values = np.frombuffer(payload, dtype="<f8").reshape(shape)
        return cls(shape, tuple(header["box"]), values.copy())


def zeros(shape, box) -> SampledField:
    return SampledField(tuple(shape), tuple(box), np.zeros(tuple(shape)))


def band_limited_noise(shape, box, band: int, seed: int) -> SampledField:
    """Unit-norm white noise truncated to frequency indices |m| <= band.

    Deterministic for a given seed.  band must stay strictly below every
    Nyquist index so the result is free of self-conjugate modes.
    """
    shape = tuple(int(s) for s in shape)
    if any(band >= s // 2 for s in shape):
        raise ValueError("band must be below the Nyquist index on every axis")
    rng = np.random.default_rng(seed)
    white = rng.standard_normal(shape)
    spec = np.fft.rfftn(white)
    for axis, s in enumerate(shape):
        if axis == len(shape) - 1:
            reps = np.arange(spec.shape[axis])
        else:
            reps = np.arange(s)
            reps[reps >= (s + 1) // 2] -= s
        keep = np.abs(reps) <= band
        spec = spec * keep.reshape([-1 if i == axis else 1 for i in range(len(shape))])
    out = np.fft.irfftn(spec, s=shape, axes=range(len(shape)))
    field = SampledField(shape, tuple(box), out)
    norm = field.l2_norm()
    if norm == 0:
        raise ValueError("degenerate zero probe")
    field.values /= norm
    return field

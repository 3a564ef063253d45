"""Sharpness test fields, their regions, and operator-norm lower probing.

The test field f(y) = 1_R(y) / (N2/N1 + y_1 + y_last) on the slab
R = [0,5] x [0,2]^(n-1) x [0,1] makes the maximal transform large on a
family of pairwise disjoint wedge-like regions S_v, one per direction of
the product grid; region-restricted energies of H_v f recover the
predicted (1/N1) log^3(N1/N2 + 1) growth up to a measured constant.

Every Rayleigh quotient ||H_Omega f||_2 / ||f||_2 reported here is a
valid lower bound for the discrete operator norm.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .directions import DirectionSet
from .fields import SampledField, band_limited_noise
from .rational import as_fraction
from .spectral import apply_hv, apply_maximal


@dataclass(frozen=True)
class SharpnessSpec:
    """Nonincreasing per-axis cardinalities N_1 >= ... >= N_n >= 1."""

    n: int
    n_list: tuple

    def __post_init__(self):
        object.__setattr__(self, "n_list", tuple(int(x) for x in self.n_list))
        if self.n < 1 or len(self.n_list) != self.n:
            raise ValueError("n_list must have exactly n entries")
        if any(x < 1 for x in self.n_list):
            raise ValueError("all cardinalities must be >= 1")
        if any(a < b for a, b in zip(self.n_list, self.n_list[1:])):
            raise ValueError("cardinalities must be nonincreasing")

    @property
    def n1(self) -> int:
        return self.n_list[0]

    @property
    def n2(self) -> int:
        # second cardinality; a single-factor spec behaves like N2 = 1
        return self.n_list[1] if self.n >= 2 else 1

    def slab_widths(self) -> list:
        return [5.0] + [2.0] * (self.n - 1) + [1.0]

    def required_half_extent(self) -> list:
        """Per-axis half width a centered box needs to hold the slab and
        every region S_v."""
        reach = 4.0 * self.n1
        return [max(w, reach) for w in self.slab_widths()]


def default_probe_box(spec: SharpnessSpec) -> tuple:
    """Smallest power-of-two centered box covering slab and regions, doubled."""
    out = []
    for half in spec.required_half_extent():
        b = 1
        while b < 2 * half:
            b *= 2
        out.append(float(2 * b))
    return tuple(out)


def sharpness_value(spec: SharpnessSpec, y) -> float:
    """Point evaluation of the test field (closed slab)."""
    y = [float(c) for c in y]
    widths = spec.slab_widths()
    if len(y) != len(widths):
        raise ValueError("point dimension must be n + 1")
    if any(not 0.0 <= c <= w for c, w in zip(y, widths)):
        return 0.0
    return 1.0 / (spec.n2 / spec.n1 + y[0] + y[-1])


def build_sharpness_field(spec: SharpnessSpec, shape, box) -> SampledField:
    """Sample the test field on a centered grid.

    Raises if the box cannot hold the slab together with the S_v regions,
    reporting the required box.
    """
    box = tuple(float(b) for b in box)
    shape = tuple(int(s) for s in shape)
    if len(shape) != spec.n + 1:
        raise ValueError("grid dimension must be n + 1")
    need = spec.required_half_extent()
    if any(b / 2 < h for b, h in zip(box, need)):
        raise ValueError(
            f"box {box} too small; need per-axis lengths >= {[2 * h for h in need]}"
        )
    grid = SampledField(shape, box, np.zeros(shape))
    coords = [grid.axis_coordinates(k) for k in range(grid.dim)]
    widths = spec.slab_widths()
    a = spec.n2 / spec.n1

    def ax(k):
        sh = [1] * grid.dim
        sh[k] = -1
        return coords[k].reshape(sh)

    mask = np.ones(shape, dtype=bool)
    for k, w in enumerate(widths):
        mask &= (ax(k) >= 0.0) & (ax(k) <= w)
    denom = np.broadcast_to(a + ax(0) + ax(grid.dim - 1), shape)
    values = np.zeros(shape)
    np.divide(1.0, denom, out=values, where=mask)
    grid.values = values
    return grid


def f_norm_exact(spec: SharpnessSpec) -> float:
    """Closed form of ||f||_2^2 for the test field."""
    ratio = spec.n1 / spec.n2
    a = spec.n2 / spec.n1
    return 2.0 ** (spec.n - 1) * (math.log(1 + ratio) - math.log((a + 6) / (a + 5)))


# ------------------------------------------------------------------ regions

REGION_KINDS = ("Wv", "Xv", "Sv")


@dataclass(frozen=True)
class RegionSpec:
    kind: str
    v: tuple
    params: SharpnessSpec

    def __post_init__(self):
        if self.kind not in REGION_KINDS:
            raise ValueError(f"kind must be one of {REGION_KINDS}")
        object.__setattr__(self, "v", tuple(as_fraction(c) for c in self.v))
        if len(self.v) != self.params.n:
            raise ValueError("v must have n coordinates")


def region_membership(x, region: RegionSpec) -> bool:
    """Closed-form inequality test; exact when x has rational coordinates."""
    spec = region.params
    v = region.v
    n = spec.n
    x = list(x)
    if len(x) != n + 1:
        raise ValueError("point dimension must be n + 1")
    xl = x[-1]
    if any(c >= 0 for c in x):
        return False
    depth = -xl
    if not (2 * spec.n2 < depth < 4 * spec.n1):
        return False
    bands = [x[k] - v[k] * xl for k in range(n)]
    if region.kind == "Wv":
        # -1/N_k < x_k/x_last - v_k < 0, multiplied through by |x_last|
        return all(0 < bands[k] < depth / spec.n_list[k] for k in range(n))
    first_lo = {"Xv": 0, "Sv": Fraction(spec.n2, spec.n1)}[region.kind]
    if not first_lo < bands[0] < depth / spec.n1:
        return False
    for k in range(1, n):
        if not 0 < bands[k] < 2 - v[k]:
            return False
    return True


def sample_sv(spec: SharpnessSpec, v, count: int, rng) -> np.ndarray:
    """Uniform-ish random points of S_v, via its band parametrization."""
    v = [float(c) for c in v]
    n = spec.n
    depth = rng.uniform(2 * spec.n2, 4 * spec.n1, size=count)
    z1 = rng.uniform(spec.n2 / spec.n1, depth / spec.n1)
    pts = np.empty((count, n + 1))
    pts[:, -1] = -depth
    pts[:, 0] = z1 + v[0] * pts[:, -1]
    for k in range(1, n):
        zk = rng.uniform(0.0, 2.0 - v[k], size=count)
        pts[:, k] = zk + v[k] * pts[:, -1]
    return pts


def sv_disjointness_check(spec: SharpnessSpec, v, vp, samples: int = 200,
                          seed: int = 0) -> bool:
    """Sampled check that S_v and S_v' share no point (true for v != v')."""
    v = tuple(as_fraction(c) for c in v)
    vp = tuple(as_fraction(c) for c in vp)
    if v == vp:
        raise ValueError("directions must differ")
    rng = np.random.default_rng(seed)
    r_v = RegionSpec("Sv", v, spec)
    r_vp = RegionSpec("Sv", vp, spec)
    for spec_a, region_b in ((v, r_vp), (vp, r_v)):
        for x in sample_sv(spec, spec_a, samples, rng):
            if region_membership(x, region_b):
                return False
    return True


@dataclass
class SvEnergy:
    value: float
    c_hat: float


def _region_mask(grid: SampledField, region: RegionSpec) -> np.ndarray:
    spec = region.params
    v = [float(c) for c in region.v]
    n = spec.n
    coords = [grid.axis_coordinates(k) for k in range(grid.dim)]

    def ax(k):
        sh = [1] * grid.dim
        sh[k] = -1
        return coords[k].reshape(sh)

    xl = ax(n)
    depth = -xl
    mask = (depth > 2 * spec.n2) & (depth < 4 * spec.n1)
    for k in range(n + 1):
        mask = mask & (ax(k) < 0)
    band0 = ax(0) - v[0] * xl
    if region.kind == "Wv":
        for k in range(n):
            bandk = ax(k) - v[k] * xl
            mask = mask & (bandk > 0) & (bandk < depth / spec.n_list[k])
        return np.broadcast_to(mask, grid.shape)
    lo1 = {"Xv": 0.0, "Sv": spec.n2 / spec.n1}[region.kind]
    mask = mask & (band0 > lo1) & (band0 < depth / spec.n1)
    for k in range(1, n):
        bandk = ax(k) - v[k] * xl
        mask = mask & (bandk > 0) & (bandk < 2 - v[k])
    return np.broadcast_to(mask, grid.shape)


def sv_restricted_energy(spec: SharpnessSpec, v, f: SampledField) -> SvEnergy:
    """Grid quadrature of |H_v f|^2 over S_v plus the fitted constant."""
    need = spec.required_half_extent()
    if any(b / 2 < h for b, h in zip(f.box, need)):
        raise ValueError("S_v region extends outside the field box")
    hv = apply_hv(f, v)
    mask = _region_mask(f, RegionSpec("Sv", tuple(v), spec))
    value = f.cell_volume * float(np.sum(np.where(mask, hv.values**2, 0.0)))
    denom = math.log(spec.n1 / spec.n2 + 1) ** 3
    return SvEnergy(value=value, c_hat=value * spec.n1 / denom)


def interval_hit_check(x, v, spec: SharpnessSpec, samples: int = 1000) -> bool:
    """Confirm by t-scan that the slab hit set of t -> x + <v,1> t is the
    interval 0 < x_last + t < 1, up to scan resolution."""
    x = [float(c) for c in x]
    v = [float(c) for c in v]
    widths = spec.slab_widths()
    lo, hi = -x[-1], 1 - x[-1]
    window = np.linspace(lo - 0.5, hi + 0.5, samples)
    tol = 2 * (window[1] - window[0])

    def in_slab(t):
        pt = [x[k] + v[k] * t for k in range(len(v))] + [x[-1] + t]
        return all(0.0 <= c <= w for c, w in zip(pt, widths))

    for t in window:
        hit = in_slab(t)
        inside = lo < t < hi
        near_edge = min(abs(t - lo), abs(t - hi)) < tol
        if hit != inside and not near_edge:
            return False
    return True


# ------------------------------------------------------------------ probing

@dataclass
class Probe:
    name: str
    field: SampledField
    seed: int | None = None


@dataclass
class ProbeReport:
    omega_label: str
    grid: dict
    probes: list
    max_rayleigh: float
    regions: dict | None = None

    def to_json_dict(self) -> dict:
        d = {
            "omega_label": self.omega_label,
            "grid": self.grid,
            "probes": self.probes,
            "max_rayleigh": self.max_rayleigh,
        }
        if self.regions is not None:
            d["regions"] = self.regions
        return d

    @classmethod
    def from_json_dict(cls, d: dict) -> "ProbeReport":
        return cls(
            omega_label=d["omega_label"],
            grid=d["grid"],
            probes=d["probes"],
            max_rayleigh=float(d["max_rayleigh"]),
            regions=d.get("regions"),
        )

    def save(self, path, extra: dict | None = None):
        d = self.to_json_dict()
        if extra:
            d.update(extra)
        with open(path, "w") as fh:
            json.dump(d, fh, indent=1, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "ProbeReport":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


def estimate_lower_bound(omega: DirectionSet, probes) -> ProbeReport:
    """Max Rayleigh quotient ||H_Omega f||/||f|| over the probe list."""
    probes = list(probes)
    if not probes:
        raise ValueError("need at least one probe")
    rows = []
    best = 0.0
    grid_meta = None
    for p in probes:
        norm = p.field.l2_norm()
        if norm == 0:
            raise ValueError(f"probe {p.name} has zero norm")
        ray = apply_maximal(p.field, omega).l2_norm() / norm
        rows.append({"name": p.name, "rayleigh": ray, "seed": p.seed})
        best = max(best, ray)
        if grid_meta is None:
            grid_meta = {"shape": list(p.field.shape), "box": list(p.field.box)}
    return ProbeReport(
        omega_label=omega.label,
        grid=grid_meta,
        probes=rows,
        max_rayleigh=best,
    )


def random_probes(shape, box, count: int, seed: int, band: int | None = None):
    """Seeded band-limited noise probes; seeds recorded for reproducibility."""
    if band is None:
        band = max(2, min(s // 4 for s in shape))
    out = []
    for i in range(count):
        s = seed + i
        out.append(Probe(f"random{i}", band_limited_noise(shape, box, band, s), s))
    return out

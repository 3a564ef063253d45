"""Cross-module invariant checklist behind `mdht check`.

Each check is small enough to run in seconds; failures are data, not
exceptions, and the summary is machine readable.
"""

from __future__ import annotations

import math
import time
from fractions import Fraction

import numpy as np

from . import certify as certmod
from . import directions as dirs
from . import probes as probemod
from . import replays
from . import spectral
from . import sweep as sweepmod
from .cells import HyperplaneParam, grid_cover_for_product
from .fields import band_limited_noise
from .hamsandwich import balanced_for, ham_sandwich_line
from .stabbing import stab_count, stab_sup


def _check_direction_invariants():
    u3, u6 = dirs.uniform(3), dirs.uniform(6)
    if not u3.as_set() <= u6.as_set():
        return False, "uniform nesting failed"
    if len(dirs.product([dirs.uniform(3), dirs.uniform(2)])) != 6:
        return False, "product cardinality failed"
    small = dirs.lacunary_uniform(2, 2)
    large = dirs.lacunary_uniform(3, 4)
    if not small.as_set() <= large.as_set():
        return False, "lacunary nesting failed"
    dirs.growth_schedule(0.5, 3).validate()
    aff = dirs.affine_image(u6, (Fraction(1, 2),), (Fraction(1, 3),))
    if len(aff) != len(u6):
        return False, "affine image changed cardinality"
    return True, "nesting, products, schedule, affine ok"


def _check_spectral_identities():
    f = band_limited_noise((64, 64), (4.0, 4.0), band=12, seed=3)
    v = (Fraction(2, 5),)
    hf = spectral.apply_hv(f, v)
    if hf.l2_norm() > f.l2_norm() * (1 + 1e-12):
        return False, "contraction failed"
    pf = spectral.null_projection(f, v)
    lhs = hf.l2_norm_sq() + pf.l2_norm_sq()
    if abs(lhs - f.l2_norm_sq()) > 1e-10 * f.l2_norm_sq():
        return False, "energy identity failed"
    h2 = spectral.apply_hv(hf, v)
    if np.max(np.abs(h2.values + f.values - pf.values)) > 1e-10:
        return False, "involution identity failed"
    return True, "contraction, energy split, involution ok"


def _check_wedge_support():
    f = band_limited_noise((128, 128), (8.0, 8.0), band=40, seed=5)
    leak = spectral.wedge_energy_outside(f, (Fraction(1, 3),), (Fraction(2, 3),))
    ok = leak <= 1e-12 * f.l2_norm_sq()
    return ok, f"leakage {leak:.3e}"


def _check_sharpness_quadrature():
    spec = probemod.SharpnessSpec(1, (2,))
    f = probemod.build_sharpness_field(spec, (512, 512), (16.0, 16.0))
    exact = probemod.f_norm_exact(spec)
    rel = abs(f.l2_norm_sq() - exact) / exact
    return rel < 0.02, f"relative quadrature error {rel:.4f}"


def _check_regions():
    spec = probemod.SharpnessSpec(2, (4, 2))
    rng = np.random.default_rng(11)
    v = (Fraction(1, 2), Fraction(1, 2))
    pts = probemod.sample_sv(spec, v, 200, rng)
    for x in pts:
        for kind in ("Sv", "Xv", "Wv"):
            if not probemod.region_membership(x, probemod.RegionSpec(kind, v, spec)):
                return False, f"containment failed for {kind}"
    if not probemod.sv_disjointness_check(spec, v, (Fraction(3, 4), Fraction(1, 2))):
        return False, "adjacent regions overlap"
    return True, "containment chain and disjointness ok"


def _check_grid_lemma():
    omega = dirs.product([dirs.uniform(4), dirs.uniform(4)])
    cover = grid_cover_for_product(omega, (2, 2))
    res = stab_sup(cover)
    return res.value <= 3, f"E_sup = {res.value} (bound 3)"


def _check_hamsandwich():
    rng = np.random.default_rng(23)
    for trial in range(20):
        a = [(Fraction(int(x), 64), Fraction(int(y), 64))
             for x, y in rng.integers(-40, 40, size=(rng.integers(1, 12), 2))]
        b = [(Fraction(int(x), 64), Fraction(int(y), 64))
             for x, y in rng.integers(-40, 40, size=(rng.integers(1, 12), 2))]
        a = list(dict.fromkeys(a))
        b = list(dict.fromkeys(b))
        line = ham_sandwich_line(a, b)
        if not (balanced_for(line, a) and balanced_for(line, b)):
            return False, f"unbalanced cut at trial {trial}"
    return True, "20 random instances balanced"


def _check_stab_oracle():
    rng = np.random.default_rng(31)
    from .stabbing import stab_counts_float
    from .cells import Cell, CellCover
    from .directions import DirectionSet

    for trial in range(5):
        cells, pts = [], []
        for _ in range(6):
            cx, cy = rng.uniform(-4, 4, size=2)
            ang = np.sort(rng.uniform(0, 2 * np.pi, size=5))
            verts = [
                (Fraction(round((cx + np.cos(t)) * 32), 32),
                 Fraction(round((cy + np.sin(t)) * 32), 32))
                for t in ang
            ]
            verts = list(dict.fromkeys(verts))
            if len(verts) < 3:
                continue
            centroid = (
                sum(v[0] for v in verts) / len(verts),
                sum(v[1] for v in verts) / len(verts),
            )
            pts.append(centroid)
            cells.append(
                Cell("convex-polygon", tuple(verts), (len(pts) - 1,), open=False)
            )
        if not cells:
            continue
        omega = DirectionSet(2, tuple(pts))
        cover = CellCover(omega, tuple(cells), tuple(range(len(cells))))
        exact = stab_sup(cover)
        us = rng.standard_normal((20000, 3))
        sampled = int(stab_counts_float(cover, us).max())
        if exact.value < sampled:
            return False, f"exact {exact.value} below sampled {sampled}"
        if stab_count(cover, exact.witness) != exact.value:
            return False, "witness failed re-verification"
    return True, "exact >= sampled with verified witnesses"


def _check_replays():
    if replays.replay_curve_recursion(16, 4) != 25.0:
        return False, "curve recursion replay != 25"
    prod = replays.replay_product_recursion(4)
    if abs(prod.value - (31 + 15 * math.sqrt(2))) > 1e-12 or not prod.bound_ok:
        return False, "product recursion replay mismatch"
    cc = replays.replay_thm3d_constants(1.0, 1.0)
    ok = all(cc.a_min >= lb for lb in cc.lower_bounds)
    return ok, "recursion replays and constant floors ok"


def _check_engine_agreement():
    u16 = dirs.uniform(16)
    cert = certmod.certify(u16, "dyadic-1d")
    if cert.value != 13.0:
        return False, f"dyadic value {cert.value} != 13"
    omega = dirs.product([dirs.uniform(4), dirs.uniform(4)])
    cert2 = certmod.certify(omega, "product-grid")
    if cert2.value != replays.replay_product_recursion(2).value:
        return False, "product engine/replay mismatch"
    bous, deg = dirs.boustrophedon_curve_samples(4)
    cert3 = certmod.certify(bous, certmod.Strategy("curve-pairs", degree=deg))
    if cert3.value != replays.replay_curve_recursion(16, 4):
        return False, "curve engine/replay mismatch"
    return True, "engine matches closed forms bit for bit"


def _check_soundness_small():
    omega = dirs.uniform(8)
    probes = probemod.random_probes((128, 128), (8.0, 8.0), 3, seed=17)
    report = probemod.estimate_lower_bound(omega, probes)
    cert = certmod.certify(omega, "dyadic-1d")
    ok = certmod.soundness_audit(cert, report)
    return ok, f"certificate {cert.value} >= rayleigh {report.max_rayleigh:.4f}"


def _check_negative_control():
    omega = dirs.uniform(8)
    probes = probemod.random_probes((64, 64), (8.0, 8.0), 2, seed=19)
    report = probemod.estimate_lower_bound(omega, probes)
    cert = certmod.certify(omega, "dyadic-1d")
    corrupted = certmod.BoundCertificate(
        cert.omega_label, cert.n_points, report.max_rayleigh * 0.5,
        "TRIVIAL", note="corrupted fixture",
    )
    try:
        ok = certmod.soundness_audit(corrupted, report)
    except certmod.AuditError:
        return True, "corruption detected by node audit"
    return (not ok), "corrupted certificate correctly rejected"


def _check_determinism():
    plan = sweepmod.SweepPlan(
        family="uniform",
        grid=[{"N": 4}, {"N": 8}],
        suite="random",
        seed=5,
        shape=(64, 64),
        box=(8.0, 8.0),
        probe_count=2,
    )
    a = sweepmod.rows_to_csv(sweepmod.run_sweep(plan))
    b = sweepmod.rows_to_csv(sweepmod.run_sweep(plan))
    return a == b, "two runs byte-identical" if a == b else "runs differ"


CHECKS = (
    ("direction-invariants", _check_direction_invariants),
    ("spectral-identities", _check_spectral_identities),
    ("wedge-support", _check_wedge_support),
    ("sharpness-quadrature", _check_sharpness_quadrature),
    ("regions", _check_regions),
    ("grid-lemma", _check_grid_lemma),
    ("ham-sandwich", _check_hamsandwich),
    ("stab-oracle", _check_stab_oracle),
    ("recursion-replays", _check_replays),
    ("engine-closed-form", _check_engine_agreement),
    ("soundness-small", _check_soundness_small),
    ("negative-control", _check_negative_control),
    ("determinism", _check_determinism),
)


def check_all() -> dict:
    """Run every invariant check; failures are recorded, never raised."""
    results = []
    for name, fn in CHECKS:
        start = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:
            ok, detail = False, f"exception: {type(exc).__name__}: {exc}"
        results.append(
            {
                "name": name,
                "pass": bool(ok),
                "detail": detail,
                "seconds": round(time.perf_counter() - start, 3),
            }
        )
    return {"checks": results, "all_pass": all(r["pass"] for r in results)}

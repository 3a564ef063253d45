import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdht.certify import (
    AuditError,
    BoundCertificate,
    ESup,
    Strategy,
    affine_certificate,
    certify,
    slice_certificate,
    soundness_audit,
    split_certificate,
    trivial_certificate,
    verify_certificate,
)
from mdht.directions import (
    boustrophedon_curve_samples,
    lacunary_uniform,
    product,
    uniform,
)
from mdht.fields import band_limited_noise
from mdht.probes import Probe, estimate_lower_bound
from mdht.replays import (
    replay_3dgen_step,
    replay_algebraic_recursion,
    replay_curve_recursion,
    replay_product_recursion,
    replay_thm3d_constants,
)
from mdht.roundup import up_add, up_mul, up_sqrt


def test_single_and_trivial():
    assert certify(uniform(1), "dyadic-1d").value == 1.0
    cert = certify(uniform(9), "trivial")
    assert cert.value == 9.0 and cert.rule == "TRIVIAL"


def test_dyadic_values():
    assert certify(uniform(8), "dyadic-1d").value == 10.0
    for n in (4, 8, 16, 32, 64):
        expect = 1.0 + 3.0 * math.ceil(math.log2(n))
        assert certify(uniform(n), "dyadic-1d").value == expect
    # non-powers of two follow the same ceil-log formula
    for n in (3, 5, 12, 33):
        expect = 1.0 + 3.0 * math.ceil(math.log2(n))
        assert certify(uniform(n), "dyadic-1d").value == expect


def test_curve_recursion_replay():
    assert replay_curve_recursion(1, 7) == 1.0
    assert replay_curve_recursion(16, 4) == 25.0
    # stays comparable to sqrt(d) log n over a sweep
    for k in range(1, 12):
        for d in (1, 2, 4, 9):
            n = 2**k
            val = replay_curve_recursion(n, d)
            assert val <= 1 + 6.0 * math.sqrt(d) * math.log(n) / math.log(2)


def test_product_recursion_replay():
    assert replay_product_recursion(0).value == 1.0
    r4 = replay_product_recursion(4)
    assert abs(r4.value - (31 + 15 * math.sqrt(2))) <= 1e-12
    assert replay_product_recursion(40).bound_ok


def test_algebraic_recursion_replay():
    rec = replay_algebraic_recursion(2**7, 1, c=1.0)
    assert rec.floor == 1 and rec.value == 1.0 + 5.0 * 7
    below = replay_algebraic_recursion(8, 4, c=1.0 / 16.0)
    assert below.value == 8.0 and below.steps == 0  # below floor: trivial base
    # fitted prefactor against sqrt(d) log n: finite and stable over a sweep
    ratios = []
    for k in range(10, 26):
        rec = replay_algebraic_recursion(2**k, 4, c=1.0 / 16.0)
        ratios.append(rec.value / (math.sqrt(4) * math.log(2**k)))
    assert all(np.isfinite(ratios))
    assert max(ratios) / min(ratios) < 2.0


def test_thm3d_constants():
    cc = replay_thm3d_constants(1.0, 1.0)
    assert cc.c == 1.0 / 16.0
    assert abs(cc.c0 - math.sqrt(cc.c / 8**4)) < 1e-15
    assert cc.a_min == max(2.0 / cc.c0_sq, 5.0 / math.log(2), 2 * (1 / cc.c0_sq + 1))
    for lb in cc.lower_bounds:
        assert cc.a_min >= lb
    # monotone nondecreasing in both arguments
    base = replay_thm3d_constants(1.0, 1.0).a_min
    assert replay_thm3d_constants(2.0, 1.0).a_min >= base
    assert replay_thm3d_constants(1.0, 2.0).a_min >= base
    # the 5/log 2 floor never binds for positive inputs at these scales
    for a1 in (0.5, 1.0, 4.0):
        for a2 in (0.5, 1.0, 4.0):
            cc = replay_thm3d_constants(a1, a2)
            assert cc.a_min > 5.0 / math.log(2)


def test_3dgen_step():
    # tabulated growth function: the conditions force log N > 1/eps^2, so
    # the instance lives at astronomically large (but exactly represented) N
    a1 = 2.0
    eps = 1.0 / (20.0 * a1**0.25)

    def h_table(x):
        return 24.0 if x > 1e200 else 1.0

    step = replay_3dgen_step(10**250, h_table, a1, a=100.0, eps=eps)
    assert abs(step.contraction - 5.0 * a1**0.25 * eps) < 1e-15
    assert step.contraction < 0.5
    assert step.epsilon_ok
    assert step.component_bound == a1 * step.d0**2
    assert step.per_cell_bound == a1 * step.omega_n**-4
    # omega(n) decreasing toward zero along a growing sequence
    h_loglog = lambda n: math.log(1 + math.log(n))
    oms = [h_loglog(n) / math.log(n) for n in (10**9, 10**12, 10**15)]
    assert oms[0] > oms[1] > oms[2]
    with pytest.raises(ValueError, match="h\\(N\\) > 1/eps"):
        replay_3dgen_step(10**250, h_table, a1, 100.0, eps=1e-3)
    with pytest.raises(ValueError, match="omega"):
        replay_3dgen_step(10**6, h_table, a1, 100.0, eps=eps)


def test_engine_matches_replays_bitwise():
    for r in (1, 2, 3):
        omega = product([uniform(2**r), uniform(2**r)], label=f"U{2**r}^2")
        assert certify(omega, "product-grid").value == replay_product_recursion(r).value
    for m in (2, 4):
        bous, d = boustrophedon_curve_samples(m)
        cert = certify(bous, Strategy("curve-pairs", degree=d))
        assert cert.value == replay_curve_recursion(m * m, d)


def test_product_grid_applicability():
    with pytest.raises(ValueError):
        certify(uniform(4), "product-grid")
    with pytest.raises(ValueError):
        certify(product([uniform(4), uniform(2)]), "product-grid")


def test_curve_pairs_needs_degree():
    bous, _ = boustrophedon_curve_samples(2)
    with pytest.raises(ValueError):
        certify(bous, "curve-pairs")


def test_lacunary_mixed_structure():
    omega = lacunary_uniform(3, 4)
    cert = certify(omega, "lacunary-mixed")
    verify_certificate(cert)
    assert cert.rule == "ORTHO"
    assert any(c.rule == "AFFINE" for c in cert.children[1:])
    # reps over 3 blocks, blocks of 4 points each
    expect = (1 + 3 * 2) + 1.0 * ((1 + 3 * 2) + 1)
    assert cert.value == expect


def test_hamsandwich_strategy():
    rng = np.random.default_rng(17)
    pts = set()
    while len(pts) < 40:
        x, y = rng.integers(-100, 100, size=2)
        pts.add((F(int(x), 16), F(int(y), 16)))
    from mdht.directions import DirectionSet

    omega = DirectionSet(2, tuple(sorted(pts)), "random40")
    cert = certify(omega, Strategy("hamsandwich-2d", rounds=3))
    verify_certificate(cert)
    assert cert.value <= 40.0  # never worse than trivial
    if cert.rule == "ORTHO":
        assert cert.e_sup.provenance.startswith("structured:")


def test_affine_slice_split_rules():
    base = certify(uniform(8), "dyadic-1d")
    aff = affine_certificate(base, "affine(U8)")
    sli = slice_certificate(base, "slice(U8)")
    assert aff.value == base.value and sli.value == base.value
    both = split_certificate([base, aff])
    assert both.value == up_add(base.value, aff.value)
    verify_certificate(aff)
    verify_certificate(sli)
    verify_certificate(both)


def test_esup_provenance_guard():
    with pytest.raises(ValueError):
        ESup(3, "sampled")
    ESup(3, "exact")
    ESup(3, "structured:grid-rows")


def test_verify_detects_tampering():
    cert = certify(uniform(16), "dyadic-1d")
    verify_certificate(cert)
    bad = BoundCertificate(cert.omega_label, cert.n_points, cert.value - 1.0,
                           "ORTHO", cert.children, cert.e_sup)
    with pytest.raises(AuditError):
        verify_certificate(bad)
    bad_triv = BoundCertificate("x", 5, 4.0, "TRIVIAL")
    with pytest.raises(AuditError):
        verify_certificate(bad_triv)


def test_soundness_audit():
    omega = uniform(8)
    probes = [Probe(f"r{i}", band_limited_noise((64, 64), (8.0, 8.0), 12, seed=i), i)
              for i in range(3)]
    report = estimate_lower_bound(omega, probes)
    cert = certify(omega, "dyadic-1d")
    assert soundness_audit(cert, report)
    assert soundness_audit(trivial_certificate(omega), report)
    corrupted = BoundCertificate(omega.label, 8, report.max_rayleigh * 0.5, "TRIVIAL")
    with pytest.raises(AuditError):
        # TRIVIAL with wrong value is caught structurally
        soundness_audit(corrupted, report)
    lowball = BoundCertificate(omega.label, 1, 1.0, "SINGLE")
    assert soundness_audit(lowball, report) is False
    with pytest.raises(AuditError, match="label mismatch"):
        soundness_audit(certify(uniform(4), "dyadic-1d"), report)


def test_certificate_json_roundtrip(tmp_path):
    cert = certify(lacunary_uniform(2, 4), "lacunary-mixed")
    path = tmp_path / "cert.json"
    cert.save(path)
    back = BoundCertificate.load(path)
    assert back.value == cert.value  # bit-exact through JSON
    verify_certificate(back)


finite = st.floats(min_value=0.0, max_value=1e12, allow_nan=False,
                   allow_infinity=False)


@settings(max_examples=200, deadline=None)
@given(finite, finite)
def test_roundup_add_dominates(a, b):
    from fractions import Fraction

    assert Fraction(up_add(a, b)) >= Fraction(a) + Fraction(b)
    assert Fraction(up_mul(a, b)) >= Fraction(a) * Fraction(b)


@settings(max_examples=200, deadline=None)
@given(finite)
def test_roundup_sqrt_dominates(x):
    from fractions import Fraction

    s = up_sqrt(x)
    assert Fraction(s) * Fraction(s) >= Fraction(x)

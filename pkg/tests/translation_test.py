"""평행이동 곡선 분류/표본화/완비 그래프 회귀."""
from __future__ import annotations

import logging
import math
import sys
from dataclasses import replace

import numpy as np
from scipy.optimize import brentq

from testutil import raises, run_all

from surface_common import (
    Behavior, InvalidParams, OutsideDomain, RegimeMismatch, SurfaceParams, VerticalPoint,
    critical_H,
)
from translation import (
    TProfile, TranslationClass, build_complete_graph, classify_translation, eval_tprofile,
    graph_constant_dH, principal_curvatures, sample_mu, subcritical_tH,
)

HC3 = critical_H(3)


def _curve(n, H, d, **kw):
    params = SurfaceParams(n, H, d)
    cls, bp = classify_translation(params)
    return params, cls, bp, sample_mu(params, bp, **kw)


# ─── 아임계 상수 ──────────────────────────────────────────────────

def test_tH_and_dH_closed_forms_n2():
    assert abs(subcritical_tH(2, 0.25) - 0.5 * math.log(3.0)) < 1e-12
    assert abs(graph_constant_dH(2, 0.25) - math.sqrt(3.0) / 2.0) < 1e-10


def test_dH_n3():
    assert abs(graph_constant_dH(3, 1.0 / 3.0) - 0.72535) < 1e-4
    raises(RegimeMismatch, subcritical_tH, 3, HC3)
    raises(RegimeMismatch, graph_constant_dH, 2, 0.9)


# ─── 분류표 (n=3 임계) ────────────────────────────────────────────

def _c_oracle(d):
    # n=3 임계: R = (1 + e^{-2t})/2 − t − d
    return brentq(lambda t: 0.5 * (1.0 + math.exp(-2.0 * t)) - t - d, 0.0, 5.0, xtol=1e-15)


def test_convex_case_c_value():
    cls, bp = classify_translation(SurfaceParams(3, HC3, 0.0))
    assert cls is TranslationClass.EMBEDDED_CONVEX_T0
    assert abs(bp.c - 0.6392) < 1e-4
    assert abs(bp.c - _c_oracle(0.0)) < 1e-10
    assert (bp.left_end, bp.right_end) == (0.0, bp.c)
    assert (bp.left_behavior, bp.right_behavior) == (Behavior.HORIZONTAL, Behavior.VERTICAL)


def test_case_table_tags():
    expected = {
        0.5: TranslationClass.EMBEDDED_NONSMOOTH,
        -1.0: TranslationClass.IMMERSED_TM1,
        -0.5: TranslationClass.IMMERSED_SELF_INT,
        -2.0: TranslationClass.IMMERSED_SELF_INT,
    }
    for d, tag in expected.items():
        cls, bp = classify_translation(SurfaceParams(3, HC3, d))
        assert cls is tag, (d, cls)
        assert abs(bp.c - _c_oracle(d)) < 1e-10
    _, bp = classify_translation(SurfaceParams(3, HC3, -1.0))
    assert bp.left_behavior is Behavior.VERTICAL and bp.left_end == 0.0


def test_alpha_for_d_below_minus_one():
    _, bp = classify_translation(SurfaceParams(3, HC3, -2.0))
    # S = cosh² + sinh·cosh + t − 2
    oracle = brentq(lambda t: math.cosh(t) ** 2 + math.sinh(t) * math.cosh(t) + t - 2.0,
                    0.0, 2.0, xtol=1e-15)
    assert abs(bp.alpha - oracle) < 1e-10
    assert abs(bp.alpha - 0.396) < 1e-3
    assert bp.alpha < bp.c
    assert bp.left_end == bp.alpha
    assert bp.sign_change is not None and bp.alpha < bp.sign_change


def test_no_solution_gate():
    for n, H, d in ((3, HC3, 1.0), (3, HC3, 1.5), (3, 1.0, 2.0), (3, 0.6667, 2.0),
                    (2, critical_H(2), 1.0)):
        cls, bp = classify_translation(SurfaceParams(n, H, d))
        assert cls is TranslationClass.NO_SOLUTION, (n, H, d)
        assert bp.no_solution
    params = SurfaceParams(3, HC3, 1.0)
    raises(OutsideDomain, sample_mu, params, classify_translation(params)[1])


def test_finite_slope_at_axis():
    for d in (-0.5, 0.5):
        _, _, bp, curve = _curve(3, HC3, d, samples=100)
        assert bp.left_behavior is Behavior.FINITE_SLOPE
        assert abs(curve.slope[0] - d / math.sqrt(1.0 - d * d)) < 1e-8
        assert abs(curve.meta["junction_angle"] - math.pi / 3.0) < 1e-12


# ─── 일반화 구간 (Unclassified) ───────────────────────────────────

def test_supercritical_n2_closed_form_end():
    # n=2, H=1: R = e^{-t} − sinh t  →  c = ½ ln 3
    cls, bp = classify_translation(SurfaceParams(2, 1.0, 0.0))
    assert cls is TranslationClass.UNCLASSIFIED
    assert abs(bp.right_end - 0.5 * math.log(3.0)) < 1e-10


def test_subcritical_intervals():
    n, H = 3, 1.0 / 3.0
    t_H = subcritical_tH(n, H)
    _, bp = classify_translation(SurfaceParams(n, H, 0.0))
    assert bp.right_end == math.inf and bp.right_behavior is Behavior.UNBOUNDED

    _, bp = classify_translation(SurfaceParams(n, H, 0.9))
    assert bp.c < t_H < bp.c_outer
    assert bp.right_end == bp.c

    _, bp = classify_translation(SurfaceParams(n, H, 1.5))
    assert bp.left_end == bp.c_outer > t_H
    assert bp.left_behavior is Behavior.VERTICAL and bp.right_end == math.inf


def test_eval_tprofile():
    params = SurfaceParams(3, HC3, 0.0)
    assert abs(eval_tprofile(params, TProfile.R, 0.0) - 1.0) < 1e-15
    assert abs(eval_tprofile(params, "S", 0.0) - 1.0) < 1e-15
    t = np.array([0.2, 0.4])
    r = eval_tprofile(params, TProfile.R, t)
    assert np.allclose(r, 0.5 * (1.0 + np.exp(-2.0 * t)) - t, rtol=1e-12)
    raises(OutsideDomain, eval_tprofile, params, TProfile.T, 1.0)
    raises(InvalidParams, eval_tprofile, params, TProfile.R, -0.5)


# ─── 완비 그래프 ──────────────────────────────────────────────────

def test_complete_graph_classification():
    n, H = 3, 1.0 / 3.0
    params = SurfaceParams(n, H, graph_constant_dH(n, H))
    cls, bp = classify_translation(params)
    assert cls is TranslationClass.COMPLETE_GRAPH_T2
    assert bp.left_end == subcritical_tH(n, H)
    assert (bp.left_behavior, bp.right_behavior) == (Behavior.UNBOUNDED, Behavior.UNBOUNDED)


def test_complete_graph_shape():
    n, H = 3, 1.0 / 3.0
    t_H = subcritical_tH(n, H)
    curve = build_complete_graph(n, H, 50.0)
    assert curve.tag == TranslationClass.COMPLETE_GRAPH_T2.value
    assert np.all(np.diff(curve.rho) > 0)
    assert np.all(np.diff(curve.height) > 0)
    near = curve.rho - t_H <= 1e-4
    assert np.any(near) and curve.height[near].max() < -5.0
    outer = curve.rho >= t_H + 1.0
    assert np.max(np.abs(curve.slope[outer])) < 10.0
    assert curve.meta["divergent"] is True
    assert curve.height[np.argmin(np.abs(curve.rho - curve.meta["anchor"]))] == 0.0
    raises(InvalidParams, build_complete_graph, n, H, t_H + 0.5)


def test_sample_mu_routes_complete_graph():
    n, H = 3, 1.0 / 3.0
    params = SurfaceParams(n, H, graph_constant_dH(n, H))
    cls, bp = classify_translation(params)
    curve = sample_mu(params, bp, samples=100, rho_max=20.0)
    assert curve.meta["rho_max"] == 20.0 and len(curve) == 100


# ─── 프로파일 표 ──────────────────────────────────────────────────

def test_S_increases_from_one_plus_d():
    t = np.linspace(0.0, 5.0, 200)
    for n, H, d in ((2, 0.25, 0.0), (3, HC3, -2.0), (3, HC3, 0.5), (4, 1.0, -0.3)):
        s = eval_tprofile(SurfaceParams(n, H, d), TProfile.S, t)
        assert abs(s[0] - (1.0 + d)) < 1e-15, (n, H, d)
        assert np.all(np.diff(s) > 0), (n, H, d)


def test_subcritical_R_leading_term():
    for n, H, d in ((4, 0.5, 0.0), (3, 1.0 / 3.0, 0.2), (2, 0.25, 0.0)):
        params = SurfaceParams(n, H, d)
        t = 30.0
        lead = 0.5 * (1.0 - params.k) * math.cosh(t) ** (n - 2) * math.exp(t)
        ratio = eval_tprofile(params, TProfile.R, t) / lead
        assert abs(ratio - 1.0) < 1e-3, (n, H, d, ratio)


def test_critical_R_tables():
    # n=2: R = e^{-t} − d → −d
    for d in (-0.5, 0.3):
        r = eval_tprofile(SurfaceParams(2, 0.5, d), TProfile.R, 30.0)
        assert abs(r + d) < 1e-12
    t = np.linspace(0.0, 10.0, 200)
    for n in (3, 4):
        r = eval_tprofile(SurfaceParams(n, critical_H(n), 0.0), TProfile.R, t)
        assert np.all(np.diff(r) < 0), n
        assert r[-1] < -5.0


# ─── 수직 끝점 근처 적분 ──────────────────────────────────────────

def test_sampling_critical_n3_all_cases():
    for d in (0.0, 0.5, -0.5, -1.0, -2.0):
        for samples in (40, 120, 400):
            params, cls, bp, curve = _curve(3, HC3, d, samples=samples)
            assert cls is not TranslationClass.UNCLASSIFIED
            assert np.all(np.isfinite(curve.height)), (d, samples)
            assert np.all(np.isfinite(curve.slope[1:-1])), (d, samples)
            r_end = eval_tprofile(params, TProfile.R, bp.right_end)
            assert 0.0 < r_end < 1e-8, (d, r_end)


def test_halving_tolerance_moves_end_heights_little():
    tol = 1e-8
    for d in (0.0, -1.0, -2.0):
        params = SurfaceParams(3, HC3, d)
        _, bp = classify_translation(params)
        a = sample_mu(params, bp, samples=120, tol=tol)
        b = sample_mu(params, bp, samples=120, tol=tol / 2.0)
        for i in (1, -2, -1):
            scale = max(1.0, abs(a.height[i]))
            assert abs(a.height[i] - b.height[i]) < 10 * tol * scale, (d, i)


class _Collect(logging.Handler):
    def __init__(self):
        super().__init__(logging.WARNING)
        self.records = []

    def emit(self, record):
        self.records.append(record)


def test_complete_graph_is_quiet():
    handler = _Collect()
    log = logging.getLogger("numerics")
    log.addHandler(handler)
    try:
        build_complete_graph(3, 1.0 / 3.0, 50.0)
    finally:
        log.removeHandler(handler)
    assert handler.records == [], [r.getMessage() for r in handler.records[:3]]


# ─── 곡률 ────────────────────────────────────────────────────────

def test_principal_curvatures_average_to_H():
    for d in (0.0, 0.5, -2.0):
        params, _, _, curve = _curve(3, HC3, d, samples=80)
        for i in (3, 40, 75):
            k = principal_curvatures(curve, i)
            assert math.isclose((k.k_V + 2 * k.k_P) / 3, params.H, rel_tol=1e-9)
    _, _, _, curve = _curve(3, HC3, 0.0, samples=40)
    raises(VerticalPoint, principal_curvatures, curve, len(curve) - 1)


def test_principal_curvatures_dispatch_rotation():
    from rotation import classify_rotation, sample_lambda
    params = SurfaceParams(2, 1.0, 0.0)
    curve = sample_lambda(params, classify_rotation(params)[1], samples=30)
    k = principal_curvatures(curve, 10)
    assert math.isclose((k.k_V + k.k_P) / 2, 1.0, rel_tol=1e-9)


def test_principal_curvatures_check_sampled_slope():
    for d in (0.0, 0.5):
        params, _, _, curve = _curve(3, HC3, d, samples=80)
        for fake in (123.0, -7.0):
            forged = replace(curve, slope=np.full_like(curve.slope, fake))
            k = principal_curvatures(forged, 40)
            assert abs((k.k_V + 2 * k.k_P) / 3 - params.H) > 1e-3, (d, fake)


if __name__ == "__main__":
    sys.exit(run_all(dict(globals())))

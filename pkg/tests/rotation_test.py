"""회전 곡선 분류/표본화/확장 회귀 — 닫힌 식 끝점과 확장 패턴."""
from __future__ import annotations

import math
import sys
from dataclasses import replace

import numpy as np
from scipy.optimize import brentq

from testutil import raises, run_all

from rotation import (
    Profile, RotationClass, asymptote_rotation, classify_rotation, critical_point_CH,
    eval_profile, extend_curve, lambda_at, rotation_principal_curvatures, sample_lambda,
    self_intersection_radius, sphere_height, unduloid_period,
)
from surface_common import (
    AsymptoteKind, Behavior, BehaviorMismatch, InvalidParams, OutsideDomain, Regime,
    RegimeMismatch, SurfaceParams, VerticalPoint, critical_H,
)


def _curve(n, H, d, **kw):
    params = SurfaceParams(n, H, d)
    cls, bp = classify_rotation(params)
    return params, cls, bp, sample_lambda(params, bp, **kw)


# ─── 닫힌 식 끝점 ────────────────────────────────────────────────

def test_cylinder_left_end_is_ln2():
    cls, bp = classify_rotation(SurfaceParams(2, 0.5, 0.5))
    assert cls is RotationClass.CYLINDER
    assert abs(bp.left_end - math.log(2.0)) < 1e-10
    assert bp.right_end == math.inf
    assert (bp.left_behavior, bp.right_behavior) == (Behavior.VERTICAL, Behavior.UNBOUNDED)
    assert bp.named == {"a": bp.left_end}


def test_sphere_interval_is_zero_to_ln3():
    cls, bp = classify_rotation(SurfaceParams(2, 1.0, 0.0))
    assert cls is RotationClass.SPHERE
    assert bp.left_end == 0.0
    assert abs(bp.right_end - math.log(3.0)) < 1e-10
    assert bp.left_behavior is Behavior.HORIZONTAL


def test_critical_point_and_DH_closed_forms():
    assert abs(critical_point_CH(2, 1.0) - 0.5 * math.log(3.0)) < 1e-12
    _, bp = classify_rotation(SurfaceParams(2, 1.0, 0.1))
    # n=2, coth C = 2:  D_H = sinh C − 2(cosh C − 1) = 2 − √3
    assert abs(bp.D_H - (2.0 - math.sqrt(3.0))) < 1e-12
    raises(RegimeMismatch, critical_point_CH, 2, 0.5)


def test_no_solution_gate_n2_critical():
    for d in (1.0, 1.2):
        cls, bp = classify_rotation(SurfaceParams(2, 0.5, d))
        assert cls is RotationClass.NO_SOLUTION
        assert bp.left_end is None


def test_subcritical_table():
    assert classify_rotation(SurfaceParams(2, 0.25, 0.0))[0] is RotationClass.ENTIRE_GRAPH
    cls, bp = classify_rotation(SurfaceParams(2, 0.25, -0.5))
    assert cls is RotationClass.NODOID_LIKE
    # A = 0.5(cosh − 1) − 0.5 = 0  ⇔  cosh = 2
    assert abs(bp.sign_change - math.acosh(2.0)) < 1e-10
    assert 0.0 < bp.left_end < bp.sign_change
    assert abs(eval_profile(SurfaceParams(2, 0.25, -0.5), Profile.P, bp.left_end)) < 1e-12


def test_supercritical_table():
    cls, bp = classify_rotation(SurfaceParams(2, 1.0, 0.1))
    assert cls is RotationClass.UNDULOID
    assert bp.left_end < bp.C_H < bp.right_end
    assert set(bp.named) == {"b", "c"}

    cls, bp = classify_rotation(SurfaceParams(2, 1.0, -0.2))
    assert cls is RotationClass.NODOID
    assert bp.left_end < bp.sign_change < bp.right_end
    assert set(bp.named) == {"gamma", "beta"}

    cls, bp = classify_rotation(SurfaceParams(2, 1.0, 0.5))
    assert cls is RotationClass.UNCLASSIFIED
    assert bp.f_H_d < 0


def test_regimes_snap_to_critical():
    params = SurfaceParams(3, critical_H(3), 0.0)
    assert params.regime is Regime.CRITICAL
    assert params.k == 1.0 and params.excess == 0.0
    assert SurfaceParams(3, 0.6667, 0.0).regime is Regime.SUPERCRITICAL


# ─── 프로파일 ────────────────────────────────────────────────────

def test_stable_M_at_large_t_critical_n3():
    params = SurfaceParams(3, critical_H(3), 0.0)
    # M = t − (1 − e^{-2t})/2 (n=3 임계, d=0)
    for t in (5.0, 20.0, 30.0):
        expected = t - 0.5 * (1.0 - math.exp(-2.0 * t))
        assert math.isclose(eval_profile(params, Profile.M, t), expected, rel_tol=1e-9)


def test_Q_outside_domain():
    params = SurfaceParams(2, 0.5, 0.5)
    raises(OutsideDomain, eval_profile, params, Profile.Q, 0.1)
    raises(InvalidParams, eval_profile, params, "M", -1.0)
    q = eval_profile(params, "Q", np.array([1.0, 2.0]))
    assert q.shape == (2,) and np.all(q > 0)


# ─── 표본화 ──────────────────────────────────────────────────────

def test_sample_entire_graph_n2_critical_closed_form():
    # n=2 임계, d=0:  λ(ρ) = 2(cosh(ρ/2) − 1)
    _, _, _, curve = _curve(2, 0.5, 0.0, samples=200, rho_max=10.0)
    expected = 2.0 * (np.cosh(curve.rho / 2.0) - 1.0)
    assert np.max(np.abs(curve.height - expected) / np.maximum(1.0, expected)) < 1e-9
    assert curve.slope[0] == 0.0
    assert curve.meta["rho_max"] == 10.0


def test_sample_endpoints_vertical():
    _, _, bp, curve = _curve(2, 1.0, 0.0)
    assert curve.rho[-1] == bp.right_end
    assert curve.slope[-1] == math.inf
    _, _, bp, curve = _curve(2, 1.0, -0.2)
    assert curve.slope[0] == -math.inf and curve.slope[-1] == math.inf


def test_sample_rejects_missing_curve():
    params = SurfaceParams(2, 0.5, 1.2)
    _, bp = classify_rotation(params)
    raises(OutsideDomain, sample_lambda, params, bp)
    raises(InvalidParams, sample_lambda, SurfaceParams(2, 0.5, 0.5),
           classify_rotation(SurfaceParams(2, 0.5, 0.5))[1], 400, 0.5)


def test_lambda_at_matches_samples():
    params, _, bp, curve = _curve(2, 1.0, 0.1, samples=100)
    i = 40
    assert abs(lambda_at(params, bp, float(curve.rho[i])) - curve.height[i]) < 1e-9
    raises(OutsideDomain, lambda_at, params, bp, bp.right_end + 0.1)


def test_sphere_height_and_period():
    h = sphere_height(2, 1.0)
    _, _, bp, curve = _curve(2, 1.0, 0.0)
    assert abs(h - 2.0 * curve.height[-1]) < 1e-9
    raises(RegimeMismatch, sphere_height, 2, 0.5)

    params, _, bp, curve = _curve(2, 1.0, 0.1)
    assert abs(unduloid_period(params, bp) - 2.0 * curve.height[-1]) < 1e-9
    raises(BehaviorMismatch, unduloid_period, SurfaceParams(2, 1.0, 0.0),
           classify_rotation(SurfaceParams(2, 1.0, 0.0))[1])


def test_self_intersection_radius():
    params = SurfaceParams(2, 0.25, -0.5)
    _, bp = classify_rotation(params)
    r = self_intersection_radius(params, bp)
    assert r > bp.sign_change
    assert abs(lambda_at(params, bp, r)) < 1e-8


def test_asymptote_descriptors():
    lin = asymptote_rotation(SurfaceParams(2, 0.25, 0.0))
    assert lin.kind is AsymptoteKind.LINEAR_SLOPE
    assert abs(lin.value - 1.0 / math.sqrt(3.0)) < 1e-14
    exp2 = asymptote_rotation(SurfaceParams(2, 0.5, 0.5))
    assert exp2.kind is AsymptoteKind.EXPONENTIAL_2D
    assert abs(exp2.prefactor - math.sqrt(2.0)) < 1e-14
    assert asymptote_rotation(SurfaceParams(3, critical_H(3), 0.0)).kind is AsymptoteKind.INTEGRAL_3D
    assert asymptote_rotation(SurfaceParams(5, critical_H(5), 0.0)).kind is AsymptoteKind.EXPONENTIAL_ND
    assert asymptote_rotation(SurfaceParams(2, 1.0, 0.0)).kind is AsymptoteKind.COMPACT
    assert asymptote_rotation(SurfaceParams(2, 0.5, 1.0)).kind is AsymptoteKind.NO_CURVE


# ─── 확장 ────────────────────────────────────────────────────────

def test_extend_identity_for_entire_graph():
    _, _, _, curve = _curve(2, 0.25, 0.0, samples=50)
    assert extend_curve(curve) is curve


def test_extend_slice_mirror():
    _, _, _, curve = _curve(2, 0.5, 0.5, samples=50)
    ext = extend_curve(curve)
    assert ext.extended and len(ext) == 2 * len(curve) - 1
    mid = len(curve) - 1
    assert ext.rho[mid] == curve.rho[0]
    assert np.allclose(ext.height[mid - 5] + ext.height[mid + 5], 2.0 * ext.height[mid])
    raises(BehaviorMismatch, extend_curve, ext)


def test_extend_closed_loop_sphere():
    _, _, _, curve = _curve(2, 1.0, 0.0, samples=60)
    ext = extend_curve(curve)
    n = len(curve)
    assert len(ext) == 4 * n - 4
    assert ext.meta["closed"] is True
    assert abs(ext.height.max() - 2.0 * curve.height[-1]) < 1e-12
    assert ext.rho.min() == -curve.rho[-1]


def test_extend_periodic_unduloid():
    _, _, _, curve = _curve(2, 1.0, 0.1, samples=60)
    ext = extend_curve(curve, periods=3)
    per = ext.meta["points_per_period"]
    assert per == 2 * len(curve) - 2
    assert len(ext) == 3 * per + 1
    assert abs(ext.height[per] - (curve.height[0] + ext.meta["period"])) < 1e-12
    raises(InvalidParams, extend_curve, curve, None, 0)


def test_extend_rejects_unknown_tag():
    _, _, _, curve = _curve(2, 0.5, 0.5, samples=20)
    raises(BehaviorMismatch, extend_curve, curve, "Unclassified")
    raises(BehaviorMismatch, extend_curve, curve, RotationClass.SPHERE)


# ─── 수직 끝점 근처 적분 ──────────────────────────────────────────

def test_sampling_sweep_near_vertical_ends():
    sampled = 0
    for n in (2, 3, 4):
        hc = critical_H(n)
        for scale in (0.5, 0.8, 1.0, 1.2, 1.5):
            for d in (-0.5, 0.0, 0.5):
                params = SurfaceParams(n, scale * hc, d)
                cls, bp = classify_rotation(params)
                if cls in (RotationClass.NO_SOLUTION, RotationClass.UNCLASSIFIED):
                    continue
                for samples in (40, 120, 400):
                    curve = sample_lambda(params, bp, samples=samples)
                    assert np.all(np.isfinite(curve.height)), (n, scale, d, samples)
                    assert np.all(np.isfinite(curve.slope[1:-1])), (n, scale, d, samples)
                    sampled += 1
    assert sampled >= 90, sampled


def test_snapped_ends_lie_inside_domain():
    for n, H, d in ((4, 1.125, 0.0), (2, 0.6, 0.5), (3, 1.0, -0.5), (2, 0.5, 0.5)):
        params = SurfaceParams(n, H, d)
        _, bp = classify_rotation(params)
        for end in (bp.left_end, bp.right_end):
            if math.isinf(end) or end == 0.0:
                continue
            m = eval_profile(params, Profile.M, end)
            p = eval_profile(params, Profile.P, end)
            assert m > 0 and p > 0, (n, H, d, end, m, p)
            assert abs(end - _coarse_root(params, end)) < 2e-9


def _coarse_root(params, end):
    # 스냅 전 근: M 또는 P 중 |값| 이 작은 쪽의 영점
    which = (Profile.M if abs(eval_profile(params, Profile.M, end))
             <= abs(eval_profile(params, Profile.P, end)) else Profile.P)
    f = lambda t: eval_profile(params, which, t)
    return brentq(f, end - 1e-3, end + 1e-3, xtol=1e-15)


def test_sphere_n4_and_narrow_unduloid():
    params, cls, bp, curve = _curve(4, 1.125, 0.0, samples=40)
    assert cls is RotationClass.SPHERE
    assert abs(sphere_height(4, 1.125) - 2.0 * curve.height[-1]) < 1e-9

    heights = []
    for samples in (40, 120, 400):
        params, cls, bp, curve = _curve(2, 0.6, 0.5, samples=samples)
        assert cls is RotationClass.UNDULOID
        heights.append(curve.height[-1])
    assert max(heights) - min(heights) < 1e-9
    assert abs(unduloid_period(params, bp) - 2.0 * heights[-1]) < 1e-9


def test_halving_tolerance_moves_end_heights_little():
    tol = 1e-8
    for n, H, d in ((2, 1.0, 0.0), (2, 1.0, 0.1), (2, 0.5, 0.5), (3, 1.0, -0.5)):
        params = SurfaceParams(n, H, d)
        _, bp = classify_rotation(params)
        a = sample_lambda(params, bp, samples=120, tol=tol)
        b = sample_lambda(params, bp, samples=120, tol=tol / 2.0)
        for i in (1, -2, -1):
            scale = max(1.0, abs(a.height[i]))
            assert abs(a.height[i] - b.height[i]) < 10 * tol * scale, (n, H, d, i)


# ─── 곡률 ────────────────────────────────────────────────────────

def test_principal_curvatures_average_to_H():
    for n, H, d in ((3, 1.0, 0.0), (2, 0.25, -0.5), (4, 0.6, 0.3)):
        _, _, _, curve = _curve(n, H, d, samples=80)
        for i in (5, 40, 70):
            k = rotation_principal_curvatures(curve, i)
            assert math.isclose((k.k_V + (n - 1) * k.k_P) / n, H, rel_tol=1e-9)


def test_principal_curvatures_pole_and_vertical():
    _, _, _, curve = _curve(2, 1.0, 0.0, samples=40)
    pole = rotation_principal_curvatures(curve, 0)
    assert (pole.k_V, pole.k_P) == (1.0, 1.0)
    raises(VerticalPoint, rotation_principal_curvatures, curve, len(curve) - 1)


def test_principal_curvatures_check_sampled_slope():
    for n, H, d in ((3, 1.0, 0.0), (2, 0.25, -0.5), (4, 0.6, 0.3)):
        _, _, _, curve = _curve(n, H, d, samples=80)
        for fake in (123.0, -7.0):
            forged = replace(curve, slope=np.full_like(curve.slope, fake))
            k = rotation_principal_curvatures(forged, 40)
            assert abs((k.k_V + (n - 1) * k.k_P) / n - H) > 1e-3, (n, H, d, fake)


def test_second_derivative_matches_finite_difference():
    params, _, _, curve = _curve(2, 1.0, 0.1, samples=80)
    i = 40
    rho = float(curve.rho[i])
    step = 1e-5
    fd = (eval_profile(params, Profile.Q, rho + step)
          - eval_profile(params, Profile.Q, rho - step)) / (2 * step)
    k = rotation_principal_curvatures(curve, i)
    assert abs(k.second_derivative - fd) < 1e-6 * max(1.0, abs(fd))


if __name__ == "__main__":
    sys.exit(run_all(dict(globals())))

"""
회전 CMC 초곡면의 생성 곡선 λ_{H,d}

프로파일 함수 (s = sinh^{n-1}(t), A = nH·I_{n-1}(t) + d):
  M = s − A,   P = s + A,   Q = A / √(M·P)
  λ(ρ) = ∫ Q  (M·P > 0 인 구간)

분류는 H − (n-1)/n 의 부호(영역)와 d 의 부호로 결정된다:

  영역        d = 0         d > 0                 d < 0
  ─────────  ────────────  ────────────────────  ────────────────
  아임계/임계 EntireGraph_S  Cylinder_C  (a, ∞)    NodoidLike_D (α, ∞)
  초임계      Sphere_K      Unduloid_U  (b, c)    Nodoid_N     (γ, β)

예외: n=2 임계에서는 0 < d < 1 일 때만 실린더, 초임계는 0 < d < D_H 에서만 언두로이드.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

import numpy as np

from hypfun import MomentKind, eval_moment
from numerics import (
    Bracket, NearEnd, SingularSpec, cumulative_integral, end_increment, find_zero,
    integrate_singular, node_grid, refine_root, snap_into_domain,
)
from surface_common import (
    DEFAULT_RHO_MAX, DEFAULT_SAMPLES, QUAD_TOL,
    AsymptoteKind, AsymptoteSpec, Behavior, BehaviorMismatch, CurvatureSample,
    CurveKind, InvalidParams, OutsideDomain, Regime, RegimeMismatch,
    SampledCurve, SurfaceParams, VerticalPoint, json_number, unit_slope,
)

logger = logging.getLogger(__name__)

# 수직 끝점에서 이 거리 안쪽은 0 이 되는 인자를 도함수 적분으로 계산
NEAR_END = 0.05


class RotationClass(Enum):
    ENTIRE_GRAPH = "EntireGraph_S"
    CYLINDER = "Cylinder_C"
    NODOID_LIKE = "NodoidLike_D"
    SPHERE = "Sphere_K"
    UNDULOID = "Unduloid_U"
    NODOID = "Nodoid_N"
    NO_SOLUTION = "NoSolution"
    UNCLASSIFIED = "Unclassified"


class Profile(Enum):
    M = "M"
    P = "P"
    Q = "Q"


@dataclass
class RotationBreakpoints:
    """존재 구간 끝점과 임계점"""
    regime: Regime
    tag: str = RotationClass.UNCLASSIFIED.value
    C_H: Optional[float] = None         # coth(C_H) = nH/(n-1), 초임계만
    D_H: Optional[float] = None
    f_H_d: Optional[float] = None       # M_{H,d}(C_H) = D_H − d
    left_end: Optional[float] = None
    right_end: Optional[float] = None
    sign_change: Optional[float] = None  # nH·I_{n-1} + d = 0
    left_behavior: Optional[Behavior] = None
    right_behavior: Optional[Behavior] = None
    named: dict = field(default_factory=dict)   # {"a": .., "alpha": .., ...}

    def to_dict(self) -> dict:
        return {
            "regime": self.regime.value,
            "C_H": json_number(self.C_H),
            "D_H": json_number(self.D_H),
            "f_H_d": json_number(self.f_H_d),
            "left_end": json_number(self.left_end),
            "right_end": json_number(self.right_end),
            "sign_change": json_number(self.sign_change),
            "left_behavior": self.left_behavior.value if self.left_behavior else None,
            "right_behavior": self.right_behavior.value if self.right_behavior else None,
            "named": {k: json_number(v) for k, v in self.named.items()},
        }


# ─── 프로파일 함수 ────────────────────────────────────────────────

def _flux_term(params: SurfaceParams, t):
    """A = nH·I_{n-1}(t) + d"""
    return params.nH * eval_moment(MomentKind.SINH, params.n - 1, t) + params.d


def _profile_m(params: SurfaceParams, t):
    # 선행항을 점화식으로 벗겨낸 형태:
    # M = sinh^{n-2}·(sinh − k·cosh) + k(n-2)·I_{n-3} − d,  sinh − k·cosh = −e^{-t} − (k-1)·cosh
    t = np.asarray(t, dtype=float)
    n, k = params.n, params.k
    with np.errstate(over="ignore", invalid="ignore"):
        head = np.sinh(t) ** (n - 2) * (-np.exp(-t) - params.excess * np.cosh(t))
    if n == 2:
        tail = k
    else:
        tail = k * (n - 2) * eval_moment(MomentKind.SINH, n - 3, t)
    return head + tail - params.d


def _profile_p(params: SurfaceParams, t):
    t = np.asarray(t, dtype=float)
    return np.sinh(t) ** (params.n - 1) + _flux_term(params, t)


def _profile_q(params: SurfaceParams, t):
    """정의역 검사 없는 Q (적분 내부용)"""
    with np.errstate(invalid="ignore", divide="ignore"):
        return _flux_term(params, t) / (np.sqrt(_profile_m(params, t))
                                        * np.sqrt(_profile_p(params, t)))


def _dm(params: SurfaceParams, t):
    """M' = sinh^{n-2}·((n-1)·cosh − nH·sinh)"""
    t = np.asarray(t, dtype=float)
    return np.sinh(t) ** (params.n - 2) * ((params.n - 1) * np.cosh(t) - params.nH * np.sinh(t))


def _dp(params: SurfaceParams, t):
    """P' = sinh^{n-2}·((n-1)·cosh + nH·sinh)"""
    t = np.asarray(t, dtype=float)
    return np.sinh(t) ** (params.n - 2) * ((params.n - 1) * np.cosh(t) + params.nH * np.sinh(t))


def _profile_dq(params: SurfaceParams, t):
    """Q' = g·(A'·g − A·g') / (M·P)^{3/2},  g = sinh^{n-1}, A' = nH·g"""
    t = np.asarray(t, dtype=float)
    n = params.n
    g = np.sinh(t) ** (n - 1)
    dg = (n - 1) * np.sinh(t) ** (n - 2) * np.cosh(t)
    a = _flux_term(params, t)
    mp = _profile_m(params, t) * _profile_p(params, t)
    with np.errstate(invalid="ignore", divide="ignore"):
        return (params.nH * g * g - a * dg) / mp * (g / np.sqrt(mp))


def _scalar(fn, params: SurfaceParams):
    return lambda t: float(fn(params, t))


def _inside(params: SurfaceParams):
    """M > 0 이고 P > 0 (Q 의 정의역)"""
    return lambda t: float(_profile_m(params, t)) > 0.0 and float(_profile_p(params, t)) > 0.0


def _near_q(params: SurfaceParams, end: float, direction: int):
    """수직 끝점 end 에서 direction 쪽으로 u 들어간 Q. 끝점에서 0 이 되는 인자는 증분으로"""
    m_end = float(_profile_m(params, end))
    p_end = float(_profile_p(params, end))
    if abs(m_end) <= abs(p_end):
        base, dfn, other = max(0.0, m_end), _dm, _profile_p
    else:
        base, dfn, other = max(0.0, p_end), _dp, _profile_m

    def q(u: float) -> float:
        t = end + direction * u
        if u > NEAR_END:
            return float(_profile_q(params, t))
        small = base + end_increment(lambda x: dfn(params, x), end, u, direction)
        return float(_flux_term(params, t)) / math.sqrt(small * float(other(params, t)))
    return q


def _near_ends(params: SurfaceParams, lo: float, hi: float,
               left_singular: bool, right_singular: bool) -> NearEnd:
    return NearEnd(left=_near_q(params, lo, 1) if left_singular else None,
                   right=_near_q(params, hi, -1) if right_singular else None)


def eval_profile(params: SurfaceParams, which: Union[Profile, str], t):
    """M, P, Q 값. Q 는 M·P ≤ 0 이면 OutsideDomain"""
    which = Profile(which) if isinstance(which, str) else which
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0):
        raise InvalidParams("t ≥ 0 이어야 합니다")
    if which is Profile.M:
        out = _profile_m(params, arr)
    elif which is Profile.P:
        out = _profile_p(params, arr)
    else:
        m = _profile_m(params, arr)
        p = _profile_p(params, arr)
        if np.any(m * p <= 0) or np.any(m < 0):
            raise OutsideDomain(f"M·P ≤ 0 인 점에서 Q 를 요청했습니다 (params={params})")
        out = _flux_term(params, arr) / (np.sqrt(m) * np.sqrt(p))
    out = np.asarray(out, dtype=float)
    return float(out) if np.ndim(t) == 0 else out


# ─── 임계점 ───────────────────────────────────────────────────────

def critical_point_CH(n: int, H: float) -> float:
    """coth(C_H) = nH/(n-1) 의 양의 근. 초임계 전용"""
    params = SurfaceParams(n, H, 0.0)
    if params.regime is not Regime.SUPERCRITICAL:
        raise RegimeMismatch(f"C_H 는 H > (n-1)/n 에서만 정의됩니다: n={n}, H={H}")
    # coth C = k  ⇔  C = ½·ln((k+1)/(k−1)) = ½·log1p(2/(k−1))
    return 0.5 * math.log1p(2.0 / params.excess)


def _dh_constant(params: SurfaceParams, C_H: float) -> float:
    """D_H = sinh^{n-1}(C_H) − nH·I_{n-1}(C_H)"""
    return float(_profile_m(params.with_d(0.0), C_H))


# ─── 분류 ─────────────────────────────────────────────────────────

def classify_rotation(params: SurfaceParams) -> tuple[RotationClass, RotationBreakpoints]:
    """(영역, d 부호) 표에 따라 분류하고 끝점을 계산한다"""
    regime = params.regime
    d = params.d
    bp = RotationBreakpoints(regime=regime)
    m_fn = _scalar(_profile_m, params)
    p_fn = _scalar(_profile_p, params)
    a_fn = _scalar(_flux_term, params)
    inside = _inside(params)

    def snap(root: float, direction: int) -> float:
        # 근을 M·P > 0 쪽으로 옮겨 끝점 근처 제곱근이 항상 정의되게 한다
        return snap_into_domain(inside, root, direction)

    if regime is Regime.SUPERCRITICAL:
        bp.C_H = critical_point_CH(params.n, params.H)
        bp.D_H = _dh_constant(params, bp.C_H)
        bp.f_H_d = bp.D_H - d

    def done(cls: RotationClass) -> tuple[RotationClass, RotationBreakpoints]:
        bp.tag = cls.value
        logger.debug("classify_rotation %s → %s %s", params, cls.value, bp.named)
        return cls, bp

    if regime is not Regime.SUPERCRITICAL:
        if d == 0:
            bp.left_end, bp.right_end = 0.0, math.inf
            bp.left_behavior, bp.right_behavior = Behavior.HORIZONTAL, Behavior.UNBOUNDED
            return done(RotationClass.ENTIRE_GRAPH)
        if d > 0:
            # n=2 임계에서 M 은 −d 에서 1−d 로 증가 → 0 < d < 1 에서만 영점
            if regime is Regime.CRITICAL and params.n == 2 and d >= 1:
                return done(RotationClass.NO_SOLUTION)
            a = snap(find_zero(m_fn, 0.0), 1)
            bp.left_end, bp.right_end = a, math.inf
            bp.left_behavior, bp.right_behavior = Behavior.VERTICAL, Behavior.UNBOUNDED
            bp.named = {"a": a}
            return done(RotationClass.CYLINDER)
        alpha = snap(find_zero(p_fn, 0.0), 1)
        bp.left_end, bp.right_end = alpha, math.inf
        bp.left_behavior, bp.right_behavior = Behavior.VERTICAL, Behavior.UNBOUNDED
        bp.sign_change = find_zero(a_fn, 0.0)
        bp.named = {"alpha": alpha}
        return done(RotationClass.NODOID_LIKE)

    # 초임계
    C_H = bp.C_H
    if d == 0:
        a = snap(find_zero(m_fn, C_H), -1)
        bp.left_end, bp.right_end = 0.0, a
        bp.left_behavior, bp.right_behavior = Behavior.HORIZONTAL, Behavior.VERTICAL
        bp.named = {"a": a}
        return done(RotationClass.SPHERE)
    if d > 0:
        if bp.f_H_d <= 0:
            # 표가 다루지 않는 경우: f_H(d) ≤ 0 증거만 남긴다
            return done(RotationClass.UNCLASSIFIED)
        b = snap(refine_root(m_fn, Bracket(0.0, C_H, -1, 1)), 1)
        c = snap(find_zero(m_fn, C_H), -1)
        bp.left_end, bp.right_end = b, c
        bp.left_behavior = bp.right_behavior = Behavior.VERTICAL
        bp.named = {"b": b, "c": c}
        return done(RotationClass.UNDULOID)
    gamma = snap(find_zero(p_fn, 0.0), 1)
    beta = snap(find_zero(m_fn, C_H), -1)
    bp.left_end, bp.right_end = gamma, beta
    bp.left_behavior = bp.right_behavior = Behavior.VERTICAL
    bp.sign_change = find_zero(a_fn, 0.0)
    bp.named = {"gamma": gamma, "beta": beta}
    return done(RotationClass.NODOID)


def _require_curve(bp: RotationBreakpoints) -> None:
    if bp.tag in (RotationClass.NO_SOLUTION.value, RotationClass.UNCLASSIFIED.value):
        raise OutsideDomain(f"생성 곡선이 없는 분류입니다: {bp.tag}")


# ─── 표본화 ───────────────────────────────────────────────────────

def _end_slope(params: SurfaceParams, t: float, behavior: Behavior) -> float:
    if behavior is Behavior.HORIZONTAL:
        return 0.0
    if behavior is Behavior.VERTICAL:
        return math.copysign(math.inf, float(_flux_term(params, t)))
    return float(_profile_q(params, t))


def sample_lambda(params: SurfaceParams, bp: RotationBreakpoints,
                  samples: int = DEFAULT_SAMPLES, rho_max: Optional[float] = None,
                  tol: float = QUAD_TOL) -> SampledCurve:
    """λ_{H,d} 를 기본 호 위에서 표본화. 높이는 왼쪽 끝에서 0"""
    _require_curve(bp)
    lo = bp.left_end
    if math.isinf(bp.right_end):
        hi = DEFAULT_RHO_MAX if rho_max is None else float(rho_max)
        if not hi > lo:
            raise InvalidParams(f"rho_max={hi} 가 왼쪽 끝 {lo} 보다 커야 합니다")
    else:
        hi = bp.right_end
    right_behavior = bp.right_behavior
    left_singular = bp.left_behavior is Behavior.VERTICAL
    right_singular = right_behavior is Behavior.VERTICAL

    nodes = node_grid(lo, hi, samples, left_singular, right_singular)
    q = _scalar(_profile_q, params)
    near = _near_ends(params, lo, hi, left_singular, right_singular)
    heights = cumulative_integral(q, nodes, left_singular, right_singular, tol, near)

    slopes = np.empty_like(nodes)
    slopes[1:-1] = _profile_q(params, nodes[1:-1])
    slopes[0] = _end_slope(params, lo, bp.left_behavior)
    slopes[-1] = _end_slope(params, hi, right_behavior)

    logger.debug("sample_lambda %s: [%.6g, %.6g] %d 표본, 높이 %.6g",
                 params, lo, hi, samples, heights[-1])
    return SampledCurve(
        kind=CurveKind.ROTATION, params=params,
        rho=nodes, height=heights, slope=slopes,
        left_behavior=bp.left_behavior, right_behavior=right_behavior,
        tag=bp.tag,
        meta={"anchor": float(lo), "rho_max": float(hi), "samples": int(samples)},
    )


def lambda_at(params: SurfaceParams, bp: RotationBreakpoints, rho: float,
              tol: float = QUAD_TOL) -> float:
    """기본 호의 앵커에서 rho 까지 λ"""
    _require_curve(bp)
    if not bp.left_end <= rho <= bp.right_end:
        raise OutsideDomain(f"rho={rho} 가 [{bp.left_end}, {bp.right_end}] 밖입니다")
    spec = SingularSpec(left_singular=bp.left_behavior is Behavior.VERTICAL,
                        right_singular=(rho == bp.right_end
                                        and bp.right_behavior is Behavior.VERTICAL))
    near = _near_ends(params, bp.left_end, rho, spec.left_singular, spec.right_singular)
    return integrate_singular(_scalar(_profile_q, params), bp.left_end, rho, spec, tol, near)


def sphere_height(n: int, H: float, tol: float = QUAD_TOL) -> float:
    """초임계 d=0 구면 K_H 의 전체 높이 2·λ(a)"""
    cls, bp = classify_rotation(SurfaceParams(n, H, 0.0))
    if cls is not RotationClass.SPHERE:
        raise RegimeMismatch(f"구면은 H > (n-1)/n 에서만 존재합니다: n={n}, H={H}")
    return 2.0 * lambda_at(SurfaceParams(n, H, 0.0), bp, bp.right_end, tol)


def unduloid_period(params: SurfaceParams, bp: RotationBreakpoints,
                    tol: float = QUAD_TOL) -> float:
    """언두로이드/노도이드의 수직 주기 2·(λ(right) − λ(left))"""
    if bp.tag not in (RotationClass.UNDULOID.value, RotationClass.NODOID.value):
        raise BehaviorMismatch(f"주기 곡선이 아닙니다: {bp.tag}")
    return 2.0 * lambda_at(params, bp, bp.right_end, tol)


def self_intersection_radius(params: SurfaceParams, bp: RotationBreakpoints,
                             tol: float = QUAD_TOL) -> float:
    """노도이드형 곡면에서 대칭 확장된 두 가지가 높이 0 에서 만나는 반지름"""
    if bp.tag != RotationClass.NODOID_LIKE.value:
        raise BehaviorMismatch(f"노도이드형 곡선이 아닙니다: {bp.tag}")
    h = lambda rho: lambda_at(params, bp, rho, tol)
    return find_zero(h, bp.sign_change)


# ─── 점근 ─────────────────────────────────────────────────────────

def asymptote_rotation(params: SurfaceParams) -> AsymptoteSpec:
    """무한 곡선의 점근 형태"""
    regime = params.regime
    n, d = params.n, params.d
    if regime is Regime.SUPERCRITICAL:
        return AsymptoteSpec(AsymptoteKind.COMPACT, note="compact")
    if regime is Regime.SUBCRITICAL:
        x = params.k
        return AsymptoteSpec(AsymptoteKind.LINEAR_SLOPE, value=x / math.sqrt(1.0 - x * x))
    if n == 2:
        if d >= 1:
            return AsymptoteSpec(AsymptoteKind.NO_CURVE, note="n=2 임계는 d < 1 에서만 해가 존재")
        return AsymptoteSpec(AsymptoteKind.EXPONENTIAL_2D,
                             prefactor=1.0 / math.sqrt(1.0 - d), rate=0.5)
    if n == 3:
        return AsymptoteSpec(AsymptoteKind.INTEGRAL_3D, prefactor=1.0 / (2.0 * math.sqrt(2.0)))
    return AsymptoteSpec(AsymptoteKind.EXPONENTIAL_ND,
                         note="a(n), b(n) 는 로그 기울기 회귀로 추정")


# ─── 대칭/주기 확장 ───────────────────────────────────────────────

_IDENTITY = {"EntireGraph_S", "CompleteGraph_T2"}
_SLICE_MIRROR = {"Cylinder_C", "NodoidLike_D"}
_CLOSED_LOOP = {"Sphere_K", "EmbeddedConvex_T0", "EmbeddedNonsmooth"}
_PERIODIC = {"Unduloid_U", "Nodoid_N", "Immersed_Tm1", "ImmersedSelfInt"}


def _expect(ok: bool, curve: SampledCurve, tag: str) -> None:
    if not ok:
        raise BehaviorMismatch(
            f"{tag}: 끝점 거동 ({curve.left_behavior.value}, "
            f"{curve.right_behavior.value}) 이 확장 조건과 맞지 않습니다")


def extend_curve(curve: SampledCurve, cls: Union[Enum, str, None] = None,
                 periods: int = 2) -> SampledCurve:
    """기본 호를 대칭/주기로 확장. 회전/평행이동 분류 태그 모두 받는다"""
    tag = curve.tag if cls is None else (cls.value if isinstance(cls, Enum) else str(cls))
    if curve.extended:
        raise BehaviorMismatch("이미 확장된 곡선입니다")
    rho, h, sl = curve.rho, curve.height, curve.slope
    lb, rb = curve.left_behavior, curve.right_behavior
    meta = dict(curve.meta)

    if tag in _IDENTITY:
        return curve
    if tag in _SLICE_MIRROR:
        _expect(lb is Behavior.VERTICAL, curve, tag)
        h0 = h[0]
        new_rho = np.concatenate((rho[::-1], rho[1:]))
        new_h = np.concatenate((2 * h0 - h[::-1], h[1:]))
        new_sl = np.concatenate((-sl[::-1], sl[1:]))
        meta["extension"] = "slice_mirror"
    elif tag in _CLOSED_LOOP:
        _expect(lb in (Behavior.HORIZONTAL, Behavior.FINITE_SLOPE)
                and rb is Behavior.VERTICAL and rho[0] == 0.0, curve, tag)
        top = h[-1]
        r_back, h_back, s_back = rho[::-1][1:], h[::-1][1:], sl[::-1][1:]
        new_rho = np.concatenate((rho, r_back, -rho[1:], -r_back[:-1]))
        new_h = np.concatenate((h, 2 * top - h_back, 2 * top - h[1:], h_back[:-1]))
        new_sl = np.concatenate((sl, -s_back, sl[1:], -s_back[:-1]))
        meta["extension"] = "closed_loop"
        meta["closed"] = True
    elif tag in _PERIODIC:
        _expect(rb is Behavior.VERTICAL
                and lb in (Behavior.VERTICAL, Behavior.FINITE_SLOPE), curve, tag)
        if periods < 1:
            raise InvalidParams(f"periods ≥ 1 이어야 합니다: {periods}")
        top = h[-1]
        period = 2.0 * (top - h[0])
        arc_rho = np.concatenate((rho, rho[::-1][1:]))
        arc_h = np.concatenate((h, 2 * top - h[::-1][1:]))
        arc_sl = np.concatenate((sl, -sl[::-1][1:]))
        per = len(arc_rho) - 1
        rs, hs, ss = [arc_rho], [arc_h], [arc_sl]
        for k in range(1, periods):
            rs.append(arc_rho[1:])
            hs.append(arc_h[1:] + k * period)
            ss.append(arc_sl[1:])
        new_rho, new_h, new_sl = map(np.concatenate, (rs, hs, ss))
        meta.update(extension="periodic", period=float(period),
                    periods=int(periods), points_per_period=int(per))
    else:
        raise BehaviorMismatch(f"확장 규칙이 없는 분류입니다: {tag}")

    return SampledCurve(
        kind=curve.kind, params=curve.params,
        rho=new_rho, height=new_h, slope=new_sl,
        left_behavior=lb, right_behavior=rb,
        tag=curve.tag, extended=True, meta=meta,
    )


# ─── 곡률 ─────────────────────────────────────────────────────────

def rotation_principal_curvatures(curve: SampledCurve, i: int) -> CurvatureSample:
    """k_V = λ''·(1+slope²)^{-3/2},  k_P = φ·coth ρ  (φ = slope/√(1+slope²)).

    λ'' 는 Q 를 닫힌 식으로 미분한 Q'(ρ), slope 는 표본값이다.
    표본 기울기가 Q 와 맞을 때만 k_V + (n-1)·k_P = nH 가 성립한다.
    """
    if curve.kind is not CurveKind.ROTATION:
        raise InvalidParams("회전 곡선이 아닙니다")
    slope = float(curve.slope[i])
    rho = float(curve.rho[i])
    if math.isinf(slope):
        raise VerticalPoint(f"수직 접선 표본입니다: i={i}, rho={rho}")
    if rho == 0.0:
        # 극점: 배꼽점, 두 주곡률 모두 H
        return CurvatureSample(curve.params.H, curve.params.H, 0.0, curve.params.H)
    phi = float(unit_slope(slope))
    coth = 1.0 / math.tanh(rho)
    second = float(_profile_dq(curve.params, rho))
    k_V = second * (1.0 + slope * slope) ** -1.5
    return CurvatureSample(k_V=k_V, k_P=phi * coth, at_rho=rho, second_derivative=second)

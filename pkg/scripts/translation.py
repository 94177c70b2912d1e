"""
평행이동 CMC 초곡면의 생성 곡선 μ_{H,d}

프로파일 함수 (c = cosh^{n-1}(t), A = nH·J_{n-1}(t) + d):
  R = c − A,   S = c + A,   T = A / √(R·S)
  μ(ρ) = ∫ T

S 는 1+d 에서 ∞ 로 증가. R 은 R(0) = 1−d 이고
  - 아임계: t_H (tanh t_H = nH/(n-1)) 에서 최소 후 ∞ 로 증가
  - 임계 n ≥ 3 / 초임계: 감소하여 −∞ (n=2 임계는 −d 로 수렴)

H = (n-1)/n, n ≥ 3 의 분류:
  d ≥ 1        → NoSolution
  d = 0        → EmbeddedConvex_T0      [0, c]
  0 < d < 1    → EmbeddedNonsmooth      [0, c]
  d = −1       → Immersed_Tm1           [0, c]
  −1 < d < 0   → ImmersedSelfInt        [0, c]
  d < −1       → ImmersedSelfInt        [α, c]
아임계에서 d = d_H 이면 (t_H, ∞) 위의 완비 비전체 그래프.
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
    Bracket, NearEnd, cumulative_integral, end_increment, find_zero, integrate_singular,
    node_grid, refine_root, snap_into_domain,
)
from surface_common import (
    DEFAULT_RHO_MAX, DEFAULT_SAMPLES, QUAD_TOL,
    Behavior, CurvatureSample, CurveKind, InvalidParams, OutsideDomain,
    Regime, RegimeMismatch, SampledCurve, SurfaceParams, VerticalPoint,
    json_number, unit_slope,
)

logger = logging.getLogger(__name__)

# 완비 그래프: t_H 에 가장 가까운 표본 거리 (R 이 이중 영점이라 더 가까우면 반올림 수준)
GRAPH_DELTA_MIN = 1e-6
GRAPH_RHO_MAX = 50.0

# 수직 끝점에서 이 거리 안쪽은 0 이 되는 인자를 도함수 적분으로 계산
NEAR_END = 0.05


class TranslationClass(Enum):
    EMBEDDED_CONVEX_T0 = "EmbeddedConvex_T0"
    EMBEDDED_NONSMOOTH = "EmbeddedNonsmooth"
    IMMERSED_TM1 = "Immersed_Tm1"
    IMMERSED_SELF_INT = "ImmersedSelfInt"
    COMPLETE_GRAPH_T2 = "CompleteGraph_T2"
    NO_SOLUTION = "NoSolution"
    UNCLASSIFIED = "Unclassified"


class TProfile(Enum):
    R = "R"
    S = "S"
    T = "T"


@dataclass
class TranslationBreakpoints:
    regime: Regime
    tag: str = TranslationClass.UNCLASSIFIED.value
    t_H: Optional[float] = None
    d_H: Optional[float] = None
    alpha: Optional[float] = None      # S 의 영점 (d < −1)
    c: Optional[float] = None          # R 의 첫 영점
    c_outer: Optional[float] = None    # 아임계 R 의 두 번째 영점
    sign_change: Optional[float] = None
    no_solution: bool = False
    left_end: Optional[float] = None
    right_end: Optional[float] = None
    left_behavior: Optional[Behavior] = None
    right_behavior: Optional[Behavior] = None

    @property
    def named(self) -> dict:
        out = {}
        for key in ("alpha", "c", "c_outer", "t_H"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        return out

    def to_dict(self) -> dict:
        return {
            "regime": self.regime.value,
            "t_H": json_number(self.t_H),
            "d_H": json_number(self.d_H),
            "alpha": json_number(self.alpha),
            "c": json_number(self.c),
            "c_outer": json_number(self.c_outer),
            "sign_change": json_number(self.sign_change),
            "no_solution": self.no_solution,
            "left_end": json_number(self.left_end),
            "right_end": json_number(self.right_end),
            "left_behavior": self.left_behavior.value if self.left_behavior else None,
            "right_behavior": self.right_behavior.value if self.right_behavior else None,
        }


# ─── 프로파일 함수 ────────────────────────────────────────────────

def _flux_term(params: SurfaceParams, t):
    """A = nH·J_{n-1}(t) + d"""
    return params.nH * eval_moment(MomentKind.COSH, params.n - 1, t) + params.d


def _profile_r(params: SurfaceParams, t):
    # R = cosh^{n-2}·(cosh − k·sinh) − k(n-2)·J_{n-3} − d,  cosh − k·sinh = e^{-t} − (k-1)·sinh
    t = np.asarray(t, dtype=float)
    n, k = params.n, params.k
    with np.errstate(over="ignore", invalid="ignore"):
        head = np.cosh(t) ** (n - 2) * (np.exp(-t) - params.excess * np.sinh(t))
    tail = 0.0 if n == 2 else k * (n - 2) * eval_moment(MomentKind.COSH, n - 3, t)
    return head - tail - params.d


def _profile_s(params: SurfaceParams, t):
    t = np.asarray(t, dtype=float)
    return np.cosh(t) ** (params.n - 1) + _flux_term(params, t)


def _profile_t(params: SurfaceParams, t):
    with np.errstate(invalid="ignore", divide="ignore"):
        return _flux_term(params, t) / (np.sqrt(_profile_r(params, t))
                                        * np.sqrt(_profile_s(params, t)))


def _dr(params: SurfaceParams, t):
    """R' = cosh^{n-2}·((n-1)·sinh − nH·cosh)"""
    t = np.asarray(t, dtype=float)
    return np.cosh(t) ** (params.n - 2) * ((params.n - 1) * np.sinh(t) - params.nH * np.cosh(t))


def _ds(params: SurfaceParams, t):
    """S' = cosh^{n-2}·((n-1)·sinh + nH·cosh)"""
    t = np.asarray(t, dtype=float)
    return np.cosh(t) ** (params.n - 2) * ((params.n - 1) * np.sinh(t) + params.nH * np.cosh(t))


def _profile_dt(params: SurfaceParams, t):
    """T' = g·(nH·g² − A·g') / (R·S)^{3/2},  g = cosh^{n-1}"""
    t = np.asarray(t, dtype=float)
    n = params.n
    g = np.cosh(t) ** (n - 1)
    dg = (n - 1) * np.cosh(t) ** (n - 2) * np.sinh(t)
    a = _flux_term(params, t)
    rs = _profile_r(params, t) * _profile_s(params, t)
    with np.errstate(invalid="ignore", divide="ignore"):
        return (params.nH * g * g - a * dg) / rs * (g / np.sqrt(rs))


def _scalar(fn, params: SurfaceParams):
    return lambda t: float(fn(params, t))


def _inside(params: SurfaceParams):
    """R > 0 이고 S > 0 (T 의 정의역)"""
    return lambda t: float(_profile_r(params, t)) > 0.0 and float(_profile_s(params, t)) > 0.0


def _near_t(params: SurfaceParams, end: float, direction: int):
    """수직 끝점 end 에서 direction 쪽으로 u 들어간 T. 끝점에서 0 이 되는 인자는 증분으로"""
    r_end = float(_profile_r(params, end))
    s_end = float(_profile_s(params, end))
    if abs(r_end) <= abs(s_end):
        base, dfn, other = max(0.0, r_end), _dr, _profile_s
    else:
        base, dfn, other = max(0.0, s_end), _ds, _profile_r

    def t_near(u: float) -> float:
        t = end + direction * u
        if u > NEAR_END:
            return float(_profile_t(params, t))
        small = base + end_increment(lambda x: dfn(params, x), end, u, direction)
        return float(_flux_term(params, t)) / math.sqrt(small * float(other(params, t)))
    return t_near


def _near_ends(params: SurfaceParams, lo: float, hi: float,
               left_singular: bool, right_singular: bool) -> NearEnd:
    return NearEnd(left=_near_t(params, lo, 1) if left_singular else None,
                   right=_near_t(params, hi, -1) if right_singular else None)


def eval_tprofile(params: SurfaceParams, which: Union[TProfile, str], t):
    """R, S, T 값. T 는 R·S ≤ 0 이면 OutsideDomain"""
    which = TProfile(which) if isinstance(which, str) else which
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0):
        raise InvalidParams("t ≥ 0 이어야 합니다")
    if which is TProfile.R:
        out = _profile_r(params, arr)
    elif which is TProfile.S:
        out = _profile_s(params, arr)
    else:
        r = _profile_r(params, arr)
        s = _profile_s(params, arr)
        if np.any(r * s <= 0) or np.any(r < 0):
            raise OutsideDomain(f"R·S ≤ 0 인 점에서 T 를 요청했습니다 (params={params})")
        out = _flux_term(params, arr) / (np.sqrt(r) * np.sqrt(s))
    out = np.asarray(out, dtype=float)
    return float(out) if np.ndim(t) == 0 else out


# ─── 아임계 상수 ──────────────────────────────────────────────────

def _subcritical(n: int, H: float) -> SurfaceParams:
    params = SurfaceParams(n, H, 0.0)
    if params.regime is not Regime.SUBCRITICAL:
        raise RegimeMismatch(f"0 < H < (n-1)/n 이어야 합니다: n={n}, H={H}")
    return params


def subcritical_tH(n: int, H: float) -> float:
    """tanh(t_H) = nH/(n-1)"""
    return math.atanh(_subcritical(n, H).k)


def graph_constant_dH(n: int, H: float) -> float:
    """R_{H,d_H}(t_H) = 0 이 되는 d_H = cosh^{n-1}(t_H) − nH·J_{n-1}(t_H)"""
    params = _subcritical(n, H)
    return float(_profile_r(params, subcritical_tH(n, H)))


# ─── 분류 ─────────────────────────────────────────────────────────

def _left_end(params: SurfaceParams, bp: TranslationBreakpoints) -> None:
    d = params.d
    if d < -1:
        alpha = find_zero(_scalar(_profile_s, params), 0.0)
        bp.alpha = snap_into_domain(_inside(params), alpha, 1)
        bp.left_end, bp.left_behavior = bp.alpha, Behavior.VERTICAL
    elif d == -1:
        bp.left_end, bp.left_behavior = 0.0, Behavior.VERTICAL
    elif d == 0:
        bp.left_end, bp.left_behavior = 0.0, Behavior.HORIZONTAL
    else:
        bp.left_end, bp.left_behavior = 0.0, Behavior.FINITE_SLOPE


def _right_end(params: SurfaceParams, bp: TranslationBreakpoints) -> None:
    r_fn = _scalar(_profile_r, params)
    inside = _inside(params)
    d = params.d
    regime = params.regime
    if regime is Regime.SUBCRITICAL:
        r_min = bp.d_H - d          # R_{H,d}(t_H)
        if d >= 1:
            # R(0) ≤ 0: t_H 너머의 두 번째 영점부터 시작하는 호
            bp.c_outer = snap_into_domain(inside, find_zero(r_fn, bp.t_H), 1)
            bp.left_end, bp.left_behavior = bp.c_outer, Behavior.VERTICAL
            bp.right_end, bp.right_behavior = math.inf, Behavior.UNBOUNDED
        elif r_min > 0:
            bp.right_end, bp.right_behavior = math.inf, Behavior.UNBOUNDED
        else:
            c = refine_root(r_fn, Bracket(bp.left_end, bp.t_H, 1, -1))
            bp.c = snap_into_domain(inside, c, -1)
            bp.c_outer = find_zero(r_fn, bp.t_H)
            bp.right_end, bp.right_behavior = bp.c, Behavior.VERTICAL
        return
    if regime is Regime.CRITICAL and params.n == 2 and d <= 0:
        # R = e^{-t} − d > 0
        bp.right_end, bp.right_behavior = math.inf, Behavior.UNBOUNDED
        return
    bp.c = snap_into_domain(inside, find_zero(r_fn, bp.left_end), -1)
    bp.right_end, bp.right_behavior = bp.c, Behavior.VERTICAL


def classify_translation(params: SurfaceParams) -> tuple[TranslationClass, TranslationBreakpoints]:
    regime = params.regime
    d = params.d
    bp = TranslationBreakpoints(regime=regime)

    def done(cls: TranslationClass) -> tuple[TranslationClass, TranslationBreakpoints]:
        bp.tag = cls.value
        logger.debug("classify_translation %s → %s %s", params, cls.value, bp.named)
        return cls, bp

    if regime is Regime.SUBCRITICAL:
        bp.t_H = subcritical_tH(params.n, params.H)
        bp.d_H = graph_constant_dH(params.n, params.H)
        if math.isclose(d, bp.d_H, rel_tol=1e-9, abs_tol=1e-12):
            bp.left_end, bp.right_end = bp.t_H, math.inf
            bp.left_behavior = bp.right_behavior = Behavior.UNBOUNDED
            return done(TranslationClass.COMPLETE_GRAPH_T2)
    elif d >= 1:
        # R 은 1−d ≤ 0 에서 감소 → 제곱근이 존재하지 않음
        bp.no_solution = True
        return done(TranslationClass.NO_SOLUTION)

    _left_end(params, bp)
    _right_end(params, bp)
    if d < 0:
        bp.sign_change = find_zero(_scalar(_flux_term, params), 0.0)

    if regime is not Regime.CRITICAL or params.n == 2:
        return done(TranslationClass.UNCLASSIFIED)
    if d == 0:
        return done(TranslationClass.EMBEDDED_CONVEX_T0)
    if d > 0:
        return done(TranslationClass.EMBEDDED_NONSMOOTH)
    if d == -1:
        return done(TranslationClass.IMMERSED_TM1)
    return done(TranslationClass.IMMERSED_SELF_INT)


# ─── 표본화 ───────────────────────────────────────────────────────

def _end_slope(params: SurfaceParams, t: float, behavior: Behavior) -> float:
    if behavior is Behavior.HORIZONTAL:
        return 0.0
    if behavior is Behavior.VERTICAL:
        return math.copysign(math.inf, float(_flux_term(params, t)))
    return float(_profile_t(params, t))


def sample_mu(params: SurfaceParams, bp: TranslationBreakpoints,
              samples: int = DEFAULT_SAMPLES, rho_max: Optional[float] = None,
              tol: float = QUAD_TOL) -> SampledCurve:
    """μ_{H,d} 표본화. 높이는 왼쪽 끝에서 0"""
    if bp.no_solution or bp.left_end is None:
        raise OutsideDomain(f"생성 곡선이 없는 분류입니다: {bp.tag}")
    if bp.tag == TranslationClass.COMPLETE_GRAPH_T2.value:
        return build_complete_graph(params.n, params.H,
                                    GRAPH_RHO_MAX if rho_max is None else rho_max,
                                    samples, tol)
    if bp.tag == TranslationClass.UNCLASSIFIED.value:
        logger.warning("분류 표가 없는 (H, d), 첫 호를 best-effort 로 표본화: %s", params)

    lo = bp.left_end
    if math.isinf(bp.right_end):
        hi = DEFAULT_RHO_MAX if rho_max is None else float(rho_max)
        if not hi > lo:
            raise InvalidParams(f"rho_max={hi} 가 왼쪽 끝 {lo} 보다 커야 합니다")
    else:
        hi = bp.right_end
    left_singular = bp.left_behavior is Behavior.VERTICAL
    right_singular = bp.right_behavior is Behavior.VERTICAL

    nodes = node_grid(lo, hi, samples, left_singular, right_singular)
    near = _near_ends(params, lo, hi, left_singular, right_singular)
    heights = cumulative_integral(_scalar(_profile_t, params), nodes,
                                  left_singular, right_singular, tol, near)
    slopes = np.empty_like(nodes)
    slopes[1:-1] = _profile_t(params, nodes[1:-1])
    slopes[0] = _end_slope(params, lo, bp.left_behavior)
    slopes[-1] = _end_slope(params, hi, bp.right_behavior)

    meta = {"anchor": float(lo), "rho_max": float(hi), "samples": int(samples)}
    if bp.left_behavior is Behavior.FINITE_SLOPE:
        # ρ=0 대칭 확장 시 꺾임각: 단위 접선의 수평 성분 부호가 뒤집힌다
        meta["junction_angle"] = 2.0 * math.asin(min(1.0, abs(params.d)))
    logger.debug("sample_mu %s: [%.6g, %.6g] %d 표본", params, lo, hi, samples)
    return SampledCurve(
        kind=CurveKind.TRANSLATION, params=params,
        rho=nodes, height=heights, slope=slopes,
        left_behavior=bp.left_behavior, right_behavior=bp.right_behavior,
        tag=bp.tag, meta=meta,
    )


def build_complete_graph(n: int, H: float, rho_max: float = GRAPH_RHO_MAX,
                         samples: int = DEFAULT_SAMPLES,
                         tol: float = QUAD_TOL) -> SampledCurve:
    """d = d_H 인 (t_H, rho_max] 위의 그래프. t_H⁺ 에서 높이 → −∞.

    앵커 ρ₀ = t_H + 1 에서 양쪽으로 적분한다. 왼쪽은 t_H 로 로그 간격으로 좁아지는
    패널을 쓰고, 패널 합이 줄지 않는 것(발산)을 메타데이터로 남긴다.
    """
    t_H = subcritical_tH(n, H)
    d_H = graph_constant_dH(n, H)
    params = SurfaceParams(n, H, d_H)
    anchor = t_H + 1.0
    if not rho_max > anchor:
        raise InvalidParams(f"rho_max={rho_max} 는 t_H + 1 = {anchor:.6g} 보다 커야 합니다")
    if samples < 4:
        raise InvalidParams(f"표본은 4개 이상이어야 합니다: {samples}")
    t_fn = _scalar(_profile_t, params)

    n_right = samples // 2
    n_left = samples - n_right
    right_nodes = np.linspace(anchor, rho_max, n_right)
    right_h = cumulative_integral(t_fn, right_nodes, tol=tol)

    deltas = np.logspace(0.0, math.log10(GRAPH_DELTA_MIN), n_left + 1)[1:]
    left_nodes = t_H + deltas                     # 앵커에서 멀어지는 순서
    edges = np.concatenate(([anchor], left_nodes))
    # t_H 쪽 패널은 피적분 함수가 1/(t − t_H) 로 커져 quad 경고가 예상된다
    panels = np.array([integrate_singular(t_fn, float(edges[j + 1]), float(edges[j]),
                                          tol=tol, quiet=True)
                       for j in range(n_left)])
    left_h = -np.cumsum(panels)

    ratio = float(panels[-1] / panels[-2]) if n_left >= 2 and panels[-2] > 0 else math.nan
    divergent = bool(ratio >= 0.5)
    if divergent:
        logger.debug("완비 그래프 t_H⁺ 발산 확인 (패널 비 %.3f)", ratio)
    else:
        logger.warning("완비 그래프 t_H⁺ 에서 패널 합이 줄어듭니다 (비 %.3f)", ratio)

    rho = np.concatenate((left_nodes[::-1], right_nodes))
    height = np.concatenate((left_h[::-1], right_h))
    slope = np.asarray(_profile_t(params, rho), dtype=float)
    return SampledCurve(
        kind=CurveKind.TRANSLATION, params=params,
        rho=rho, height=height, slope=slope,
        left_behavior=Behavior.UNBOUNDED, right_behavior=Behavior.UNBOUNDED,
        tag=TranslationClass.COMPLETE_GRAPH_T2.value,
        meta={"anchor": float(anchor), "t_H": float(t_H), "d_H": float(d_H),
              "rho_max": float(rho_max), "samples": int(samples),
              "divergence_ratio": ratio, "divergent": divergent},
    )


# ─── 곡률 ─────────────────────────────────────────────────────────

def principal_curvatures(curve: SampledCurve, i: int,
                         params: Optional[SurfaceParams] = None) -> CurvatureSample:
    """k_V = μ̈(1+μ̇²)^{-3/2},  k_P = μ̇(1+μ̇²)^{-1/2}·tanh ρ.

    μ̈ 는 T 를 닫힌 식으로 미분한 T'(ρ), μ̇ 는 표본 기울기다.
    표본 기울기가 T 와 맞을 때만 k_V + (n-1)·k_P = nH 가 성립한다.
    회전 곡선은 rotation 모듈의 같은 연산으로 넘긴다.
    """
    if curve.kind is CurveKind.ROTATION:
        from rotation import rotation_principal_curvatures
        return rotation_principal_curvatures(curve, i)
    params = params or curve.params
    slope = float(curve.slope[i])
    rho = float(curve.rho[i])
    if math.isinf(slope) or math.isnan(slope):
        raise VerticalPoint(f"수직 접선 표본입니다: i={i}, rho={rho}")
    phi = float(unit_slope(slope))
    th = math.tanh(rho)
    mu_ddot = float(_profile_dt(params, rho))
    k_V = mu_ddot * (1.0 + slope * slope) ** -1.5
    return CurvatureSample(k_V=k_V, k_P=phi * th, at_rho=rho, second_derivative=mu_ddot)

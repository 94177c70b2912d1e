"""
생성 곡선 독립 검증

곡선을 만든 적분 경로와 무관한 관계식으로 표본을 다시 검사한다.

  flux_residual            제1적분 B(ρ) − nH·I_{n-1}(ρ) ≡ d  (평행이동: cosh, J)
  mean_curvature_residual  인접 표본 사이 ΔB 와 nH·ΔI 의 상대 오차
  q_monotone_in_H          고정 (t, d) 에서 Q 가 H 에 대해 순증가
  asymptote_check          무한 곡선의 점근 형태
  height_residual          패널마다 Δheight 와 기울기 프로파일 적분의 차
  convexity_check          기본 호의 할선 기울기 단조성
  sign_law_check           기울기 부호 = 제1적분 A 의 부호
  in_mean_convex_side      엔타이어 그래프 장벽의 위쪽 판정

B = sinh^{n-1}(ρ)·φ,  φ = slope/√(1+slope²)
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from hypfun import MomentKind, eval_moment, log_eval_moment
from surface_common import (
    AsymptoteKind, AsymptoteSpec, Behavior, BehaviorMismatch, CurveKind, InsufficientRange,
    InsufficientSamples, InvalidParams, KindMismatch, OutOfRange, OutsideDomain,
    SampledCurve, SurfaceParams, json_number, unit_slope,
)

logger = logging.getLogger(__name__)


# ─── 설정 ─────────────────────────────────────────────────────────

FLUX_TOL = 1e-8
MC_TOL = 1e-5
HEIGHT_TOL = 1e-8
ASYMPTOTE_TOL = 1e-2
INTEGRAL_3D_TOL = 3e-2
CONVEXITY_TOL = 1e-8
MIN_RHO_MAX = 30.0
MONOTONE_MARGIN = 1e-15        # 순증가: 차이가 반올림 한 단위보다 커야 함
ND_WINDOWS = ((20.0, 25.0), (25.0, 30.0))


# ─── 보고서 ───────────────────────────────────────────────────────

@dataclass
class VerificationReport:
    """passed ⇔ max_residual ≤ tolerance"""
    check_name: str
    max_residual: float
    tolerance: float
    details: list = field(default_factory=list)
    note: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.max_residual <= self.tolerance)

    def to_dict(self, with_details: bool = False) -> dict:
        out = {
            "check_name": self.check_name,
            "residual": json_number(self.max_residual),
            "tolerance": json_number(self.tolerance),
            "pass": self.passed,
        }
        if self.note:
            out["note"] = self.note
        if self.extra:
            out["extra"] = {k: json_number(v) if isinstance(v, float) else v
                            for k, v in self.extra.items()}
        if with_details:
            out["details"] = [json_number(v) for v in self.details]
        return out


def report_to_text(reports: Iterable[VerificationReport]) -> str:
    """한 줄에 한 검사: check=… residual=… tolerance=… pass=…"""
    lines = []
    for r in reports:
        line = (f"check={r.check_name} residual={r.max_residual:.3e} "
                f"tolerance={r.tolerance:.3e} pass={'true' if r.passed else 'false'}")
        if r.note:
            line += f" note={r.note}"
        lines.append(line)
    return "\n".join(lines) + ("\n" if lines else "")


def report_to_json(reports: Iterable[VerificationReport], with_details: bool = False) -> str:
    return json.dumps([r.to_dict(with_details) for r in reports],
                      ensure_ascii=False, indent=2)


# ─── 제1적분 ──────────────────────────────────────────────────────

def _moment_kind(curve: SampledCurve) -> MomentKind:
    return MomentKind.SINH if curve.kind is CurveKind.ROTATION else MomentKind.COSH


def _power(curve: SampledCurve, rho: np.ndarray) -> np.ndarray:
    base = np.sinh(rho) if curve.kind is CurveKind.ROTATION else np.cosh(rho)
    return base ** (curve.params.n - 1)


def _require_graph(curve: SampledCurve, check: str) -> None:
    if curve.extended:
        raise KindMismatch(f"{check}: 확장된 곡선이 아닌 기본 호가 필요합니다")


def flux_residual(curve: SampledCurve, tolerance: float = FLUX_TOL) -> VerificationReport:
    """|B − nH·I_{n-1} − d| / max(1, sinh^{n-1}) 의 최댓값"""
    _require_graph(curve, "flux")
    p = curve.params
    rho = np.asarray(curve.rho)
    power = _power(curve, rho)
    flux = power * unit_slope(curve.slope) - p.nH * np.asarray(
        eval_moment(_moment_kind(curve), p.n - 1, rho))
    res = np.abs(flux - p.d) / np.maximum(1.0, power)
    worst = float(np.max(res)) if len(res) else 0.0
    logger.debug("flux_residual %s: %.3e", curve.tag, worst)
    return VerificationReport("flux", worst, tolerance, details=res.tolist(),
                              extra={"kind": curve.kind.value, "d": p.d})


def mean_curvature_residual(curve: SampledCurve,
                            tolerance: float = MC_TOL) -> VerificationReport:
    """내부 표본 i 마다 |ΔB − nH·ΔI| / |nH·ΔI|, Δ 는 [ρ_{i-1}, ρ_{i+1}] 위의 증분.

    곡선 라벨의 H 를 쓰므로 with_params 로 H 를 바꾼 곡선은 그만큼 어긋난다.
    """
    _require_graph(curve, "mean_curvature")
    if len(curve) < 7:
        raise InsufficientSamples(f"내부 표본이 5개 이상 필요합니다: {len(curve)}")
    p = curve.params
    rho = np.asarray(curve.rho)
    bracket = _power(curve, rho) * unit_slope(curve.slope)
    moment = p.nH * np.asarray(eval_moment(_moment_kind(curve), p.n - 1, rho))
    d_b = bracket[2:] - bracket[:-2]
    d_i = moment[2:] - moment[:-2]
    res = np.abs(d_b - d_i) / np.abs(d_i)
    worst = float(np.max(res))
    logger.debug("mean_curvature_residual %s: %.3e", curve.tag, worst)
    return VerificationReport("mean_curvature", worst, tolerance, details=res.tolist())


# ─── 높이/기울기 정합 ─────────────────────────────────────────────

_GL16_NODES, _GL16_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _slope_profile(curve: SampledCurve):
    if curve.kind is CurveKind.ROTATION:
        from rotation import Profile, eval_profile
        return lambda t: eval_profile(curve.params, Profile.Q, t)
    from translation import TProfile, eval_tprofile
    return lambda t: eval_tprofile(curve.params, TProfile.T, t)


def height_residual(curve: SampledCurve, tolerance: float = HEIGHT_TOL) -> VerificationReport:
    """패널마다 |Δheight − ∫Q| / max(1, |∫Q|). ∫Q 는 고정 16점 Gauss–Legendre.

    수직 끝점에 닿는 패널은 건너뛴다. 완비 그래프는 앵커 오른쪽 패널만 본다
    (t_H 쪽은 R 이 이중 영점이라 프로파일 값 자체가 반올림 수준).
    """
    _require_graph(curve, "height")
    if len(curve) < 4:
        raise InsufficientSamples(f"높이 검사에는 표본 4개 이상이 필요합니다: {len(curve)}")
    rho = np.asarray(curve.rho)
    first = 1 if curve.left_behavior is Behavior.VERTICAL else 0
    last = len(rho) - 2 if curve.right_behavior is Behavior.VERTICAL else len(rho) - 1
    if "t_H" in curve.meta:
        first = max(first, int(np.searchsorted(rho, curve.meta["anchor"])))
    if first >= last:
        return VerificationReport("height", 0.0, tolerance,
                                  note="not-applicable: 검사할 내부 패널이 없습니다")
    lo, hi = rho[first:last], rho[first + 1:last + 1]
    half, mid = 0.5 * (hi - lo), 0.5 * (hi + lo)
    pts = mid[:, None] + half[:, None] * _GL16_NODES[None, :]
    vals = np.asarray(_slope_profile(curve)(pts.ravel()), dtype=float).reshape(pts.shape)
    ref = half * (vals @ _GL16_WEIGHTS)
    step = np.diff(np.asarray(curve.height))[first:last]
    res = np.abs(step - ref) / np.maximum(1.0, np.abs(ref))
    worst = float(np.max(res))
    logger.debug("height_residual %s: %.3e (%d 패널)", curve.tag, worst, len(res))
    return VerificationReport("height", worst, tolerance, details=res.tolist(),
                              extra={"panels": int(len(res)), "first_panel": first})


# ─── H 단조성 ─────────────────────────────────────────────────────

def q_monotone_in_H(n: int, d: float, t_grid: Sequence[float],
                    H_values: Sequence[float]) -> VerificationReport:
    """인접한 H 쌍마다 Q_{H₂,d}(t) − Q_{H₁,d}(t) > 0 인지 공통 정의역에서 확인"""
    from rotation import Profile, eval_profile

    hs = sorted(float(h) for h in H_values)
    if len(hs) < 2 or len(set(hs)) < len(hs):
        return VerificationReport("q_monotone", math.inf, -MONOTONE_MARGIN,
                                  note="not-applicable: 서로 다른 H 가 2개 이상 필요")
    details = []
    used = 0
    for t in t_grid:
        try:
            qs = [eval_profile(SurfaceParams(n, h, d), Profile.Q, float(t)) for h in hs]
        except OutsideDomain:
            continue
        used += 1
        # 위반량: Q_{H₁} − Q_{H₂} (음수면 순서 유지)
        details.extend(q1 - q2 for q1, q2 in zip(qs, qs[1:]))
    if not used:
        raise OutsideDomain(f"H={hs} 의 공통 정의역이 t_grid 안에 없습니다 (n={n}, d={d})")
    return VerificationReport("q_monotone", float(max(details)), -MONOTONE_MARGIN,
                              details=details, extra={"points": used})


# ─── 점근 ─────────────────────────────────────────────────────────

def _lstsq_slope(x: np.ndarray, y: np.ndarray) -> float:
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def _window(curve: SampledCurve, lo: float, hi: float) -> np.ndarray:
    mask = (curve.rho >= lo) & (curve.rho <= hi)
    if np.count_nonzero(mask) < 3:
        raise InsufficientSamples(f"[{lo}, {hi}] 구간 표본이 3개 미만입니다")
    return mask


def _log_flux_gap(curve: SampledCurve) -> float:
    """ρ_max 에서 |log B − log(nH·I_{n-1} + d)|. sinh^{n-1} 이 overflow 해도 유한"""
    p = curve.params
    r = float(curve.rho[-1])
    phi = float(unit_slope(float(curve.slope[-1])))
    log_moment = float(log_eval_moment(_moment_kind(curve), p.n - 1, r))
    tail = p.d * math.exp(-log_moment) / p.nH
    if not (phi > 0 and tail > -1.0 and r > 0):
        return math.nan
    sign = -1.0 if curve.kind is CurveKind.ROTATION else 1.0
    log_base = r - math.log(2.0) + math.log1p(sign * math.exp(-2.0 * r))
    lhs = (p.n - 1) * log_base + math.log(phi)
    return abs(lhs - (math.log(p.nH) + log_moment + math.log1p(tail)))


def asymptote_check(curve: SampledCurve, spec: AsymptoteSpec,
                    at_rho: Optional[float] = None) -> VerificationReport:
    """무한 곡선의 점근 형태 검사. ExponentialND 는 두 창의 회귀 기울기 안정성만 본다.

    모든 종류에서 ρ_max 의 제1적분을 로그 공간으로 다시 맞춰 extra["log_flux_gap"] 로 남긴다.
    """
    _require_graph(curve, "asymptote")
    rho_max = float(curve.rho[-1])
    if rho_max < MIN_RHO_MAX:
        raise InsufficientRange(f"rho_max={rho_max:.6g} < {MIN_RHO_MAX}")
    rho, height, slope = curve.rho, curve.height, curve.slope
    d = curve.params.d
    name = f"asymptote:{spec.kind.value}"
    gap = _log_flux_gap(curve)

    if spec.kind is AsymptoteKind.LINEAR_SLOPE:
        mask = rho >= 0.5 * (rho[0] + rho_max)
        fit = _lstsq_slope(rho[mask], height[mask])
        raw = float(height[-1] / rho_max)
        return VerificationReport(name, abs(fit - spec.value), ASYMPTOTE_TOL,
                                  extra={"fit_slope": fit, "expected": spec.value,
                                         "log_flux_gap": gap,
                                         "raw_ratio": raw, "at_rho": rho_max})

    if spec.kind is AsymptoteKind.EXPONENTIAL_2D:
        r = rho_max if at_rho is None else float(at_rho)
        h = float(np.interp(r, rho, height))
        scaled = h * math.sqrt(1.0 - d) * math.exp(-0.5 * r)
        return VerificationReport(name, abs(scaled - 1.0), ASYMPTOTE_TOL,
                                  extra={"scaled": scaled, "at_rho": r, "log_flux_gap": gap})

    if spec.kind is AsymptoteKind.INTEGRAL_3D:
        r = 20.0 if at_rho is None else float(at_rho)
        s = float(np.interp(r, rho, slope))
        model = math.exp(r) * spec.prefactor / math.sqrt(r)
        ratio = s / model
        return VerificationReport(name, abs(ratio - 1.0), INTEGRAL_3D_TOL,
                                  extra={"ratio": ratio, "at_rho": r, "log_flux_gap": gap})

    if spec.kind is AsymptoteKind.EXPONENTIAL_ND:
        rates = []
        for lo, hi in ND_WINDOWS:
            mask = _window(curve, lo, hi)
            rates.append(_lstsq_slope(rho[mask], np.log(height[mask])))
        spread = abs(rates[1] - rates[0])
        # a(n) 은 보고만 한다: height ≈ e^{b·ρ}·C
        mask = _window(curve, *ND_WINDOWS[-1])
        prefactor = float(np.exp(np.mean(np.log(height[mask]) - rates[1] * rho[mask])))
        residual = spread if min(rates) > 0 else math.inf
        return VerificationReport(name, residual, ASYMPTOTE_TOL,
                                  note="b(n) 회귀값 보고 (기준값 없음)",
                                  extra={"b_windows": rates, "b": rates[1],
                                         "prefactor": prefactor, "log_flux_gap": gap})

    raise InvalidParams(f"무한 곡선이 아닌 점근 종류: {spec.kind.value}")


# ─── 모양 검사 ────────────────────────────────────────────────────

def convexity_check(curve: SampledCurve,
                    tolerance: float = CONVEXITY_TOL) -> VerificationReport:
    """할선 기울기가 감소하지 않는지. 위반량은 max(1, |할선|) 로 나눈 상대값"""
    _require_graph(curve, "convexity")
    if len(curve) < 3:
        raise InsufficientSamples(f"볼록성 검사에는 표본 3개 이상이 필요합니다: {len(curve)}")
    secant = np.diff(curve.height) / np.diff(curve.rho)
    scale = np.maximum(1.0, np.maximum(np.abs(secant[:-1]), np.abs(secant[1:])))
    res = np.maximum(0.0, secant[:-1] - secant[1:]) / scale
    return VerificationReport("convexity", float(np.max(res)), tolerance, details=res.tolist())


def sign_law_check(curve: SampledCurve) -> VerificationReport:
    """sign(slope) = sign(nH·I_{n-1} + d). |A| 가 반올림 수준인 표본은 제외"""
    _require_graph(curve, "sign_law")
    p = curve.params
    rho = np.asarray(curve.rho)
    flux = p.nH * np.asarray(eval_moment(_moment_kind(curve), p.n - 1, rho)) + p.d
    scale = np.maximum(1.0, _power(curve, rho))
    decided = np.abs(flux) > 1e-12 * scale
    mismatch = decided & (np.sign(curve.slope) != np.sign(flux))
    count = int(np.count_nonzero(mismatch))
    return VerificationReport("sign_law", float(count), 0.0,
                              details=np.flatnonzero(mismatch).tolist(),
                              extra={"checked": int(np.count_nonzero(decided))})


# ─── 결함 주입 ────────────────────────────────────────────────────

def perturb_heights(curve: SampledCurve, amplitude: float = 1e-3,
                    slopes: bool = True) -> SampledCurve:
    """height += a·sin ρ, slopes=True 면 slope += a·cos ρ 도. 수직 표본(±inf)은 그대로"""
    rho = np.asarray(curve.rho)
    meta = dict(curve.meta, perturbation=float(amplitude))
    slope = curve.slope + amplitude * np.cos(rho) if slopes else curve.slope
    return replace(curve, height=curve.height + amplitude * np.sin(rho),
                   slope=slope, meta=meta)


# ─── 평균볼록 쪽 ──────────────────────────────────────────────────

def in_mean_convex_side(point: tuple[float, float], barrier: SampledCurve,
                        offset: float = 0.0) -> bool:
    """height > λ(|ρ|) + offset. 경계 위의 점은 False"""
    if barrier.tag != "EntireGraph_S" or barrier.extended:
        raise BehaviorMismatch(f"장벽은 EntireGraph_S 기본 호여야 합니다: {barrier.tag}")
    rho, height = abs(float(point[0])), float(point[1])
    if rho > barrier.rho[-1]:
        raise OutOfRange(f"rho={rho} 가 장벽 표본 범위 {barrier.rho[-1]:.6g} 밖입니다")
    return height > float(np.interp(rho, barrier.rho, barrier.height)) + offset

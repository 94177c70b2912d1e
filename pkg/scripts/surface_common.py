"""
곡면 모듈 공통 데이터 클래스, 상수, 예외

hypfun / numerics / rotation / translation / verify / geometry 와
CLI(cmc_surfaces.py)가 공유하는 요소를 한 곳에 모은다.

  - SurfaceParams  : (n, H, d) 매개변수 + 영역(regime) 판정
  - SampledCurve   : 이산화된 생성 곡선 (rho, height, slope) + 끝점 거동
  - AsymptoteSpec  : 무한 곡선의 점근 형태 기술자
  - CurvatureSample: 주곡률 한 쌍
  - CmcError 계층   : 모든 모듈의 예외
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

import numpy as np


# ─── 설정 ─────────────────────────────────────────────────────────

ROOT_TOL = 1e-12          # 근 찾기 (가로축)
QUAD_TOL = 1e-10          # 적분 상대 허용오차
DEFAULT_SAMPLES = 400
DEFAULT_RHO_MAX = 30.0    # n ≤ 6 에서 overflow 없이 점근 검사 가능한 범위
FIRST_STEP = 1e-2         # 브래킷 확장 첫 간격
MAX_SPAN = 60.0           # 브래킷 확장 최대 거리
CRITICAL_RTOL = 1e-12     # H 가 임계값 (n-1)/n 과 같다고 보는 상대 오차

JSON_SCHEMA = 1


# ─── 예외 ─────────────────────────────────────────────────────────

class CmcError(Exception):
    """모든 곡면 계산 오류의 기반 클래스"""


class InvalidParams(CmcError, ValueError):
    """입력 매개변수가 전제 조건을 만족하지 않음"""


class NoSignChange(CmcError):
    """탐색 구간 안에서 부호 변화를 찾지 못함"""


class NonFinite(CmcError):
    """피적분 함수가 구간 내부에서 inf/nan 을 반환"""


class OutsideDomain(CmcError):
    """제곱근이 존재하지 않는 점에서 Q/T 를 요청"""


class RegimeMismatch(CmcError):
    """H 영역(임계/아임계/초임계)이 연산의 전제와 다름"""


class BehaviorMismatch(CmcError):
    """곡선 끝점 거동이 분류가 요구하는 형태와 다름"""


class KindMismatch(CmcError):
    """회전/평행이동 곡선 종류가 연산과 맞지 않음"""


class InsufficientSamples(CmcError):
    """검사에 필요한 표본 수 부족"""


class InsufficientRange(CmcError):
    """점근 검사에 필요한 rho 범위 부족"""


class OutOfRange(CmcError):
    """표본 범위 밖의 점을 요청"""


class VerticalPoint(CmcError):
    """기울기가 무한인 표본에서 곡률을 요청"""


class DimensionUnsupported(CmcError):
    """n ≥ 3 곡면은 메쉬로 내보내지 않음"""


class IoFailure(CmcError, OSError):
    """출력 파일 쓰기 실패"""


# ─── 열거형 ───────────────────────────────────────────────────────

class Regime(Enum):
    CRITICAL = "Critical"            # H = (n-1)/n
    SUBCRITICAL = "Subcritical"      # H < (n-1)/n
    SUPERCRITICAL = "Supercritical"  # H > (n-1)/n


class Behavior(Enum):
    HORIZONTAL = "HorizontalTangent"
    VERTICAL = "VerticalTangent"
    UNBOUNDED = "Unbounded"
    FINITE_SLOPE = "FiniteSlope"     # 대칭 확장 시 꺾이는 끝점 (0 < |d| < 1)


class CurveKind(Enum):
    ROTATION = "rotation"
    TRANSLATION = "translation"


class AsymptoteKind(Enum):
    LINEAR_SLOPE = "LinearSlope"
    EXPONENTIAL_2D = "Exponential2D"
    INTEGRAL_3D = "Integral3D"
    EXPONENTIAL_ND = "ExponentialND"
    COMPACT = "Compact"
    NO_CURVE = "NoCurve"


# ─── 매개변수 ─────────────────────────────────────────────────────

def critical_H(n: int) -> float:
    """임계 평균곡률 (n-1)/n (호구면의 평균곡률)"""
    return (n - 1) / n


@dataclass(frozen=True)
class SurfaceParams:
    """회전/평행이동 곡면족의 (n, H, d)"""
    n: int          # 쌍곡공간 차원 (≥ 2)
    H: float        # 정규화 평균곡률, 위쪽 법선 기준 (> 0)
    d: float = 0.0  # 제1적분 상수 (flux)

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 2:
            raise InvalidParams(f"n 은 2 이상의 정수여야 합니다: n={self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if not math.isfinite(self.H) or self.H <= 0:
            raise InvalidParams(f"H > 0 이어야 합니다: H={self.H!r}")
        if not math.isfinite(self.d):
            raise InvalidParams(f"d 는 유한해야 합니다: d={self.d!r}")
        object.__setattr__(self, "H", float(self.H))
        object.__setattr__(self, "d", float(self.d))

    @property
    def critical(self) -> float:
        return critical_H(self.n)

    @property
    def regime(self) -> Regime:
        hc = self.critical
        if math.isclose(self.H, hc, rel_tol=CRITICAL_RTOL, abs_tol=0.0):
            return Regime.CRITICAL
        return Regime.SUBCRITICAL if self.H < hc else Regime.SUPERCRITICAL

    @property
    def nH(self) -> float:
        return self.n * self.H

    @property
    def k(self) -> float:
        """nH/(n-1). 임계에서는 정확히 1"""
        if self.regime is Regime.CRITICAL:
            return 1.0
        return self.nH / (self.n - 1)

    @property
    def excess(self) -> float:
        """k - 1 을 상쇄 없이 계산 (임계에서 0)"""
        if self.regime is Regime.CRITICAL:
            return 0.0
        return (self.nH - (self.n - 1)) / (self.n - 1)

    def with_d(self, d: float) -> "SurfaceParams":
        return replace(self, d=d)

    def with_H(self, H: float) -> "SurfaceParams":
        return replace(self, H=H)

    def to_dict(self) -> dict:
        return {"n": self.n, "H": self.H, "d": self.d}


# ─── 곡선 ─────────────────────────────────────────────────────────

def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SampledCurve:
    """이산화된 생성 곡선.

    extended=False 이면 rho 는 순증가 (그래프). extend_curve 결과는
    extended=True 로 표시되며 rho 가 되돌아가거나 음수(부호 있는 거리)일 수 있다.
    """
    kind: CurveKind
    params: SurfaceParams
    rho: np.ndarray
    height: np.ndarray
    slope: np.ndarray
    left_behavior: Behavior
    right_behavior: Behavior
    tag: str = ""
    extended: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        rho = _frozen_array(self.rho)
        height = _frozen_array(self.height)
        slope = _frozen_array(self.slope)
        if not (len(rho) == len(height) == len(slope)):
            raise InvalidParams(
                f"표본 길이 불일치: rho={len(rho)} height={len(height)} slope={len(slope)}")
        if not self.extended and len(rho) > 1 and not np.all(np.diff(rho) > 0):
            raise InvalidParams("그래프 곡선의 rho 는 순증가해야 합니다")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "height", height)
        object.__setattr__(self, "slope", slope)

    def __len__(self) -> int:
        return len(self.rho)

    @property
    def samples(self) -> list[tuple[float, float, float]]:
        return [(float(r), float(h), float(s))
                for r, h, s in zip(self.rho, self.height, self.slope)]

    def with_params(self, params: SurfaceParams) -> "SampledCurve":
        return replace(self, params=params)

    def to_dict(self, with_samples: bool = False) -> dict:
        out = {
            "kind": self.kind.value,
            "params": self.params.to_dict(),
            "tag": self.tag,
            "left_behavior": self.left_behavior.value,
            "right_behavior": self.right_behavior.value,
            "extended": self.extended,
            "count": len(self),
            "meta": {k: json_number(v) if isinstance(v, float) else v
                     for k, v in self.meta.items()},
        }
        if len(self):
            out["rho_range"] = [json_number(float(self.rho.min())),
                                json_number(float(self.rho.max()))]
        if with_samples:
            out["samples"] = [[json_number(v) for v in s] for s in self.samples]
        return out


# ─── 점근 / 곡률 ──────────────────────────────────────────────────

@dataclass(frozen=True)
class AsymptoteSpec:
    """무한 곡선의 점근 형태. rate=None 이면 회귀 대상"""
    kind: AsymptoteKind
    value: Optional[float] = None       # LinearSlope 기울기
    prefactor: Optional[float] = None
    rate: Optional[float] = None
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "value": json_number(self.value),
            "prefactor": json_number(self.prefactor),
            "rate": json_number(self.rate),
            "note": self.note,
        }


@dataclass(frozen=True)
class CurvatureSample:
    k_V: float      # 자오선 방향 주곡률
    k_P: float      # 등거리(또는 구면) 방향 주곡률
    at_rho: float
    second_derivative: float = 0.0   # 제1적분을 미분해 얻은 height''


# ─── 공통 유틸리티 ────────────────────────────────────────────────

def json_number(x):
    """JSON 직렬화용: inf → "+inf"/"-inf", nan → None"""
    if x is None:
        return None
    x = float(x)
    if math.isnan(x):
        return None
    if math.isinf(x):
        return "+inf" if x > 0 else "-inf"
    return x


def unit_slope(slope) -> np.ndarray:
    """slope/√(1+slope²). 수직 접선(±inf)은 ±1"""
    s = np.asarray(slope, dtype=float)
    with np.errstate(invalid="ignore"):
        return np.where(np.isinf(s), np.sign(s), s / np.hypot(1.0, s))

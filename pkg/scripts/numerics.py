"""
근 브래킷/정밀화 + 끝점 역제곱근 특이점을 견디는 적분

rotation / translation 모듈이 공유한다. 피적분 함수 f 는 재진입 가능해야 한다.

  expand_bracket(f, start, direction, max_span)  -> Bracket
  refine_root(f, bracket, tol)                   -> float
  snap_into_domain(inside, root, direction)      -> float
  end_increment(fprime, end, u, direction)       -> float
  integrate_singular(f, a, b, spec, tol, near)   -> float
  node_grid(lo, hi, count, left_singular, right_singular) -> ndarray
  cumulative_integral(f, nodes, left_singular, right_singular, tol, near) -> ndarray

특이 끝점 근처에서 f(end ± u) 를 그대로 계산하면 끝점에서 0 이 되는 인자가
자리수 상쇄로 음수가 될 수 있다. 호출자는 NearEnd 로 상쇄 없는 형태를 넘긴다.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import brentq

from surface_common import (
    FIRST_STEP, MAX_SPAN, QUAD_TOL, ROOT_TOL,
    InsufficientSamples, InvalidParams, NonFinite, NoSignChange,
)

logger = logging.getLogger(__name__)

ScalarFn = Callable[[float], float]

_QUAD_LIMIT = 200
_EPS = float(np.finfo(float).eps)
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)

SNAP_MAX_SHIFT = 1e-9     # 끝점을 정의역 안으로 옮기는 최대 거리


# ─── 데이터 클래스 ────────────────────────────────────────────────

def _sign(v: float) -> int:
    return (v > 0) - (v < 0)


@dataclass(frozen=True)
class Bracket:
    """부호 변화 구간. 한 끝점이 정확한 영점이면 그 쪽 부호는 0"""
    lo: float
    hi: float
    f_lo_sign: int
    f_hi_sign: int

    def __post_init__(self):
        if not self.lo < self.hi:
            raise InvalidParams(f"브래킷은 lo < hi 여야 합니다: [{self.lo}, {self.hi}]")
        if self.f_lo_sign == self.f_hi_sign:
            raise InvalidParams("브래킷 양 끝 부호가 같습니다")
        if self.f_lo_sign not in (-1, 0, 1) or self.f_hi_sign not in (-1, 0, 1):
            raise InvalidParams("부호는 -1, 0, 1 중 하나여야 합니다")


@dataclass(frozen=True)
class SingularSpec:
    """적분 끝점의 (t−a)^{-1/2} 특이성 표시. 역제곱근 차수만 지원"""
    left_singular: bool = False
    right_singular: bool = False
    order: str = "inverse_sqrt"

    def __post_init__(self):
        if self.order != "inverse_sqrt":
            raise InvalidParams(f"지원하지 않는 특이 차수: {self.order}")


REGULAR = SingularSpec()


@dataclass(frozen=True)
class NearEnd:
    """끝점에서 안쪽으로 u 만큼 들어간 피적분 값. left(u) = f(a + u), right(u) = f(b − u)"""
    left: Optional[ScalarFn] = None
    right: Optional[ScalarFn] = None


# ─── 근 찾기 ──────────────────────────────────────────────────────

def _finite(f: ScalarFn, x: float) -> float:
    v = float(f(x))
    if not math.isfinite(v):
        raise NonFinite(f"함수값이 유한하지 않습니다: f({x!r}) = {v}")
    return v


def expand_bracket(f: ScalarFn, start: float, direction: int = 1,
                   max_span: float = MAX_SPAN,
                   first_step: float = FIRST_STEP) -> Bracket:
    """start 에서 direction 쪽으로 간격을 두 배씩 늘려 부호 변화를 찾는다"""
    if max_span <= 0:
        raise InvalidParams(f"max_span > 0 이어야 합니다: {max_span}")
    direction = 1 if direction >= 0 else -1
    prev_x, prev_v = start, _finite(f, start)
    step = min(first_step, max_span)
    while True:
        x = start + direction * step
        v = _finite(f, x)
        if prev_v == 0.0 or _sign(v) != _sign(prev_v):
            lo, hi = (prev_x, x) if direction > 0 else (x, prev_x)
            f_lo, f_hi = (prev_v, v) if direction > 0 else (v, prev_v)
            s_lo, s_hi = _sign(f_lo), _sign(f_hi)
            if s_lo == s_hi == 0:
                s_hi = 1
            logger.debug("bracket [%.6g, %.6g] (start=%.6g)", lo, hi, start)
            return Bracket(lo, hi, s_lo, s_hi)
        if step >= max_span:
            raise NoSignChange(
                f"{start} 에서 {max_span} 거리 안에 부호 변화가 없습니다")
        prev_x, prev_v = x, v
        step = min(2.0 * step, max_span)


def refine_root(f: ScalarFn, b: Bracket, tol: float = ROOT_TOL) -> float:
    """브래킷 안의 근. Brent 법 (이분법 보장 + 초선형 가속)"""
    if tol < 1e-14:
        raise InvalidParams(f"tol 은 1e-14 이상이어야 합니다: {tol}")
    if b.f_lo_sign == 0:
        return b.lo
    if b.f_hi_sign == 0:
        return b.hi
    f_lo = float(f(b.lo))
    f_hi = float(f(b.hi))
    if f_lo == 0.0:
        return b.lo
    if f_hi == 0.0:
        return b.hi
    return float(brentq(f, b.lo, b.hi, xtol=tol, rtol=4 * _EPS, maxiter=500))


def find_zero(f: ScalarFn, start: float, direction: int = 1,
              max_span: float = MAX_SPAN, tol: float = ROOT_TOL) -> float:
    return refine_root(f, expand_bracket(f, start, direction, max_span), tol)


def snap_into_domain(inside: Callable[[float], bool], root: float, direction: int,
                     max_shift: float = SNAP_MAX_SHIFT) -> float:
    """root 를 direction 쪽으로 한 ulp 부터 두 배씩 옮겨 inside(x) 가 참인 첫 점"""
    if inside(root):
        return root
    direction = 1 if direction >= 0 else -1
    step = math.ulp(root) if root != 0.0 else _EPS
    while step <= max_shift:
        x = root + direction * step
        if inside(x):
            logger.debug("끝점 %.17g → %.17g (이동 %.1e)", root, x, step)
            return x
        step *= 2.0
    logger.warning("끝점 %.17g 을 %.1e 안에서 정의역 안으로 옮기지 못했습니다", root, max_shift)
    return root


def end_increment(fprime: Callable[[np.ndarray], np.ndarray], end: float, u: float,
                  direction: int) -> float:
    """f(end + σu) − f(end) = σ·∫₀ᵘ f'(end + σv) dv  (σ = direction, 8점 Gauss–Legendre)"""
    v = 0.5 * u * (_GL_NODES + 1.0)
    vals = np.asarray(fprime(end + direction * v), dtype=float)
    return direction * 0.5 * u * float(np.dot(_GL_WEIGHTS, vals))


# ─── 적분 ─────────────────────────────────────────────────────────

def _quad(h: ScalarFn, lo: float, hi: float, tol: float, quiet: bool = False) -> float:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", IntegrationWarning)
        val, err = quad(h, lo, hi, epsabs=tol * 1e-3, epsrel=tol, limit=_QUAD_LIMIT)
    level = logging.DEBUG if quiet else logging.WARNING
    for w in caught:
        logger.log(level, "quad [%.6g, %.6g]: %s (err≈%.2e)", lo, hi, w.message, err)
    return float(val)


def integrate_singular(f: ScalarFn, a: float, b: float,
                       spec: SingularSpec = REGULAR, tol: float = QUAD_TOL,
                       near: Optional[NearEnd] = None, quiet: bool = False) -> float:
    """∫ₐᵇ f. 특이 끝점은 t = a + s² (또는 b − s²) 치환으로 해석적으로 만든다.

    near 가 주어지면 특이 끝점 쪽 적분은 near.left / near.right 로 계산한다.
    quiet=True 는 quad 경고를 DEBUG 로 낮춘다 (발산이 예상되는 구간용).
    """
    if a == b:
        return 0.0
    if not a < b:
        raise InvalidParams(f"적분 구간은 a < b 여야 합니다: [{a}, {b}]")

    def g(t: float) -> float:
        return _finite(f, t)

    def from_left(u: float) -> float:
        if near is not None and near.left is not None:
            return _finite(near.left, u)
        return g(a + u)

    def from_right(u: float) -> float:
        if near is not None and near.right is not None:
            return _finite(near.right, u)
        return g(b - u)

    def left_part(hi: float) -> float:
        return _quad(lambda s: 2.0 * s * from_left(s * s), 0.0, math.sqrt(hi - a), tol, quiet)

    def right_part(lo: float) -> float:
        return _quad(lambda s: 2.0 * s * from_right(s * s), 0.0, math.sqrt(b - lo), tol, quiet)

    if spec.left_singular and spec.right_singular:
        mid = 0.5 * (a + b)
        return left_part(mid) + right_part(mid)
    if spec.left_singular:
        return left_part(b)
    if spec.right_singular:
        return right_part(a)
    return _quad(g, a, b, tol, quiet)


# ─── 표본 격자 ────────────────────────────────────────────────────

def node_grid(lo: float, hi: float, count: int,
              left_singular: bool = False, right_singular: bool = False) -> np.ndarray:
    """특이 끝점 근처는 s (t = end ± s²) 에 균등, 나머지는 t 에 균등에 가깝게"""
    if count < 2:
        raise InsufficientSamples(f"표본은 2개 이상이어야 합니다: {count}")
    if not lo < hi:
        raise InvalidParams(f"격자 구간은 lo < hi 여야 합니다: [{lo}, {hi}]")
    u = np.linspace(0.0, 1.0, count)
    if left_singular and right_singular:
        g = 0.5 * (1.0 - np.cos(np.pi * u))
    elif left_singular:
        g = 1.0 - np.cos(0.5 * np.pi * u)
    elif right_singular:
        g = np.sin(0.5 * np.pi * u)
    else:
        g = u
    nodes = lo + (hi - lo) * g
    nodes[0], nodes[-1] = lo, hi
    if not np.all(np.diff(nodes) > 0):
        raise InsufficientSamples(f"격자가 너무 조밀합니다: count={count}, 구간=[{lo}, {hi}]")
    return nodes


def cumulative_integral(f: ScalarFn, nodes: np.ndarray,
                        left_singular: bool = False, right_singular: bool = False,
                        tol: float = QUAD_TOL, near: Optional[NearEnd] = None) -> np.ndarray:
    """nodes[0] 에서 0 으로 시작하는 누적 적분. 패널별 적분 후 합산.

    near 는 곡선 끝점 nodes[0] / nodes[-1] 기준이므로 첫/마지막 패널에만 넘긴다.
    """
    last = len(nodes) - 2
    pieces = np.empty(len(nodes) - 1)
    for i in range(len(nodes) - 1):
        spec = SingularSpec(left_singular=left_singular and i == 0,
                            right_singular=right_singular and i == last)
        panel_near = None
        if near is not None and (i == 0 or i == last):
            panel_near = NearEnd(left=near.left if i == 0 else None,
                                 right=near.right if i == last else None)
        pieces[i] = integrate_singular(f, float(nodes[i]), float(nodes[i + 1]), spec, tol,
                                       panel_near)
    return np.concatenate(([0.0], np.cumsum(pieces)))

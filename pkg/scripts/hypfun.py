"""
쌍곡 모멘트 적분

  I_m(t) = ∫₀ᵗ sinhᵐ(s) ds   (SINH)
  J_m(t) = ∫₀ᵗ coshᵐ(s) ds   (COSH)

점화식 (m ≥ 2):
  m·I_m = sinh^{m-1}·cosh − (m-1)·I_{m-2},   I_0 = t, I_1 = cosh − 1
  m·J_m = sinh·cosh^{m-1} + (m-1)·J_{m-2},   J_0 = t, J_1 = sinh

작은 t 에서 I 점화식은 자리수 상쇄가 커지므로 t < SMALL_T 구간은
고정 차수 Gauss–Legendre 로 계산한다 (피적분 함수가 정함수라 반올림 수준으로 정확).

공개 API:
  eval_moment(kind, m, t)          -> float | ndarray
  moment_leading_term(kind, m, t)  -> float | ndarray   (m ≥ 4, t ≥ 1)
  log_eval_moment(kind, m, t)      -> float | ndarray   (overflow 영역에서도 유한)
"""
from __future__ import annotations

import math
from enum import Enum

import numpy as np

from surface_common import InvalidParams


# ─── 설정 ─────────────────────────────────────────────────────────

SMALL_T = 1.0
LOG_SWITCH_T = 350.0
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(40)
_LN2 = math.log(2.0)


class MomentKind(Enum):
    SINH = "SinhMoment"   # I_m
    COSH = "CoshMoment"   # J_m


def _check(m: int, t: np.ndarray) -> None:
    if isinstance(m, bool) or int(m) != m or m < 0:
        raise InvalidParams(f"m 은 0 이상의 정수여야 합니다: m={m!r}")
    if not np.all(np.isfinite(t)) or np.any(t < 0):
        raise InvalidParams("t 는 0 이상의 유한값이어야 합니다")


def _out(arr: np.ndarray, like):
    return float(arr) if np.ndim(like) == 0 else arr


# ─── 점화식 ───────────────────────────────────────────────────────

def _recurrence(kind: MomentKind, m: int, t: np.ndarray) -> np.ndarray:
    s = np.sinh(t)
    c = np.cosh(t)
    if kind is MomentKind.SINH:
        prev2 = t
        prev1 = 2.0 * np.sinh(0.5 * t) ** 2   # cosh − 1
    else:
        prev2 = t
        prev1 = s
    if m == 0:
        return np.array(prev2, dtype=float)
    for j in range(2, m + 1):
        if kind is MomentKind.SINH:
            cur = (s ** (j - 1) * c - (j - 1) * prev2) / j
        else:
            cur = (s * c ** (j - 1) + (j - 1) * prev2) / j
        prev2, prev1 = prev1, cur
    return np.array(prev1, dtype=float)


def _gauss(kind: MomentKind, m: int, t: np.ndarray) -> np.ndarray:
    u = np.multiply.outer(t, 0.5 * (_GL_NODES + 1.0))
    base = np.sinh(u) if kind is MomentKind.SINH else np.cosh(u)
    return 0.5 * t * ((base ** m) @ _GL_WEIGHTS)


# ─── 공개 API ─────────────────────────────────────────────────────

def eval_moment(kind: MomentKind, m: int, t):
    """I_m(t) 또는 J_m(t). 스칼라 입력이면 float, 배열이면 ndarray"""
    arr = np.asarray(t, dtype=float)
    _check(m, arr)
    m = int(m)
    with np.errstate(over="ignore", invalid="ignore"):
        out = _recurrence(kind, m, arr)
        if m >= 2:
            small = arr < SMALL_T
            if np.any(small):
                gl = _gauss(kind, m, np.where(small, arr, 0.0))
                out = np.where(small, gl, out)
    return _out(out, t)


def moment_leading_term(kind: MomentKind, m: int, t):
    """두 항 점근 전개. 비율 검사용

    m·I_m ≈ sinh^{m-3}·cosh·(sinh² − (m-1)/(m-2))
    m·J_m ≈ sinh·cosh^{m-1} + (m-1)/(m-2)·sinh·cosh^{m-3}
    """
    arr = np.asarray(t, dtype=float)
    _check(m, arr)
    if m < 4:
        raise InvalidParams(f"점근 전개는 m ≥ 4 에서만 정의합니다: m={m}")
    if np.any(arr < 1.0):
        raise InvalidParams("점근 전개는 t ≥ 1 에서만 사용합니다")
    s = np.sinh(arr)
    c = np.cosh(arr)
    ratio = (m - 1) / (m - 2)
    with np.errstate(over="ignore", invalid="ignore"):
        if kind is MomentKind.SINH:
            val = s ** (m - 3) * c * (s * s - ratio) / m
        else:
            val = (s * c ** (m - 1) + ratio * s * c ** (m - 3)) / m
    return _out(np.array(val, dtype=float), t)


def _log_sinh(t: np.ndarray) -> np.ndarray:
    return t - _LN2 + np.log1p(-np.exp(-2.0 * t))


def _log_cosh(t: np.ndarray) -> np.ndarray:
    return t - _LN2 + np.log1p(np.exp(-2.0 * t))


def log_eval_moment(kind: MomentKind, m: int, t):
    """log I_m(t) / log J_m(t).

    직접 값이 overflow 하거나 t > LOG_SWITCH_T 이면 두 항 전개를 로그 공간에서 계산한다.
    """
    arr = np.asarray(t, dtype=float)
    _check(m, arr)
    m = int(m)
    flat = np.atleast_1d(arr).ravel()
    out = np.full_like(flat, np.nan)
    direct = flat <= LOG_SWITCH_T
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        if np.any(direct):
            out[direct] = np.log(np.asarray(eval_moment(kind, m, flat[direct])))
    redo = np.isnan(out) | np.isposinf(out)
    if np.any(redo):
        out[redo] = _log_expansion(kind, m, flat[redo])
    return _out(out.reshape(arr.shape), t)


def _log_expansion(kind: MomentKind, m: int, tb: np.ndarray) -> np.ndarray:
    if m == 0:
        return np.log(tb)
    if m == 1:
        # cosh − 1 = 2·sinh²(t/2)
        return _LN2 + 2.0 * _log_sinh(0.5 * tb) if kind is MomentKind.SINH else _log_sinh(tb)
    ls, lc = _log_sinh(tb), _log_cosh(tb)
    sign = -1.0 if kind is MomentKind.SINH else 1.0
    if m == 2:
        corr = np.log1p(sign * tb * np.exp(-ls - lc))
    else:
        ratio = (m - 1) / (m - 2)
        corr = np.log1p(sign * ratio * np.exp(-2.0 * (ls if kind is MomentKind.SINH else lc)))
    if kind is MomentKind.SINH:
        return (m - 1) * ls + lc - math.log(m) + corr
    return ls + (m - 1) * lc - math.log(m) + corr

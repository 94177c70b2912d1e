"""
n = 2 곡면 메쉬: 생성 곡선 → 공 모형 좌표 (x₁, x₂, t)

  회전:      X(ρ, θ) = (tanh(ρ/2)·cos θ, tanh(ρ/2)·sin θ, λ(ρ))
  평행이동:  쌍곡면 모형의 점 cosh ρ·(cosh s, sinh s, 0) + sinh ρ·(0, 0, 1) 을
             공 모형으로 사영. 첫 축은 생성 측지선 γ 방향, 둘째 축은 P 방향

n ≥ 3 은 DimensionUnsupported (생성 곡선만 CSV 로 내보낸다).
"""
from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from surface_common import (
    CurveKind, DimensionUnsupported, InvalidParams, KindMismatch, SampledCurve,
)

logger = logging.getLogger(__name__)

MIN_ANGULAR = 8


# ─── 모형 변환 ────────────────────────────────────────────────────

def hyperboloid_to_ball(X) -> np.ndarray:
    """(X₀, X₁, …, X_n) → (X₁, …, X_n)/(1 + X₀)"""
    X = np.asarray(X, dtype=float)
    return X[..., 1:] / (1.0 + X[..., :1])


def ball_to_hyperboloid(x) -> np.ndarray:
    """x → ((1+|x|²), 2x) / (1 − |x|²)"""
    x = np.asarray(x, dtype=float)
    r2 = np.sum(x * x, axis=-1, keepdims=True)
    if np.any(r2 >= 1.0):
        raise InvalidParams("공 모형 점은 |x| < 1 이어야 합니다")
    return np.concatenate((1.0 + r2, 2.0 * x), axis=-1) / (1.0 - r2)


def ball_distance(u, v) -> float:
    """공 모형 쌍곡 거리 2·asinh(|u−v| / √((1−|u|²)(1−|v|²)))"""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    denom = (1.0 - float(u @ u)) * (1.0 - float(v @ v))
    if denom <= 0:
        raise InvalidParams("공 모형 점은 |x| < 1 이어야 합니다")
    return 2.0 * math.asinh(float(np.linalg.norm(u - v)) / math.sqrt(denom))


# ─── 데이터 클래스 ────────────────────────────────────────────────

@dataclass(frozen=True)
class BallPoint:
    x: tuple[float, ...]   # 공 모형 수평 좌표
    t: float               # 수직 좌표

    def __post_init__(self):
        if sum(c * c for c in self.x) >= 1.0:
            raise InvalidParams(f"|x| < 1 이어야 합니다: {self.x}")


@dataclass
class Mesh:
    vertices: np.ndarray               # (V, 3)
    faces: np.ndarray                  # (F, 3), 0-based
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        self.faces = np.asarray(self.faces, dtype=np.int64).reshape(-1, 3)
        if len(self.faces) and (self.faces.min() < 0 or self.faces.max() >= len(self.vertices)):
            raise InvalidParams("면 인덱스가 정점 범위를 벗어납니다")

    @property
    def points(self) -> Iterator[BallPoint]:
        for x1, x2, t in self.vertices:
            yield BallPoint((float(x1), float(x2)), float(t))

    def edge_counts(self) -> Counter:
        counts: Counter = Counter()
        for a, b, c in self.faces.tolist():
            for u, v in ((a, b), (b, c), (c, a)):
                counts[(u, v) if u < v else (v, u)] += 1
        return counts

    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edge_counts()) + len(self.faces)

    def boundary_edges(self) -> list[tuple[int, int]]:
        return sorted(e for e, k in self.edge_counts().items() if k == 1)

    def is_watertight(self) -> bool:
        return not self.boundary_edges()

    def max_horizontal_radius(self) -> float:
        if not len(self.vertices):
            return 0.0
        return float(np.max(np.hypot(self.vertices[:, 0], self.vertices[:, 1])))


def mesh_euler_characteristic(mesh: Mesh) -> int:
    return mesh.euler_characteristic()


def mesh_boundary_edges(mesh: Mesh) -> list[tuple[int, int]]:
    return mesh.boundary_edges()


def _check_curve(curve: SampledCurve, kind: CurveKind) -> None:
    if curve.params.n != 2:
        raise DimensionUnsupported(
            f"n={curve.params.n} 곡면은 메쉬로 만들지 않습니다 (생성 곡선을 내보내세요)")
    if curve.kind is not kind:
        raise KindMismatch(f"{kind.value} 곡선이 필요합니다: {curve.kind.value}")


def _metadata(curve: SampledCurve, **extra) -> dict:
    return {"params": curve.params.to_dict(), "class": curve.tag,
            "kind": curve.kind.value, "extended": curve.extended, **extra}


# ─── 회전 메쉬 ────────────────────────────────────────────────────

def _meridian(curve: SampledCurve) -> tuple[np.ndarray, np.ndarray]:
    """ρ ≥ 0 인 선두 구간 (닫힌 고리 확장의 음수 반쪽은 같은 곡면)"""
    rho, height = curve.rho, curve.height
    neg = np.flatnonzero(rho < 0)
    stop = int(neg[0]) if len(neg) else len(rho)
    return rho[:stop], height[:stop]


def embed_rotation_mesh(curve: SampledCurve, angular_samples: int = 64) -> Mesh:
    """자오선을 회전. ρ = 0 표본은 꼭짓점 하나 (부채꼴로 연결)"""
    _check_curve(curve, CurveKind.ROTATION)
    if angular_samples < MIN_ANGULAR:
        raise InvalidParams(f"angular_samples ≥ {MIN_ANGULAR} 이어야 합니다: {angular_samples}")
    rho, height = _meridian(curve)
    m = angular_samples
    theta = np.linspace(0.0, 2.0 * np.pi, m, endpoint=False)
    cos_t, sin_t = np.cos(theta), np.sin(theta)

    vertices: list[np.ndarray] = []
    rows: list[object] = []      # int (꼭짓점) 또는 길이 m 인덱스 배열
    count = 0
    for r, h in zip(rho, height):
        if r == 0.0:
            vertices.append(np.array([[0.0, 0.0, h]]))
            rows.append(count)
            count += 1
        else:
            rad = math.tanh(0.5 * r)
            vertices.append(np.column_stack((rad * cos_t, rad * sin_t, np.full(m, h))))
            rows.append(np.arange(count, count + m))
            count += m

    faces = []
    nxt = np.roll(np.arange(m), -1)
    for p, q in zip(rows, rows[1:]):
        p_apex, q_apex = np.isscalar(p), np.isscalar(q)
        if p_apex and q_apex:
            continue
        if p_apex:
            faces.append(np.column_stack((np.full(m, p), q[nxt], q)))
        elif q_apex:
            faces.append(np.column_stack((p, p[nxt], np.full(m, q))))
        else:
            faces.append(np.column_stack((p, p[nxt], q[nxt])))
            faces.append(np.column_stack((p, q[nxt], q)))

    mesh = Mesh(np.vstack(vertices) if vertices else np.empty((0, 3)),
                np.vstack(faces) if faces else np.empty((0, 3), dtype=np.int64),
                _metadata(curve, angular_samples=m,
                          apexes=sum(1 for row in rows if np.isscalar(row))))
    logger.debug("embed_rotation_mesh %s: V=%d F=%d", curve.tag,
                 len(mesh.vertices), len(mesh.faces))
    return mesh


# ─── 평행이동 메쉬 ────────────────────────────────────────────────

def translation_ball_coords(rho, s) -> np.ndarray:
    """(ρ, s) 격자의 공 모형 좌표 (..., 2). 첫 축 γ, 둘째 축 P"""
    rho, s = np.broadcast_arrays(np.asarray(rho, dtype=float), np.asarray(s, dtype=float))
    X = np.stack((np.cosh(rho) * np.cosh(s), np.cosh(rho) * np.sinh(s), np.sinh(rho)), axis=-1)
    return hyperboloid_to_ball(X)[..., ::-1]


def embed_translation_mesh(curve: SampledCurve, transverse_samples: int = 33,
                           transverse_span: float = 2.0) -> Mesh:
    """각 표본의 P 등거리 곡선을 [−span, span] 에서 추적해 띠로 연결"""
    _check_curve(curve, CurveKind.TRANSLATION)
    if transverse_samples < 2:
        raise InvalidParams(f"transverse_samples ≥ 2 이어야 합니다: {transverse_samples}")
    if not transverse_span > 0:
        raise InvalidParams(f"transverse_span > 0 이어야 합니다: {transverse_span}")
    s = np.linspace(-transverse_span, transverse_span, transverse_samples)
    if transverse_samples % 2:
        s[transverse_samples // 2] = 0.0
    rows, cols = len(curve), transverse_samples
    ball = translation_ball_coords(curve.rho[:, None], s[None, :])        # (rows, cols, 2)
    heights = np.broadcast_to(curve.height[:, None], (rows, cols))
    vertices = np.concatenate((ball, heights[..., None]), axis=-1).reshape(-1, 3)

    idx = np.arange(rows * cols).reshape(rows, cols)
    a, b = idx[:-1, :-1].ravel(), idx[:-1, 1:].ravel()
    c, e = idx[1:, 1:].ravel(), idx[1:, :-1].ravel()
    faces = np.concatenate((np.column_stack((a, b, c)), np.column_stack((a, c, e))))

    axis_col = transverse_samples // 2 if transverse_samples % 2 else None
    mesh = Mesh(vertices, faces, _metadata(curve, transverse_samples=cols,
                                           transverse_span=float(transverse_span),
                                           axis_column=axis_col))
    logger.debug("embed_translation_mesh %s: V=%d F=%d", curve.tag,
                 len(mesh.vertices), len(mesh.faces))
    return mesh

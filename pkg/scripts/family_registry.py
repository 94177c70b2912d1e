"""
곡면족 판별 + 곡면족별 분류/표본화 디스패치

CLI 와 스윕은 이 모듈만 거쳐 rotation / translation 을 호출한다.
각 곡면족 모듈은 실제로 쓰일 때 import 된다.

곡면족 이름 판별:
  1. ROTATION    — "rotation", "rot", "r", "회전"
  2. TRANSLATION — "translation", "trans", "t", "평행이동"
"""
from __future__ import annotations

import re
from enum import Enum, auto
from typing import Optional

from surface_common import AsymptoteSpec, InvalidParams, SampledCurve, SurfaceParams

# ─── 곡면족 타입 ─────────────────────────────────────────────────

class SurfaceFamily(Enum):
    ROTATION = auto()
    TRANSLATION = auto()

    def label(self) -> str:
        """JSON/파일명에 쓰는 이름"""
        return {
            SurfaceFamily.ROTATION: "rotation",
            SurfaceFamily.TRANSLATION: "translation",
        }[self]


# ─── 판별용 패턴 ─────────────────────────────────────────────────

_ROTATION_PAT = re.compile(r'^(rot(ation(al)?)?|r|회전)$', re.IGNORECASE)
_TRANSLATION_PAT = re.compile(r'^(trans(lation(al)?)?|t|평행\s*이동)$', re.IGNORECASE)


def detect_family(text: str) -> SurfaceFamily:
    """사용자 입력 문자열 → SurfaceFamily"""
    s = (text or "").strip()
    if _ROTATION_PAT.match(s):
        return SurfaceFamily.ROTATION
    if _TRANSLATION_PAT.match(s):
        return SurfaceFamily.TRANSLATION
    raise InvalidParams(f"알 수 없는 곡면족: {text!r} (rotation | translation)")


# ─── 디스패치 ────────────────────────────────────────────────────

def dispatch_classify(family: SurfaceFamily, params: SurfaceParams):
    """(분류 enum, breakpoints)"""
    if family == SurfaceFamily.ROTATION:
        from rotation import classify_rotation
        return classify_rotation(params)
    from translation import classify_translation
    return classify_translation(params)


def dispatch_sample(family: SurfaceFamily, params: SurfaceParams, bp,
                    samples: int, rho_max: Optional[float] = None) -> SampledCurve:
    if family == SurfaceFamily.ROTATION:
        from rotation import sample_lambda
        return sample_lambda(params, bp, samples=samples, rho_max=rho_max)
    from translation import sample_mu
    return sample_mu(params, bp, samples=samples, rho_max=rho_max)


def dispatch_asymptote(family: SurfaceFamily, params: SurfaceParams) -> Optional[AsymptoteSpec]:
    """회전 곡면족만 점근 기술자가 있다"""
    if family == SurfaceFamily.ROTATION:
        from rotation import asymptote_rotation
        return asymptote_rotation(params)
    return None


def dispatch_mesh(family: SurfaceFamily, curve: SampledCurve,
                  angular_samples: int = 64, transverse_samples: int = 33,
                  transverse_span: float = 2.0):
    from geometry import embed_rotation_mesh, embed_translation_mesh
    if family == SurfaceFamily.ROTATION:
        return embed_rotation_mesh(curve, angular_samples)
    return embed_translation_mesh(curve, transverse_samples, transverse_span)

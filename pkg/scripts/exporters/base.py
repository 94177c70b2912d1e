"""공통 헬퍼 + 표준 ExportResult.

모든 내보내기 함수가 사용. 쓰기는 임시 파일 → rename 으로 원자적.
"""
from __future__ import annotations

import os
import re
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Union

from surface_common import IoFailure

PathLike = Union[str, os.PathLike]


# ─────────────────────────────────────────────────────────────────────────────
# ExportResult: 모든 내보내기의 표준 출력
# ─────────────────────────────────────────────────────────────────────────────
@dataclass
class ExportResult:
    path: str
    format: str       # "csv" | "obj" | "svg" | "pdf" | "json"
    bytes: int
    items: int = 0    # 표본 / 면 / 쪽 수

    def to_dict(self) -> dict:
        return {"path": self.path, "format": self.format,
                "bytes": self.bytes, "items": self.items}


# ─────────────────────────────────────────────────────────────────────────────
# 파일명 정규화: 스윕 격자점 이름용
# ─────────────────────────────────────────────────────────────────────────────
_DISALLOWED_RE = re.compile(r"[^A-Za-z0-9._=+-]+")


def sanitize_filename(s: str, max_len: int = 80) -> str:
    """화이트리스트 밖 문자는 '_' 로, 앞뒤 '.'/'_' 제거, 길이 제한."""
    s = _DISALLOWED_RE.sub("_", s)
    s = re.sub(r"_+", "_", s).strip("._")
    if len(s) > max_len:
        s = s[:max_len].rstrip("._")
    return s if s else "untitled"


def format_number(x: float) -> str:
    """파일명용 짧은 수 표기: 0.25 → '0.25', -1.0 → '-1', 2/3 → '0.6666667'"""
    return f"{float(x):.7g}"


# ─────────────────────────────────────────────────────────────────────────────
# 원자적 쓰기
# ─────────────────────────────────────────────────────────────────────────────
def atomic_write_bytes(path: PathLike, data: bytes) -> int:
    """같은 디렉터리의 임시 파일에 쓴 뒤 os.replace. 실패 시 IoFailure."""
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp",
                                   dir=str(target.parent))
        try:
            with os.fdopen(fd, "wb") as f:
                f.write(data)
            os.replace(tmp, target)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as e:
        raise IoFailure(f"파일 쓰기 실패: {target} ({e})") from e
    return len(data)


def atomic_write_text(path: PathLike, text: str) -> int:
    # LF 고정 (플랫폼 무관 동일 바이트)
    return atomic_write_bytes(path, text.encode("utf-8"))

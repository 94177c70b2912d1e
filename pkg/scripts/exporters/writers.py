"""
메쉬 / 곡선 / 그림 / 아틀라스 쓰기

  export_mesh(mesh, path)          Wavefront OBJ ("v x y z", "f i j k" 1-indexed)
  export_curve(curve, path)        CSV "rho,height,slope", 유효숫자 17자리
  export_plot(curves, path)        SVG (또는 .pdf) — ρ-높이 축, 곡선마다 선 하나
  export_atlas(svg_paths, pdf)     SVG 여러 장을 PyMuPDF 로 한 PDF 에 합침

같은 입력이면 같은 바이트를 쓴다 (SVG 해시 salt 고정, 날짜 메타데이터 제거).
"""
from __future__ import annotations

import io
import logging
import math
from pathlib import Path
from typing import Optional, Sequence

import fitz  # PyMuPDF (아틀라스 PDF 합치기)
import matplotlib

matplotlib.use("Agg")
from matplotlib.figure import Figure  # noqa: E402

from surface_common import InvalidParams, IoFailure, SampledCurve  # noqa: E402

from .base import ExportResult, PathLike, atomic_write_bytes, atomic_write_text  # noqa: E402

logger = logging.getLogger(__name__)

matplotlib.rcParams["svg.hashsalt"] = "cmc-surfaces"
_PLOT_FORMATS = {".svg": "svg", ".pdf": "pdf"}


def _g17(x: float) -> str:
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


# ─── OBJ ──────────────────────────────────────────────────────────

def export_mesh(mesh, path: PathLike) -> ExportResult:
    meta = mesh.metadata
    lines = [f"# class {meta.get('class', '')}",
             f"# params {meta.get('params', {})}",
             f"o {meta.get('class') or 'surface'}"]
    lines.extend(f"v {_g17(x)} {_g17(y)} {_g17(z)}" for x, y, z in mesh.vertices.tolist())
    lines.extend(f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.faces.tolist())
    size = atomic_write_text(path, "\n".join(lines) + "\n")
    logger.debug("export_mesh %s: V=%d F=%d", path, len(mesh.vertices), len(mesh.faces))
    return ExportResult(str(path), "obj", size, len(mesh.faces))


# ─── CSV ──────────────────────────────────────────────────────────

def export_curve(curve: Optional[SampledCurve], path: PathLike) -> ExportResult:
    """곡선이 없거나 비어 있으면 헤더만"""
    lines = ["rho,height,slope"]
    if curve is not None:
        lines.extend(f"{_g17(r)},{_g17(h)},{_g17(s)}" for r, h, s in curve.samples)
    size = atomic_write_text(path, "\n".join(lines) + "\n")
    return ExportResult(str(path), "csv", size, len(lines) - 1)


# ─── 그림 ─────────────────────────────────────────────────────────

def _label(curve: SampledCurve) -> str:
    p = curve.params
    return f"{curve.tag} (n={p.n}, H={p.H:.6g}, d={p.d:.6g})"


def export_plot(curves: Sequence[SampledCurve], path: PathLike,
                title: Optional[str] = None) -> ExportResult:
    fmt = _PLOT_FORMATS.get(Path(path).suffix.lower())
    if fmt is None:
        raise InvalidParams(f"그림은 .svg 또는 .pdf 만 지원합니다: {path}")
    if title is None:
        title = " / ".join(dict.fromkeys(c.tag for c in curves)) or "empty"
    fig = Figure(figsize=(6.4, 4.8))
    ax = fig.add_subplot()
    for c in curves:
        ax.plot(c.rho, c.height, linewidth=1.2, label=_label(c))
    ax.set_xlabel("rho")
    ax.set_ylabel("height")
    ax.set_title(title)
    ax.grid(True, linewidth=0.3)
    if curves:
        ax.legend(fontsize="small")
    buf = io.BytesIO()
    meta = {"Date": None} if fmt == "svg" else {"CreationDate": None}
    fig.savefig(buf, format=fmt, metadata=meta)
    size = atomic_write_bytes(path, buf.getvalue())
    return ExportResult(str(path), fmt, size, len(curves))


# ─── 아틀라스 ─────────────────────────────────────────────────────

def export_atlas(svg_paths: Sequence[PathLike], pdf_path: PathLike,
                 title: str = "CMC atlas") -> ExportResult:
    """SVG 한 장 = PDF 한 쪽"""
    if not svg_paths:
        raise InvalidParams("아틀라스에 넣을 SVG 가 없습니다")
    atlas = fitz.open()
    try:
        for p in svg_paths:
            try:
                with fitz.open(str(p)) as svg:
                    pdf_bytes = svg.convert_to_pdf()
            except (RuntimeError, ValueError) as e:   # fitz.FileDataError 포함
                raise IoFailure(f"SVG 변환 실패: {p} ({e})") from e
            with fitz.open("pdf", pdf_bytes) as page:
                atlas.insert_pdf(page)
        atlas.set_metadata({"title": title, "creator": "cmc_surfaces",
                            "producer": "", "creationDate": "", "modDate": ""})
        data = atlas.tobytes(garbage=3, deflate=True)
        pages = atlas.page_count
    finally:
        atlas.close()
    size = atomic_write_bytes(pdf_path, data)
    logger.debug("export_atlas %s: %d 쪽", pdf_path, pages)
    return ExportResult(str(pdf_path), "pdf", size, pages)

"""곡선/메쉬/그림 내보내기 모음.

구조:
- base.py: 공통 ExportResult, 헬퍼 (sanitize_filename, atomic_write_text/bytes)
- writers.py: OBJ 메쉬, CSV 곡선, SVG/PDF 그림, PyMuPDF 아틀라스
"""
from .base import ExportResult, atomic_write_bytes, atomic_write_text, sanitize_filename
from .writers import export_atlas, export_curve, export_mesh, export_plot

__all__ = [
    "ExportResult", "atomic_write_bytes", "atomic_write_text", "sanitize_filename",
    "export_atlas", "export_curve", "export_mesh", "export_plot",
]

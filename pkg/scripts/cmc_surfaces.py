#!/usr/bin/env python3
"""
H^n × R 회전/평행이동 CMC 초곡면 — 분류, 표본화, 검증, 메쉬, 스윕

실행:
  python3 scripts/cmc_surfaces.py classify rotation --n 2 --H 1 --d 0
  python3 scripts/cmc_surfaces.py curve translation --n 3 --H 0.3333 --d dH --rho-max 50
  python3 scripts/cmc_surfaces.py mesh rotation --n 2 --H 1 --d 0 --extend
  python3 scripts/cmc_surfaces.py verify rotation --n 3 --H 0.6667 --d 0 --checks flux,mc,convexity
  python3 scripts/cmc_surfaces.py sweep rotation --n 2 --H 0.1:1.5:0.1 --d -1:1:0.25 --jobs 4 --atlas

--H 는 소수 또는 `critical` ((n-1)/n 정확값), --d 는 소수 또는 `dH` (아임계 완비 그래프 상수).
stdout 은 JSON 만, 진행 상황과 로그는 stderr.

종료 코드: 0 정상 (NoSolution 분류 포함) / 1 검증 실패·계산 실패·쓰기 실패 / 2 잘못된 입력

환경 변수 (.env 도 읽음):
  CMC_OUTPUT_DIR  기본 출력 디렉터리 (기본 ./cmc_out)
  CMC_JOBS        sweep 기본 병렬 수 (기본 1)
  CMC_LOG_LEVEL   로그 레벨 (기본 WARNING)
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

sys.path.insert(0, str(Path(__file__).resolve().parent))

from exporters import (  # noqa: E402
    export_atlas, export_curve, export_mesh, export_plot, sanitize_filename,
)
from exporters.base import atomic_write_text, format_number  # noqa: E402
from family_registry import (  # noqa: E402
    SurfaceFamily, detect_family, dispatch_asymptote, dispatch_classify,
    dispatch_mesh, dispatch_sample,
)
from surface_common import (  # noqa: E402
    DEFAULT_RHO_MAX, DEFAULT_SAMPLES, JSON_SCHEMA,
    Behavior, CmcError, DimensionUnsupported, InvalidParams, IoFailure, OutsideDomain,
    RegimeMismatch, SurfaceParams, critical_H,
)

logger = logging.getLogger("cmc_surfaces")

# .env 로드 (출력 디렉터리, 병렬 수)
ENV_PATH = Path(__file__).resolve().parent.parent / ".env"


def _load_dotenv(path: Path = ENV_PATH) -> None:
    if not path.exists():
        return
    for ln in path.read_text(encoding="utf-8").splitlines():
        ln = ln.strip()
        if ln and not ln.startswith("#") and "=" in ln:
            k, v = ln.split("=", 1)
            os.environ.setdefault(k.strip(), v.strip().strip('"').strip("'"))


# ─── 설정 ─────────────────────────────────────────────────────────

DEFAULT_OUTPUT_DIR = "./cmc_out"
ATLAS_RHO_MAX = 10.0
CHECKS = ("flux", "mc", "height", "sign", "convexity", "asymptote", "monotone")
DEFAULT_CHECKS = ("flux", "mc", "sign")
CURVE_FORMATS = ("json", "csv", "svg", "pdf")
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

RawValue = Union[float, str]


def _output_dir_default() -> str:
    return os.environ.get("CMC_OUTPUT_DIR") or DEFAULT_OUTPUT_DIR


def _jobs_default() -> int:
    try:
        return max(1, int(os.environ.get("CMC_JOBS", "1")))
    except ValueError:
        return 1


# ─── 값 해석 ──────────────────────────────────────────────────────

def _parse_scalar(text: str, literals: tuple[str, ...]) -> RawValue:
    s = text.strip()
    if s in literals:
        return s
    try:
        return float(s)
    except ValueError:
        raise InvalidParams(f"수 또는 {'/'.join(literals)} 이어야 합니다: {text!r}") from None


def parse_values(text: str, literals: tuple[str, ...] = ()) -> list[RawValue]:
    """'a:b:step' (양끝 포함), 'x,y,z', 또는 단일 값"""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise InvalidParams(f"범위는 a:b:step 형식입니다: {text!r}")
        a, b, step = (float(p) for p in parts)
        if not all(math.isfinite(v) for v in (a, b, step)) or step <= 0 or b < a:
            raise InvalidParams(f"범위는 유한하고 a ≤ b, step > 0 이어야 합니다: {text!r}")
        count = int(round((b - a) / step)) + 1
        return [round(a + i * step, 12) for i in range(count)]
    return [_parse_scalar(p, literals) for p in text.split(",") if p.strip()]


def resolve_H(n: int, raw: RawValue) -> float:
    return critical_H(n) if raw == "critical" else float(raw)


def resolve_d(family: SurfaceFamily, n: int, H: float, raw: RawValue) -> float:
    if raw != "dH":
        return float(raw)
    if family != SurfaceFamily.TRANSLATION:
        raise InvalidParams("d=dH 는 translation 곡면족에서만 정의됩니다")
    from translation import graph_constant_dH
    try:
        return graph_constant_dH(n, H)
    except RegimeMismatch as e:
        raise InvalidParams(f"d=dH 는 아임계 H 에서만 정의됩니다: {e}") from e


# ─── 실행 설정 ────────────────────────────────────────────────────

@dataclass
class RunConfig:
    command: str
    family: SurfaceFamily
    n: int
    H: Optional[float] = None
    d: Optional[float] = None
    H_grid: list = field(default_factory=list)
    d_grid: list = field(default_factory=list)
    samples: int = DEFAULT_SAMPLES
    rho_max: Optional[float] = None
    angular_samples: int = 64
    transverse_samples: int = 33
    transverse_span: float = 2.0
    outputs: tuple = ()
    out_dir: Path = Path(DEFAULT_OUTPUT_DIR)
    checks: tuple = DEFAULT_CHECKS
    extend: bool = False
    periods: int = 2
    jobs: int = 1
    atlas: bool = False

    def __post_init__(self):
        if self.samples < 8:
            raise InvalidParams(f"--samples 는 8 이상이어야 합니다: {self.samples}")
        if self.rho_max is not None and not self.rho_max > 0:
            raise InvalidParams(f"--rho-max 는 양수여야 합니다: {self.rho_max}")
        if self.angular_samples < 8:
            raise InvalidParams(f"--angular-samples 는 8 이상이어야 합니다: {self.angular_samples}")
        if self.transverse_samples < 2 or not self.transverse_span > 0:
            raise InvalidParams("--transverse-samples ≥ 2, --transverse-span > 0 이어야 합니다")
        if self.periods < 1 or self.jobs < 1:
            raise InvalidParams("--periods, --jobs 는 1 이상이어야 합니다")
        unknown = set(self.checks) - set(CHECKS)
        if unknown:
            raise InvalidParams(f"알 수 없는 검사: {sorted(unknown)} (가능: {', '.join(CHECKS)})")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        family = detect_family(args.family)
        n = args.n
        kw = {}
        if args.command == "sweep":
            kw["H_grid"] = [resolve_H(n, h) for h in parse_values(args.H, ("critical",))]
            kw["d_grid"] = parse_values(args.d, ("dH",))
            if not kw["H_grid"] or not kw["d_grid"]:
                raise InvalidParams("스윕 격자가 비어 있습니다")
        else:
            H = resolve_H(n, _parse_scalar(args.H, ("critical",)))
            SurfaceParams(n, H)        # n, H 검증을 dH 계산보다 먼저
            kw["H"] = H
            kw["d"] = resolve_d(family, n, H, _parse_scalar(args.d, ("dH",)))
        fmt = getattr(args, "format", None)
        return cls(
            command=args.command, family=family, n=n,
            samples=args.samples, rho_max=args.rho_max,
            angular_samples=getattr(args, "angular_samples", 64),
            transverse_samples=getattr(args, "transverse_samples", 33),
            transverse_span=getattr(args, "transverse_span", 2.0),
            outputs=tuple(f.strip() for f in fmt.split(",") if f.strip()) if fmt else (),
            out_dir=Path(args.out or _output_dir_default()),
            checks=tuple(c.strip() for c in getattr(args, "checks", ",".join(DEFAULT_CHECKS)).split(",")
                         if c.strip()),
            extend=getattr(args, "extend", False),
            periods=getattr(args, "periods", 2),
            jobs=getattr(args, "jobs", 1),
            atlas=getattr(args, "atlas", False),
            **kw,
        )

    @property
    def params(self) -> SurfaceParams:
        return SurfaceParams(self.n, self.H, self.d)


def _stem(family: SurfaceFamily, params: SurfaceParams) -> str:
    return sanitize_filename(f"{family.label()}_n{params.n}_H{format_number(params.H)}"
                             f"_d{format_number(params.d)}")


def _emit(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, ensure_ascii=False, indent=2) + "\n")


# ─── classify ─────────────────────────────────────────────────────

def classification_report(family: SurfaceFamily, params: SurfaceParams) -> dict:
    cls, bp = dispatch_classify(family, params)
    asym = dispatch_asymptote(family, params)
    return {
        "schema": JSON_SCHEMA,
        "family": family.label(),
        "n": params.n, "H": params.H, "d": params.d,
        "regime": params.regime.value,
        "class": cls.value,
        "breakpoints": bp.to_dict(),
        "asymptote": asym.to_dict() if asym else None,
    }


def cmd_classify(config: RunConfig) -> int:
    _emit(classification_report(config.family, config.params))
    return EXIT_OK


# ─── curve ────────────────────────────────────────────────────────

def _sample(config: RunConfig, params: SurfaceParams, rho_max: Optional[float] = None):
    cls, bp = dispatch_classify(config.family, params)
    curve = dispatch_sample(config.family, params, bp, config.samples,
                            rho_max if rho_max is not None else config.rho_max)
    return cls, bp, curve


def _extend(curve, periods: int):
    from rotation import extend_curve
    return extend_curve(curve, periods=periods)


def cmd_curve(config: RunConfig) -> int:
    params = config.params
    formats = config.outputs or ("csv",)
    bad = set(formats) - set(CURVE_FORMATS)
    if bad:
        raise InvalidParams(f"curve 출력 형식: {', '.join(CURVE_FORMATS)} (받음: {sorted(bad)})")
    _, _, curve = _sample(config, params)
    if config.extend:
        curve = _extend(curve, config.periods)
    stem = _stem(config.family, params)
    payload = {"schema": JSON_SCHEMA, "command": "curve", "curve": curve.to_dict(), "files": []}
    for fmt in formats:
        path = config.out_dir / f"{stem}.{fmt}"
        if fmt == "csv":
            res = export_curve(curve, path)
        elif fmt == "json":
            size = atomic_write_text(path, json.dumps(
                {"schema": JSON_SCHEMA, **curve.to_dict(with_samples=True)},
                ensure_ascii=False, indent=2) + "\n")
            payload["files"].append({"path": str(path), "format": "json", "bytes": size})
            continue
        else:
            res = export_plot([curve], path)
        payload["files"].append(res.to_dict())
    _emit(payload)
    return EXIT_OK


# ─── mesh ─────────────────────────────────────────────────────────

def cmd_mesh(config: RunConfig) -> int:
    params = config.params
    _, _, curve = _sample(config, params)
    if config.extend:
        curve = _extend(curve, config.periods)
    stem = _stem(config.family, params)
    payload = {"schema": JSON_SCHEMA, "command": "mesh", "class": curve.tag, "files": []}
    try:
        mesh = dispatch_mesh(config.family, curve, config.angular_samples,
                             config.transverse_samples, config.transverse_span)
    except DimensionUnsupported as e:
        logger.warning("%s: 생성 곡선 CSV 로 대신 내보냅니다", e)
        res = export_curve(curve, config.out_dir / f"{stem}.csv")
        payload["note"] = "n ≥ 3: meridian curve only"
        payload["files"].append(res.to_dict())
        _emit(payload)
        return EXIT_OK
    res = export_mesh(mesh, config.out_dir / f"{stem}.obj")
    payload.update(vertices=len(mesh.vertices), faces=len(mesh.faces),
                   euler_characteristic=mesh.euler_characteristic(),
                   watertight=mesh.is_watertight())
    payload["files"].append(res.to_dict())
    _emit(payload)
    return EXIT_OK


# ─── verify ───────────────────────────────────────────────────────

def _not_applicable(name: str, why: str) -> dict:
    return {"check_name": name, "pass": None, "note": f"not-applicable: {why}"}


def run_checks(config: RunConfig) -> tuple[list[dict], bool]:
    import numpy as np
    import verify as vf

    params = config.params
    rho_max = config.rho_max
    if "asymptote" in config.checks:
        rho_max = max(rho_max or DEFAULT_RHO_MAX, vf.MIN_RHO_MAX)
    _, _, curve = _sample(config, params, rho_max)

    rows: list[dict] = []
    ok = True

    def add(report) -> None:
        nonlocal ok
        rows.append(report.to_dict())
        ok = ok and report.passed

    for check in config.checks:
        if check == "flux":
            add(vf.flux_residual(curve))
        elif check == "mc":
            add(vf.mean_curvature_residual(curve))
        elif check == "height":
            add(vf.height_residual(curve))
        elif check == "sign":
            add(vf.sign_law_check(curve))
        elif check == "convexity":
            add(vf.convexity_check(curve))
        elif check == "asymptote":
            spec = dispatch_asymptote(config.family, params)
            if spec is None:
                rows.append(_not_applicable("asymptote", "점근 기술자 없음"))
            elif curve.right_behavior is not Behavior.UNBOUNDED:
                rows.append(_not_applicable("asymptote", "유계 곡선"))
            else:
                add(vf.asymptote_check(curve, spec))
        elif check == "monotone":
            if config.family != SurfaceFamily.ROTATION:
                rows.append(_not_applicable("q_monotone", "회전 곡면족 전용"))
                continue
            t_grid = np.linspace(curve.rho[0], curve.rho[-1], 12)[1:-1]
            try:
                add(vf.q_monotone_in_H(params.n, params.d, t_grid,
                                       (0.9 * params.H, params.H, 1.1 * params.H)))
            except OutsideDomain as e:
                rows.append(_not_applicable("q_monotone", str(e)))
    return rows, ok


def cmd_verify(config: RunConfig) -> int:
    try:
        rows, ok = run_checks(config)
    except OutsideDomain as e:
        _emit({"schema": JSON_SCHEMA, "command": "verify", "pass": False, "error": str(e)})
        return EXIT_FAIL
    _emit({"schema": JSON_SCHEMA, "command": "verify",
           "params": config.params.to_dict(), "family": config.family.label(),
           "checks": rows, "pass": ok})
    return EXIT_OK if ok else EXIT_FAIL


# ─── sweep ────────────────────────────────────────────────────────

def _sweep_point(task: dict) -> dict:
    """격자점 하나: 분류 JSON (+ 아틀라스용 SVG). 예외는 항목에 기록"""
    family = SurfaceFamily[task["family"]]
    entry = {"n": task["n"], "H": task["H"], "d": task["d_raw"]}
    try:
        d = resolve_d(family, task["n"], task["H"], task["d_raw"])
        params = SurfaceParams(task["n"], task["H"], d)
        entry["d"] = params.d
        stem = _stem(family, params)
        report = classification_report(family, params)
        out_dir = Path(task["out_dir"])
        atomic_write_text(out_dir / f"{stem}.json",
                          json.dumps(report, ensure_ascii=False, indent=2) + "\n")
        entry.update({"class": report["class"], "regime": report["regime"],
                      "file": f"{stem}.json"})
        if task["atlas"] and report["class"] not in ("NoSolution", "Unclassified"):
            _, bp = dispatch_classify(family, params)
            curve = dispatch_sample(family, params, bp, task["samples"], task["plot_rho_max"])
            export_plot([curve], out_dir / f"{stem}.svg")
            entry["plot"] = f"{stem}.svg"
    except CmcError as e:
        entry["error"] = f"{type(e).__name__}: {e}"
    return entry


def _run_pool(tasks: list[dict], jobs: int) -> list[dict]:
    if jobs <= 1 or len(tasks) <= 1:
        return [_progress(i, len(tasks), _sweep_point(t)) for i, t in enumerate(tasks)]
    import multiprocessing as mp
    from concurrent.futures import ProcessPoolExecutor
    ctx = mp.get_context("fork") if "fork" in mp.get_all_start_methods() else None
    try:
        with ProcessPoolExecutor(max_workers=jobs, mp_context=ctx) as pool:
            results = []
            for i, entry in enumerate(pool.map(_sweep_point, tasks)):
                results.append(_progress(i, len(tasks), entry))
            return results
    except (OSError, RuntimeError) as e:
        # 병렬 실패 시 순차 폴백
        print(f"[sweep] 병렬 실패 → 순차 폴백: {e}", file=sys.stderr)
        return [_progress(i, len(tasks), _sweep_point(t)) for i, t in enumerate(tasks)]


def _progress(i: int, total: int, entry: dict) -> dict:
    tag = entry.get("class") or entry.get("error", "?")
    print(f"[sweep] {i + 1}/{total} H={entry['H']} d={entry['d']} → {tag}", file=sys.stderr)
    return entry


def cmd_sweep(config: RunConfig) -> int:
    config.out_dir.mkdir(parents=True, exist_ok=True)
    tasks = [{"family": config.family.name, "n": config.n, "H": H, "d_raw": d,
              "out_dir": str(config.out_dir), "atlas": config.atlas,
              "samples": config.samples,
              "plot_rho_max": config.rho_max or ATLAS_RHO_MAX}
             for H in config.H_grid for d in config.d_grid]
    entries = _run_pool(tasks, config.jobs)
    index = {"schema": JSON_SCHEMA, "family": config.family.label(), "n": config.n,
             "count": len(entries),
             "errors": sum(1 for e in entries if "error" in e),
             "points": entries}
    if config.atlas:
        plots = [config.out_dir / e["plot"] for e in entries if "plot" in e]
        if plots:
            res = export_atlas(plots, config.out_dir / "atlas.pdf",
                               title=f"{config.family.label()} n={config.n}")
            index["atlas"] = Path(res.path).name
    atomic_write_text(config.out_dir / "index.json",
                      json.dumps(index, ensure_ascii=False, indent=2) + "\n")
    _emit({"schema": JSON_SCHEMA, "command": "sweep", "index": str(config.out_dir / "index.json"),
           "count": index["count"], "errors": index["errors"]})
    return EXIT_OK


# ─── 인자 ─────────────────────────────────────────────────────────

COMMANDS = {
    "classify": cmd_classify,
    "curve": cmd_curve,
    "mesh": cmd_mesh,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cmc_surfaces",
                                 description="H^n×R 회전/평행이동 CMC 초곡면 도구")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, ranged: bool = False) -> None:
        p.add_argument("family", help="rotation | translation")
        p.add_argument("--n", type=int, required=True, help="쌍곡공간 차원 (≥ 2)")
        p.add_argument("--H", required=True,
                       help="평균곡률 (소수 또는 critical)" + (", 범위 a:b:step" if ranged else ""))
        p.add_argument("--d", default="0",
                       help="flux 상수 (소수 또는 dH)" + (", 범위 a:b:step" if ranged else ""))
        p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
        p.add_argument("--rho-max", type=float, default=None,
                       help=f"무한 곡선 표본 상한 (기본 {DEFAULT_RHO_MAX:g})")
        p.add_argument("--out", default=None, help="출력 디렉터리 (기본 $CMC_OUTPUT_DIR)")
        p.add_argument("--verbose", "-v", action="store_true", help="DEBUG 로그")

    common(sub.add_parser("classify", help="분류 + 끝점 JSON"))

    p = sub.add_parser("curve", help="생성 곡선 표본 파일")
    common(p)
    p.add_argument("--format", default="csv", help="json,csv,svg,pdf 중 쉼표 구분")
    p.add_argument("--extend", action="store_true", help="대칭/주기 확장")
    p.add_argument("--periods", type=int, default=2)

    p = sub.add_parser("mesh", help="n=2 곡면 OBJ 메쉬")
    common(p)
    p.add_argument("--extend", action="store_true", help="대칭/주기 확장 후 메쉬")
    p.add_argument("--periods", type=int, default=2)
    p.add_argument("--angular-samples", type=int, default=64)
    p.add_argument("--transverse-samples", type=int, default=33)
    p.add_argument("--transverse-span", type=float, default=2.0)

    p = sub.add_parser("verify", help="독립 검증")
    common(p)
    p.add_argument("--checks", default=",".join(DEFAULT_CHECKS),
                   help=f"쉼표 구분: {', '.join(CHECKS)}")

    p = sub.add_parser("sweep", help="(H, d) 격자 분류")
    common(p, ranged=True)
    p.add_argument("--jobs", type=int, default=_jobs_default())
    p.add_argument("--atlas", action="store_true", help="격자점별 SVG + atlas.pdf")
    return ap


def _setup_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else os.environ.get("CMC_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(level=level, format="[%(name)s] %(message)s", stream=sys.stderr)


_VALUE_FLAGS = ("--H", "--d")


def _attach_values(argv: list[str]) -> list[str]:
    """'--d -1:1:0.25' → '--d=-1:1:0.25' (argparse 는 '-' 로 시작하는 범위를 옵션으로 본다)"""
    out: list[str] = []
    i = 0
    while i < len(argv):
        if argv[i] in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
            continue
        out.append(argv[i])
        i += 1
    return out


def main(argv: Optional[list[str]] = None) -> int:
    _load_dotenv()
    ap = build_parser()
    args = ap.parse_args(_attach_values(sys.argv[1:] if argv is None else list(argv)))
    _setup_logging(args.verbose)
    try:
        config = RunConfig.from_args(args)
        return COMMANDS[config.command](config)
    except InvalidParams as e:
        print(f"[cmc_surfaces] 입력 오류: {e}", file=sys.stderr)
        return EXIT_USAGE
    except IoFailure as e:
        print(f"[cmc_surfaces] 쓰기 실패: {e}", file=sys.stderr)
        return EXIT_FAIL
    except CmcError as e:
        print(f"[cmc_surfaces] 계산 실패: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

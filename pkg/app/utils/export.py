"""
Writers for Stokes graphs (SVG, CSV, JSON) and verification reports.

SVG output is deterministic: fixed hash salt, no date metadata, text kept as text.
"""

import csv
import json
import logging
import os
from pathlib import Path
from typing import Iterable, List, Literal, Union

import matplotlib

matplotlib.use("Agg")
from matplotlib.figure import Figure  # noqa: E402

from app.models.report import CheckResult, VerificationReport  # noqa: E402
from app.models.stokes import StokesGraph  # noqa: E402

logger = logging.getLogger(__name__)

ExportFormat = Literal["svg", "csv", "json"]
CSV_HEADER = ["curve_id", "source", "direction", "sign", "re", "im"]
SVG_RC = {"svg.hashsalt": "exact-wkb", "svg.fonttype": "none"}


def _curve_gid(curve) -> str:
    prefix = "connection" if curve.is_connection else "curve"
    return f"{prefix}-{curve.curve_id}"


def write_svg(graph: StokesGraph, path: Union[str, Path]) -> Path:
    path = Path(path)
    with matplotlib.rc_context(SVG_RC):
        fig = Figure(figsize=(6, 6))
        ax = fig.add_subplot(1, 1, 1)
        for cut in graph.cuts:
            xs, ys = zip(*cut.points)
            ax.plot(xs, ys, linestyle=(0, (2, 2)), color="0.5", linewidth=0.8, gid=f"cut-{cut.source}")
        for curve in graph.visible_curves():
            if curve.duplicate_of is not None or not curve.points:
                continue
            xs, ys = zip(*curve.points)
            color = "tab:red" if curve.is_connection else "black"
            ax.plot(xs, ys, color=color, linewidth=1.2 if curve.is_connection else 0.8, gid=_curve_gid(curve))
            mid = curve.points[len(curve.points) // 2]
            ax.text(mid[0], mid[1], "⊕" if curve.sign == "+" else "⊖", fontsize=7,
                    ha="center", va="center", gid=f"sign-{curve.curve_id}")
        for tp in graph.turning_points:
            marker = "s" if tp.multiplicity == "double" else "o"
            ax.plot([tp.re], [tp.im], marker=marker, color="tab:blue", markersize=5, gid=f"turning-{tp.name}")
            ax.annotate(tp.name, (tp.re, tp.im), textcoords="offset points", xytext=(4, 4), fontsize=8)
        r = graph.box_radius
        ax.set_xlim(-r, r)
        ax.set_ylim(-r, r)
        ax.set_aspect("equal")
        ax.set_xlabel(f"Re {graph.plane}")
        ax.set_ylabel(f"Im {graph.plane}")
        ax.set_title(f"{'P-Stokes' if graph.kind == 'p' else 'Stokes'} curves, c = {complex(*graph.c):.6g}")
        fig.savefig(path, format="svg", metadata={"Date": None})
    logger.info(f"SVG written to {path}")
    return path


def csv_rows(graph: StokesGraph) -> Iterable[list]:
    for curve in graph.curves:
        for re, im in curve.points:
            yield [curve.curve_id, curve.source, curve.direction, curve.sign, repr(re), repr(im)]


def write_csv(graph: StokesGraph, path: Union[str, Path]) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_HEADER)
        writer.writerows(csv_rows(graph))
    logger.info(f"CSV written to {path}")
    return path


def write_json(graph: StokesGraph, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(graph.model_dump_json(indent=2), encoding="utf-8")
    logger.info(f"JSON written to {path}")
    return path


def export(graph: StokesGraph, fmt: ExportFormat, path: Union[str, Path]) -> Path:
    """
    Write graph in the requested format.

    Raises:
        ValueError: for an unknown format
    """
    writers = {"svg": write_svg, "csv": write_csv, "json": write_json}
    if fmt not in writers:
        raise ValueError(f"unknown export format {fmt!r}")
    os.makedirs(Path(path).parent, exist_ok=True)
    return writers[fmt](graph, path)


def write_report_json(report: VerificationReport, path: Union[str, Path]) -> Path:
    path = Path(path)
    os.makedirs(path.parent, exist_ok=True)
    path.write_text(json.dumps(report.to_records(), indent=2), encoding="utf-8")
    return path


def write_report_csv(checks: List[CheckResult], path: Union[str, Path]) -> Path:
    path = Path(path)
    os.makedirs(path.parent, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["check", "params", "expected", "computed", "error", "tol", "pass"])
        for check in checks:
            record = check.to_record()
            writer.writerow([record["check"], json.dumps(record["params"], sort_keys=True), record["expected"],
                             record["computed"], record["error"], record["tol"], record["pass"]])
    return path

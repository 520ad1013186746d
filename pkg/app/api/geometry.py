import cmath
import json
import logging
import math
import os
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from app.api.checks import complex_param, guarded
from app.models.report import CheckResult
from app.models.run_config import RunConfig
from app.models.stokes import StokesGraph, TraceOptions
from app.utils.export import export
from app.utils.geometry import detect_degeneration, trace_p_stokes, trace_sl2_stokes
from app.utils.numerics import default_t

logger = logging.getLogger(__name__)

SWEEP_RANGE = (0.1, math.pi - 0.1)
# angular distance from a critical arg c at which the geometry counts as degenerate
CRITICAL_WINDOW = 1e-6


def trace_both(c: complex, t: Optional[complex], options: TraceOptions) -> Tuple[StokesGraph, StokesGraph]:
    t = default_t(c) if t is None else t
    return trace_p_stokes(c, options), trace_sl2_stokes(t, c, options)


def graph_summary(graph: StokesGraph) -> Dict:
    return {
        "kind": graph.kind,
        "counts": {tp.name: graph.curve_count(tp.name) for tp in graph.turning_points},
        "connections": [f"{curve.source}->{curve.target}" for curve in graph.connections],
        "degenerate": graph.degenerate,
    }


def topology_checks(graph: StokesGraph, expect_connection: bool, params: Dict) -> List[CheckResult]:
    """Three curves per simple turning point, four at the double one, connection iff critical."""
    checks = []
    for tp in graph.turning_points:
        expected = 4 if tp.multiplicity == "double" else 3
        count = graph.curve_count(tp.name)
        checks.append(CheckResult.exact(f"{graph.kind}_curve_count_{tp.name}", count == expected, params,
                                        expected=expected, computed=count))
    checks.append(CheckResult.exact(f"{graph.kind}_connection", graph.degenerate == expect_connection, params,
                                    expected=expect_connection, computed=graph.degenerate,
                                    detail=", ".join(graph_summary(graph)["connections"]) or None))
    return checks


def run_geometry(config: RunConfig) -> Tuple[List[Path], List[CheckResult]]:
    """Stokes graphs of P_II and of Q_0 in the chosen format, plus the degeneration sweep."""
    c = config.effective_c
    params = {"c": complex_param(c)}
    os.makedirs(config.output_dir, exist_ok=True)
    artifacts: List[Path] = []
    summary: Dict = {"c": complex_param(c), "arg_c": cmath.phase(c)}

    def sweep() -> List[CheckResult]:
        roots = detect_degeneration(abs(c), SWEEP_RANGE)
        summary["critical_args"] = roots
        checks = [CheckResult.exact("degeneration_sweep_single_root", len(roots) == 1, {"abs_c": abs(c)},
                                    expected=1, computed=len(roots))]
        if roots:
            checks.append(CheckResult.numeric("degeneration_critical_arg", math.pi / 2, roots[0], 1e-9,
                                              relative=False, params={"abs_c": abs(c)}))
        return checks

    checks = guarded("degeneration_sweep", sweep, {"abs_c": abs(c)})
    critical = any(abs(cmath.phase(c) - root) < CRITICAL_WINDOW for root in summary.get("critical_args", []))

    def trace() -> List[CheckResult]:
        p_graph, sl2_graph = trace_both(c, config.t, config.trace)
        for name, graph in (("p_stokes", p_graph), ("sl2_stokes", sl2_graph)):
            artifacts.append(export(graph, config.format, config.output_dir / f"{name}.{config.format}"))
            summary[name] = graph_summary(graph)
        return topology_checks(p_graph, critical, params) + topology_checks(sl2_graph, critical, params)

    checks += guarded("stokes_topology", trace, params)
    summary["degenerate"] = critical or any(summary.get(name, {}).get("degenerate", False)
                                            for name in ("p_stokes", "sl2_stokes"))
    if summary["degenerate"]:
        logger.warning(f"Stokes geometry is degenerate at c={c}: {summary.get('p_stokes', {}).get('connections')}")
    summary_path = config.output_dir / "geometry.json"
    summary_path.write_text(json.dumps(summary, indent=2), encoding="utf-8")
    artifacts.append(summary_path)
    return artifacts, checks

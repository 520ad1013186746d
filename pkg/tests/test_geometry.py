import cmath
import math

import pytest

from app.api.geometry import SWEEP_RANGE, topology_checks
from app.utils.errors import NumericsError
from app.utils.geometry import detect_degeneration, trace_p_stokes, trace_sl2_stokes
from app.utils.numerics import default_t


def test_sweep_rejects_zero_c():
    with pytest.raises(NumericsError):
        detect_degeneration(0.0, SWEEP_RANGE)


@pytest.mark.slow
def test_single_critical_argument():
    roots = detect_degeneration(1.0, SWEEP_RANGE)
    assert len(roots) == 1
    assert roots[0] == pytest.approx(math.pi / 2, abs=1e-9)


@pytest.mark.slow
@pytest.mark.parametrize("offset", [-0.1, 0.1])
def test_generic_graphs_have_no_connection(offset):
    c = cmath.exp(1j * (math.pi / 2 + offset))
    p_graph = trace_p_stokes(c)
    sl2_graph = trace_sl2_stokes(default_t(c), c)
    for graph in (p_graph, sl2_graph):
        assert all(check.passed for check in topology_checks(graph, False, {}))
    assert [p_graph.curve_count(name) for name in ("tau1", "tau2", "tau3")] == [3, 3, 3]
    assert sl2_graph.curve_count("lambda0") == 4
    assert len(p_graph.curves) == 15


@pytest.mark.slow
def test_critical_graph_has_a_connection():
    c = 1j
    graph = trace_p_stokes(c)
    assert graph.degenerate
    assert all(curve.target is not None for curve in graph.connections)
    assert all(check.passed for check in topology_checks(graph, True, {}))

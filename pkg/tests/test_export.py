import csv
import json

import pytest

from app.models.report import CheckResult, VerificationReport
from app.models.stokes import Cut, StokesCurve, StokesGraph, TurningPoint
from app.utils.export import CSV_HEADER, export, write_report_csv, write_report_json


@pytest.fixture
def graph():
    return StokesGraph(
        kind="p",
        c=(0.0, 1.0),
        plane="t",
        box_radius=3.0,
        turning_points=[
            TurningPoint(name="tau1", re=1.0, im=0.0),
            TurningPoint(name="tau2", re=-0.5, im=0.8),
        ],
        curves=[
            StokesCurve(curve_id="tau1-0", source="tau1", direction=0, sign="+",
                        points=[(1.0, 0.0), (0.2, 0.4), (-0.5, 0.8)], target="tau2"),
            StokesCurve(curve_id="tau1-1", source="tau1", direction=1, sign="-",
                        points=[(1.0, 0.0), (2.0, 0.0), (3.0, 0.0)]),
            StokesCurve(curve_id="tau1-3", source="tau1", direction=3, sign="+",
                        points=[(1.0, 0.0), (1.0, -1.0)], visible=False),
        ],
        cuts=[Cut(source="tau1", points=[(1.0, 0.0), (1.0, 3.0)])],
    )


def test_svg_is_deterministic(graph, tmp_path):
    first = export(graph, "svg", tmp_path / "a.svg").read_bytes()
    second = export(graph, "svg", tmp_path / "b.svg").read_bytes()
    assert first == second
    text = first.decode("utf-8")
    assert 'id="connection-tau1-0"' in text
    assert 'id="curve-tau1-1"' in text
    assert "tau1-3" not in text


def test_csv_lists_every_point(graph, tmp_path):
    path = export(graph, "csv", tmp_path / "graph.csv")
    with path.open(newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f))
    assert rows[0] == CSV_HEADER
    assert len(rows) == 1 + 8
    assert rows[1][:4] == ["tau1-0", "tau1", "0", "+"]


def test_json_round_trip(graph, tmp_path):
    path = export(graph, "json", tmp_path / "nested" / "graph.json")
    loaded = StokesGraph.model_validate_json(path.read_text(encoding="utf-8"))
    assert loaded == graph
    assert loaded.degenerate
    assert loaded.curve_count("tau1") == 2


def test_unknown_format(graph, tmp_path):
    with pytest.raises(ValueError):
        export(graph, "png", tmp_path / "graph.png")


def test_report_files(tmp_path):
    report = VerificationReport()
    report.extend([
        CheckResult.numeric("period", -2j, -2j + 1e-12, 1e-8, params={"c": "0+1i"}),
        CheckResult.exact("riccati", False),
    ])
    assert not report.passed
    assert [check.check for check in report.failures] == ["riccati"]

    records = json.loads(write_report_json(report, tmp_path / "report.json").read_text(encoding="utf-8"))
    assert records[0]["pass"] is True
    assert records[1]["pass"] is False

    with write_report_csv(report.checks, tmp_path / "report.csv").open(newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    assert rows[0]["check"] == "period"
    assert json.loads(rows[0]["params"]) == {"c": "0+1i"}
    assert rows[1]["pass"] == "False"


def test_relative_error_uses_expected_magnitude():
    expected = -1j / 24
    check = CheckResult.numeric("voros_W1", expected, expected * (1 + 1e-5), 1e-6)
    assert not check.passed
    assert check.error == pytest.approx(1e-5)
    assert CheckResult.numeric("voros_W1", expected, expected * (1 + 1e-7), 1e-6).passed


def test_relative_error_against_zero_is_rejected():
    with pytest.raises(ValueError):
        CheckResult.numeric("s_odd_1_big_loop", 0j, 1e-12, 1e-8)
    assert CheckResult.numeric("s_odd_1_big_loop", 0j, 1e-12, 1e-8, relative=False).passed

import json

import pytest

from app.main import main


def test_series_command(tmp_path):
    assert main(["series", "--orders", "1,2,1", "--out", str(tmp_path)]) == 0
    dump = json.loads((tmp_path / "series.json").read_text(encoding="utf-8"))
    assert dump["K"] == 1
    assert dump["N"] == 2


def test_bad_c_exits_with_config_error(tmp_path):
    assert main(["series", "--c", "0", "--out", str(tmp_path)]) == 2
    assert main(["voros", "--orders", "1,2", "--out", str(tmp_path)]) == 2


def test_unknown_command():
    with pytest.raises(SystemExit):
        main(["plot"])


@pytest.mark.slow
def test_voros_command(tmp_path):
    assert main(["voros", "--c", "i", "--n-max", "2", "--out", str(tmp_path)]) == 0
    rows = (tmp_path / "voros.csv").read_text(encoding="utf-8").splitlines()
    assert len(rows) == 3


@pytest.mark.slow
def test_multipliers_command(tmp_path):
    assert main(["multipliers", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "multipliers.json").exists()


@pytest.mark.slow
def test_geometry_command(tmp_path):
    assert main(["geometry", "--c", "exp(0.6i*pi)", "--format", "json", "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "geometry.json").read_text(encoding="utf-8"))
    assert summary["degenerate"] is False


@pytest.mark.slow
def test_verify_all(tmp_path):
    assert main(["verify-all", "--out", str(tmp_path)]) == 0
    records = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
    assert records and all(record["pass"] for record in records)

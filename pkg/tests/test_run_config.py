import cmath
import json
import math

import pytest

from app.models.run_config import RunConfig, format_complex, parse_complex
from app.utils.errors import ConfigError
from config import Settings, settings


@pytest.mark.parametrize("text, expected", [
    ("i", 1j),
    ("0.9i", 0.9j),
    ("1+2i", 1 + 2j),
    ("exp(3i*pi/5)", cmath.exp(3j * math.pi / 5)),
    (2, 2 + 0j),
])
def test_parse_complex(text, expected):
    assert parse_complex(text) == pytest.approx(expected)


@pytest.mark.parametrize("text", ["", "x + y", "1 +", None])
def test_parse_complex_rejects_garbage(text):
    with pytest.raises(ConfigError):
        parse_complex(text)


def test_defaults_come_from_settings():
    config = RunConfig()
    assert config.c == parse_complex(settings.DEFAULT_C)
    assert config.orders.K == settings.SECTORS_K
    assert config.pade_orders == settings.pade_orders()
    assert config.trace.step == settings.TRACE_STEP


def test_c_must_be_nonzero():
    with pytest.raises(ConfigError):
        RunConfig.load(overrides={"c": "0"})


def test_orders_flag():
    config = RunConfig.load(overrides={"orders": "1,2,3"})
    assert (config.orders.K, config.orders.N, config.orders.n_max) == (1, 2, 3)
    with pytest.raises(ConfigError):
        RunConfig.load(overrides={"orders": "1,2"})


def test_file_values_are_overridden_by_flags(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"c": "2i", "orders": {"K": 2, "N": 5}, "format": "csv", "pade_orders": "8,12"}),
                    encoding="utf-8")
    config = RunConfig.load(str(path), {"c": None, "n_max": 3, "format": "json"})
    assert config.c == pytest.approx(2j)
    assert (config.orders.K, config.orders.N, config.orders.n_max) == (2, 5, 3)
    assert config.format == "json"
    assert config.pade_orders == [8, 12]


def test_unreadable_file(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.load(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{", encoding="utf-8")
    with pytest.raises(ConfigError):
        RunConfig.load(str(bad))


def test_invalid_value_is_a_config_error():
    with pytest.raises(ConfigError):
        RunConfig.load(overrides={"format": "png"})


def test_arg_c_keeps_modulus():
    config = RunConfig.load(overrides={"c": "2", "arg_c": math.pi / 2})
    assert config.effective_c == pytest.approx(2j)
    assert config.c == 2


def test_complex_values_serialize_as_text():
    dumped = RunConfig.load(overrides={"c": "1+2i"}).model_dump()
    assert dumped["c"] == format_complex(1 + 2j)
    assert dumped["t"] is None


def test_settings_read_dotenv(tmp_path, monkeypatch):
    for name in ("ORDER_N", "PADE_ORDERS"):
        monkeypatch.delenv(name, raising=False)
    (tmp_path / ".env").write_text("ORDER_N=5\nPADE_ORDERS=4,6\n", encoding="utf-8")
    monkeypatch.chdir(tmp_path)
    loaded = Settings()
    assert loaded.ORDER_N == 5
    assert loaded.pade_orders() == [4, 6]

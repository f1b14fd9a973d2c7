import csv
import io
import math

import pytest

import sipovl


def quick_config(**overrides):
    cfg = sipovl.Config()
    cfg.duration_s = 6
    cfg.warmup_s = 1
    cfg.window_s = 4
    cfg.hold_time_mean_s = 1
    for key, value in overrides.items():
        setattr(cfg, key, value)
    return cfg


def test_underloaded_run_is_clean():
    row = sipovl.run(quick_config(), rate=50)
    assert row["offered_cps"] == 50
    assert abs(row["throughput_cps"] - 50) < 10
    assert row["invite_retx_rps"] == 0
    assert row["timeouts"] == 0


def test_run_matches_sweep_point():
    cfg = quick_config(seed=9)
    single = sipovl.run(cfg, rate=40)
    rows = sipovl.sweep(cfg, [60, 40], threads=2)
    assert [r["offered_cps"] for r in rows] == [60, 40]
    assert rows[1]["throughput_cps"] == single["throughput_cps"]
    assert rows[1]["setup_delay_ms"] == single["setup_delay_ms"]


def test_seed_determinism():
    cfg = quick_config()
    assert sipovl.run(cfg, rate=30)["trace_digest"] == sipovl.run(cfg, rate=30)["trace_digest"]


def test_export_csv_has_header_and_rows():
    text = sipovl.export(quick_config(), [20, 30], "csv")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert [float(r["offered_cps"]) for r in rows] == [20.0, 30.0]
    with pytest.raises(ValueError):
        sipovl.export(quick_config(), [20], "xml")


def test_config_parse_and_errors():
    cfg = sipovl.Config.parse("q_max = 77\ncontrol_enabled = true\n")
    assert cfg.q_max == 77 and cfg.control_enabled
    cfg.set("t1_ms", "250")
    assert cfg.t1_ms == 250
    assert "q_max = 77" in str(cfg)
    with pytest.raises(sipovl.ConfigParseError):
        sipovl.Config.parse("no_such_key = 1\n")
    bad = sipovl.Config()
    bad.downstream_capacity_cps = -1
    assert bad.validate()
    with pytest.raises(sipovl.ConfigValidationError):
        sipovl.run(bad)


def test_window_growth_and_backoff():
    c = sipovl.WindowController(z_th_ms=math.inf, initial_window=1, initial_win_th=8)
    seen = []
    for _ in range(9):
        assert c.on_call_arrival()
        c.on_transaction_complete(1.0)
        seen.append(c.window)
    assert seen[:7] == [2, 3, 4, 5, 6, 7, 8]
    assert seen[7] == pytest.approx(8.125)
    assert seen[8] == pytest.approx(8.125 + 1 / 8.125)

    c = sipovl.WindowController()
    assert c.on_call_arrival()
    assert not c.on_call_arrival()  # window 1, one call in flight
    c.on_transaction_timeout()
    assert c.window == 1 and c.win_th == 1 and c.active == 0


def test_detect_overload():
    assert not sipovl.detect_overload([], 10, 3)
    assert sipovl.detect_overload([50, 50, 50], 10, 3)
    assert not sipovl.detect_overload([5, 5, 5], 10, 3)

import pytest

import mgrid


TINY = """
episodes: 2
network:
  actor_hidden: [16]
  critic_hidden: [16]
"""


def test_auction_hand_trace():
    out = mgrid.run_auction(1.0, 50.0, [(0.3, 60.0), (0.5, 40.0)])
    assert out["mga_revenue"] == pytest.approx(25.6)
    assert out["allocations"] == pytest.approx([0.3, 0.0])
    assert out["unsold"] == pytest.approx(0.7)
    assert out["trace"][0][0] == 0


def test_invalid_bid_is_rejected():
    with pytest.raises(ValueError):
        mgrid.run_auction(1.0, 50.0, [(0.3, 500.0)])


def test_synthetic_series_is_seeded():
    a = mgrid.synth_generate(seed=3, weeks=1)
    b = mgrid.synth_generate(seed=3, weeks=1)
    assert a == b
    assert len(a["demand"]) == 168
    assert a["timestamp"][0] == "2014-01-01T00:00:00"
    assert min(a["price"]) >= 0.0


def test_default_config_is_valid():
    assert mgrid.config_errors(mgrid.default_config()) == []
    errors = mgrid.config_errors("episodes: 0")
    assert errors


def test_unknown_key_raises_config_error():
    with pytest.raises(mgrid.ConfigError):
        mgrid.run("no_such_key: 1")


def test_tiny_run_and_report(tmp_path):
    out = mgrid.run(TINY, output_dir=str(tmp_path / "run"))
    assert len(out["episodes"]) == 2
    assert out["summary"]["eval_episodes"] == 1
    assert (tmp_path / "run" / "summary.csv").exists()
    again = mgrid.run(TINY)
    assert again["summary"] == out["summary"]

    rep = mgrid.report([str(tmp_path / "run")], str(tmp_path / "report"))
    assert rep["errors"] == ["plot trading_trace.svg: no case 2 run among the inputs"]
    assert rep["rows"][0]["algorithm"] == "ddpg"
    assert rep["rows"][0]["vs_ddpg_pct"] is None

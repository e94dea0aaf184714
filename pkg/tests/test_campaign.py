import pytest

from thetaheights.campaign import (CampaignConfig, ConfigMismatchError, Row,
                                   compute_sample, replay, run_campaign)


def test_config_validation():
    with pytest.raises(ValueError):
        CampaignConfig(suite="nope", samples=1, seed=0)
    with pytest.raises(ValueError):
        CampaignConfig(suite="lemmas", samples=0, seed=0)
    with pytest.raises(ValueError):
        CampaignConfig(suite="lemmas", samples=1, seed=0, prec=32)
    with pytest.raises(ValueError):
        CampaignConfig(suite="norm-bounds", samples=1, seed=0, g=3)
    with pytest.raises(ValueError):
        CampaignConfig(suite="norm-bounds", samples=1, seed=0, r=3)


def test_rerun_is_bitwise_identical():
    cfg = CampaignConfig(suite="delta-metric", samples=25, seed=123, prec=96)
    a = run_campaign(cfg)
    b = run_campaign(cfg)
    assert a.to_csv() == b.to_csv()
    assert a.to_json() == b.to_json()


def test_worker_count_does_not_change_report():
    cfg = CampaignConfig(suite="norm-bounds", samples=4, seed=5, prec=96, g=1)
    a = run_campaign(cfg, workers=1)
    b = run_campaign(cfg, workers=2)
    assert a.to_csv() == b.to_csv()
    assert a.rows == b.rows


def test_norm_bounds_row_budget():
    cfg = CampaignConfig(suite="norm-bounds", samples=5, seed=1, prec=96, g=1)
    rep = run_campaign(cfg)
    checks = [r.check for r in rep.rows]
    assert checks.count("prop-i") == 10  # 5 raw-phase + 5 reduced-phase
    assert checks.count("prop-ii") == 5
    assert checks.count("combined-lower") == 5
    assert checks.count("combined-upper") == 5
    assert rep.n_fail == 0


def test_every_row_replays():
    cfg = CampaignConfig(suite="lemmas", samples=10, seed=77, prec=96)
    rep = run_campaign(cfg)
    for row in rep.rows:
        assert replay(cfg, row) == row


def test_replay_detects_corruption():
    cfg = CampaignConfig(suite="delta-metric", samples=3, seed=2, prec=96)
    rep = run_campaign(cfg)
    good = rep.rows[0]
    corrupted = Row(good.sample_id, good.check, good.inputs, good.lhs,
                    good.rhs, "999", good.verdict)
    with pytest.raises(ConfigMismatchError):
        replay(cfg, corrupted)
    alien = Row("tri:0", "no-such-check", "{}", "-", "-", "0", "pass")
    with pytest.raises(ConfigMismatchError):
        replay(cfg, alien)


def test_window_campaign_uses_corpus():
    cfg = CampaignConfig(suite="window", samples=3, seed=0, prec=96)
    rep = run_campaign(cfg)
    assert rep.summary["rows"] == 12  # 4 verdicts per curve
    assert rep.n_fail == 0


def test_summary_counts_match_rows():
    cfg = CampaignConfig(suite="duplication", samples=3, seed=4, prec=96,
                         g=1, steps=3)
    rep = run_campaign(cfg)
    s = rep.summary
    assert s["rows"] == len(rep.rows)
    assert s["pass"] + s["fail"] + s["indeterminate"] == s["rows"]
    assert rep.n_fail == 0


def test_wall_time_not_serialized():
    cfg = CampaignConfig(suite="lemmas", samples=2, seed=0, prec=96)
    rep = run_campaign(cfg)
    assert rep.wall_time > 0
    assert "wall" not in rep.to_json()
    assert "wall" not in rep.to_csv()


def test_compute_sample_is_pure():
    cfg = CampaignConfig(suite="delta-metric", samples=1, seed=11, prec=96)
    assert compute_sample(cfg, "tri:0") == compute_sample(cfg, "tri:0")

"""End-to-end runs over the shipped configs at their full size."""
import json

from lpbernstein.equilibrium import density_model_for
from lpbernstein.harness import bernstein_sweep, lemma_battery, summarize
from lpbernstein.models import ParamSet, experiment_config_schema
from lpbernstein.tset import TSet


def _load(config_path, name):
    with open(config_path(name)) as f:
        return experiment_config_schema.load(json.load(f)).validate()


def test_four_arc_ratios_do_not_grow(config_path):
    cfg = _load(config_path, "fourarc_p05.json")
    rows = bernstein_sweep(cfg)
    assert len(rows) == 50 * 4
    assert not any(row.flagged for row in rows)
    summary = summarize(rows, cfg.name, 0.5)
    assert summary.battery_size == 50
    assert summary.n_values == [8, 16, 32, 64]
    assert summary.trend_passed
    assert summary.bound_passed


def test_four_arc_ratios_at_small_and_large_exponents(config_path):
    cfg = _load(config_path, "fourarc_p03_p07.json")
    rows = bernstein_sweep(cfg)
    assert len(rows) == 2 * 50 * 4
    assert not any(row.flagged for row in rows)
    for p in (0.3, 0.7):
        summary = summarize(rows, cfg.name, p)
        assert summary.battery_size == 50
        assert summary.trend_passed
        assert summary.bound_passed


def test_cos2t_lemma_battery(config_path):
    cfg = _load(config_path, "cos2t_lemmas.json")
    tset = TSet.from_spec(cfg.tset)
    records = lemma_battery(tset, density_model_for(tset), cfg.n_ladder, cfg.seeds,
                            ParamSet.for_p(0.5).validate(theorem=True), cfg.quad)
    assert len(records) == 2 * 20 * 5
    failing = [r for r in records if not r.holds]
    assert failing == []

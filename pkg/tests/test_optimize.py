"""Grid-plus-golden-section searches over T, V, and reachable distance."""

import math
from dataclasses import replace

import pytest

from mdicvqkd.channel import LinkGeometry
from mdicvqkd.keyrate import ProtocolConfig, secret_key_rate
from mdicvqkd.modulation import Scheme
from mdicvqkd.optimize import (
    OptimizationGrid,
    _golden_max,
    best_rate,
    max_distance,
    optimize_t,
    optimize_tv,
)
from mdicvqkd.zpc import ZpcSetting


def config(zpc=None, variance_v=2.6, beta=0.95, eps=0.002, l_ac=20.0, l_bc=0.0):
    return ProtocolConfig(
        scheme=Scheme.EIGHT,
        zpc=zpc or ZpcSetting.on(1.0),
        variance_v=variance_v,
        beta=beta,
        eps_a=eps,
        eps_b=eps,
        geometry=LinkGeometry(l_ac, l_bc),
    )


def test_grid_points():
    grid = OptimizationGrid(t_steps=4, v_steps=3)
    ts = grid.t_points()
    assert len(ts) == 4
    assert ts[0] > grid.t_lo  # lower end exclusive: T = 0 is no channel
    assert ts[-1] == grid.t_hi
    vs = grid.v_points()
    assert vs == [grid.v_lo, (grid.v_lo + grid.v_hi) / 2.0, grid.v_hi]


def test_grid_validation():
    with pytest.raises(ValueError):
        OptimizationGrid(t_lo=0.5, t_hi=0.5)
    with pytest.raises(ValueError):
        OptimizationGrid(v_lo=0.9)
    with pytest.raises(ValueError):
        OptimizationGrid(t_steps=1)
    with pytest.raises(ValueError):
        OptimizationGrid(refine_iters=-1)


def test_golden_section_finds_parabola_peak():
    x, fx = _golden_max(lambda x: -(x - 0.3) ** 2, 0.0, 1.0, 60)
    assert x == pytest.approx(0.3, abs=1e-9)
    assert fx == pytest.approx(0.0, abs=1e-15)


def test_golden_section_tie_keeps_left():
    # on a flat function the bracket must collapse leftward
    x, _ = _golden_max(lambda x: 1.0, 0.0, 1.0, 80)
    assert x < 0.5


def test_optimize_t_frozen_point():
    opt = optimize_t(config())
    assert not opt.no_key
    assert opt.t_star == pytest.approx(0.3750390946409117, rel=1e-9)
    assert opt.skr_star == pytest.approx(0.00849925022677363, rel=1e-9)
    assert opt.result.skr == opt.skr_star


def test_optimize_t_beats_manual_sweep():
    cfg = config()
    opt = optimize_t(cfg)
    for i in range(1, 51):
        t = i / 50.0
        skr = secret_key_rate(replace(cfg, zpc=ZpcSetting.on(t))).skr
        assert skr <= opt.skr_star + 1e-15


def test_optimize_t_requires_catalysis():
    with pytest.raises(ValueError):
        optimize_t(config(zpc=ZpcSetting.off()))


def test_optimize_t_no_key_flag():
    opt = optimize_t(config(l_ac=200.0))
    assert opt.no_key
    assert opt.skr_star < 0.0


def test_best_rate_pins_plain_protocol_at_unit_t():
    cfg = config(zpc=ZpcSetting.off(), variance_v=1.5)
    skr, t = best_rate(cfg)
    assert t == 1.0
    assert skr == secret_key_rate(cfg).skr


def test_best_rate_matches_optimize_t():
    cfg = config()
    skr, t = best_rate(cfg)
    opt = optimize_t(cfg)
    assert (skr, t) == (opt.skr_star, opt.t_star)


def test_optimize_tv_frozen_point():
    cfg = config(zpc=ZpcSetting.off(), variance_v=1.5, l_ac=25.0)
    cfg = replace(cfg, scheme=Scheme.FOUR)
    opt = optimize_tv(cfg)
    assert opt.t_star == 1.0
    assert opt.v_star == pytest.approx(1.4395566593036926, rel=1e-9)
    assert not opt.no_key


def test_optimize_tv_beats_variance_sweep():
    cfg = config(l_ac=30.0)
    opt = optimize_tv(cfg)
    for v in (1.5, 2.0, 2.6, 3.5, 5.0):
        skr, _ = best_rate(replace(cfg, variance_v=v))
        assert skr <= opt.skr_star + 1e-15


def test_max_distance_brackets_the_crossing():
    cfg = config(l_ac=10.0)
    md = max_distance(cfg)
    assert not md.no_key
    assert 40.0 < md.distance_km < 55.0
    geom = cfg.geometry
    above = replace(cfg, geometry=geom.scaled(md.distance_km - 0.2))
    below = replace(cfg, geometry=geom.scaled(md.distance_km + 0.2))
    assert best_rate(above)[0] > 0.0
    assert best_rate(below)[0] < 0.0


def test_max_distance_preserves_arm_ratio():
    cfg = config(variance_v=2.7, l_ac=1.0, l_bc=1.0)
    md = max_distance(cfg)
    assert not md.no_key
    # the symmetric split collapses the reach to around a kilometre
    assert 0.3 < md.distance_km < 1.5
    arm = md.distance_km / 2.0
    edge = replace(cfg, geometry=LinkGeometry(arm + 0.2, arm + 0.2))
    assert best_rate(edge)[0] < 0.0


def test_max_distance_no_key_at_zero():
    cfg = config(zpc=ZpcSetting.off(), variance_v=1.5, eps=0.25, l_ac=0.0)
    md = max_distance(cfg)
    assert md.no_key
    assert md.distance_km == 0.0


def test_max_distance_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        max_distance(config(), tol_km=0.0)


def test_deterministic_repeat():
    cfg = config()
    assert optimize_t(cfg) == optimize_t(cfg)
    assert max_distance(cfg) == max_distance(cfg)

"""Parameter studies: presets, dataset shapes, and their invariants."""

import math
from dataclasses import replace

import pytest

from mdicvqkd.channel import LinkGeometry, equivalent_excess_noise
from mdicvqkd.keyrate import evaluate_protocol
from mdicvqkd.modulation import Scheme
from mdicvqkd.optimize import OptimizationGrid
from mdicvqkd.scenarios import (
    BETA_SCAN_DISTANCES,
    DEFAULT_BETA,
    DEFAULT_EPS,
    OPTIMAL_V,
    Case,
    Variant,
    asymmetry_rate_curves,
    beta_zero_crossing,
    config_for,
    correlation_curves,
    excess_noise_transition,
    geometry_for,
    rate_surface,
    rate_vs_beta,
    rate_vs_distance,
    run_figure,
)

COARSE = OptimizationGrid(t_steps=12, refine_iters=8)


def test_variant_properties():
    assert Variant.FOUR.scheme is Scheme.FOUR
    assert Variant.EIGHT_ZPC.scheme is Scheme.EIGHT
    assert not Variant.EIGHT.zpc_enabled
    assert Variant.FOUR_ZPC.zpc_enabled


def test_geometry_conventions():
    asym = geometry_for(Case.ASYMMETRIC, 30.0)
    assert (asym.l_ac, asym.l_bc) == (30.0, 0.0)
    sym = geometry_for(Case.SYMMETRIC, 30.0)
    assert (sym.l_ac, sym.l_bc) == (15.0, 15.0)
    per_arm = geometry_for(Case.SYMMETRIC, 30.0, sym_per_arm=True)
    assert (per_arm.l_ac, per_arm.l_bc) == (30.0, 30.0)


def test_config_presets():
    cfg = config_for(Variant.EIGHT_ZPC, Case.ASYMMETRIC, 25.0)
    assert cfg.variance_v == OPTIMAL_V[(Case.ASYMMETRIC, Variant.EIGHT_ZPC)]
    assert cfg.beta == DEFAULT_BETA
    assert cfg.eps_a == cfg.eps_b == DEFAULT_EPS
    assert cfg.zpc.enabled
    assert config_for(Variant.FOUR, Case.SYMMETRIC, 1.0, variance_v=3.3).variance_v == 3.3
    assert not config_for(Variant.FOUR, Case.SYMMETRIC, 1.0).zpc.enabled


def test_correlation_curve_dataset():
    ds = correlation_curves(steps=50)
    assert ds.name == "fig2"
    assert ds.columns == ("v_m_tilde", "z4", "z8", "zg")
    assert len(ds.rows) == 50
    assert ds.rows[0] == (0.0, 0.0, 0.0, 0.0)
    axis = [r[0] for r in ds.rows]
    assert axis == sorted(axis)
    for _, z4, z8, zg in ds.rows:
        assert z4 <= z8 <= zg


def test_distance_curve_datasets():
    out = rate_vs_distance(Case.ASYMMETRIC, l_steps=5, l_max=30.0, grid=COARSE)
    names = [ds.name for ds in out]
    assert names[:4] == ["fig4_four", "fig4_eight", "fig4_four_zpc", "fig4_eight_zpc"]
    assert names[4:] == [
        "fig4_eight_zpc_eps0.0015",
        "fig4_eight_zpc_eps0.00225",
        "fig4_eight_zpc_eps0.003",
    ]
    for ds in out:
        assert ds.columns == (
            "distance_km",
            "skr_bits_per_use",
            "p_d",
            "i_ab",
            "chi_be",
            "t_star",
        )
        assert len(ds.rows) == 5
        axis = [r[0] for r in ds.rows]
        assert axis == sorted(axis)
    # plain variants stay at unit transmittance and certain heralding
    for ds in out[:2]:
        for row in ds.rows:
            assert row[2] == 1.0 and row[5] == 1.0


def test_beta_curve_datasets():
    out = rate_vs_beta(Case.SYMMETRIC, beta_steps=6, distances=(0.1, 0.2), grid=COARSE)
    assert [ds.name for ds in out] == [
        "fig8_four",
        "fig8_eight",
        "fig8_four_zpc",
        "fig8_eight_zpc",
    ]
    for ds in out:
        assert len(ds.rows) == 12
        # within each distance block the rate rises with beta
        for l in (0.1, 0.2):
            skrs = [r[2] for r in ds.rows if r[0] == l]
            assert skrs == sorted(skrs)


def test_surface_datasets():
    out = rate_surface(Case.ASYMMETRIC, v_steps=4, l_steps=3, l_max=20.0, grid=COARSE)
    assert len(out) == 4
    for ds in out:
        assert ds.columns == ("variance_v", "distance_km", "skr_bits_per_use", "t_star")
        assert len(ds.rows) == 12
        axis = [(r[0], r[1]) for r in ds.rows]
        assert axis == sorted(axis)


def test_beta_zero_crossing_plain():
    cfg = config_for(Variant.EIGHT, Case.ASYMMETRIC, 25.0)
    b0, t_at = beta_zero_crossing(cfg)
    assert t_at == 1.0
    res = evaluate_protocol(cfg).result
    assert b0 == pytest.approx(res.chi_be / res.i_ab, rel=1e-14)
    # the rate is linear in beta, so it vanishes exactly at the threshold
    crossing = replace(cfg, beta=min(1.0, b0))
    skr = evaluate_protocol(crossing).result.skr
    assert abs(skr) < 1e-15


def test_beta_zero_crossing_catalysis():
    cfg = config_for(Variant.EIGHT_ZPC, Case.ASYMMETRIC, 25.0)
    b0, t_at = beta_zero_crossing(cfg)
    assert 0.0 < t_at <= 1.0
    res = evaluate_protocol(replace(cfg, zpc=cfg.zpc.with_t(t_at))).result
    assert b0 == pytest.approx(res.chi_be / res.i_ab, rel=1e-12)
    # optimizing T can only lower the threshold
    at_unit = evaluate_protocol(cfg).result
    assert b0 <= at_unit.chi_be / at_unit.i_ab + 1e-12


def test_asymmetry_curveset():
    ds = asymmetry_rate_curves(d_list=(0.0, 0.5), l_steps=4, l_max=10.0, grid=COARSE)
    assert ds.name == "fig9a"
    assert ds.columns == ("distance_km", "d", "skr_bits_per_use", "t_star")
    assert len(ds.rows) == 8
    axis = [(r[0], r[1]) for r in ds.rows]
    assert axis == sorted(axis)
    # default distance convention: traversed total l_ac (1 + d)
    top = max(r[0] for r in ds.rows if r[1] == 0.5)
    assert top == pytest.approx(15.0, rel=1e-12)
    diff = asymmetry_rate_curves(
        d_list=(0.5,), l_steps=4, l_max=10.0, grid=COARSE, arm_diff_axis=True
    )
    assert max(r[0] for r in diff.rows) == pytest.approx(5.0, rel=1e-12)
    with pytest.raises(ValueError):
        asymmetry_rate_curves(d_list=(1.2,), l_steps=4, l_max=10.0)


def test_excess_noise_curveset():
    ds = excess_noise_transition(d_list=(0.0, 1.0), l_steps=5, l_max=40.0)
    assert ds.name == "fig9b"
    assert ds.columns == ("distance_km", "d", "eps_th")
    sample = [r for r in ds.rows if r[1] == 1.0 and r[0] == 40.0][0]
    geom = LinkGeometry(20.0, 20.0)
    assert sample[2] == pytest.approx(
        equivalent_excess_noise(geom, DEFAULT_EPS, DEFAULT_EPS), rel=1e-12
    )
    gaps = []
    for l in sorted({r[0] for r in ds.rows}):
        at_l = {r[1]: r[2] for r in ds.rows if r[0] == l}
        gaps.append(at_l[1.0] - at_l[0.0])
    assert gaps == sorted(gaps)


def test_run_figure_dispatch():
    (ds,) = run_figure("fig2", steps=10)
    assert ds.name == "fig2"
    out = run_figure("fig7", l_steps=3, l_max=0.5, extra_eps=(), grid=COARSE)
    assert [d.name for d in out] == [
        "fig7_four",
        "fig7_eight",
        "fig7_four_zpc",
        "fig7_eight_zpc",
    ]
    with pytest.raises(ValueError):
        run_figure("fig1")


def test_beta_scan_presets():
    assert BETA_SCAN_DISTANCES[Case.ASYMMETRIC] == (20.0, 25.0, 30.0, 35.0)
    assert BETA_SCAN_DISTANCES[Case.SYMMETRIC] == (0.1, 0.2, 0.3, 0.4)

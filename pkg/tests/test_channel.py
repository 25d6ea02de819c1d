from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest

from camsched import (
    DEFAULT_MCS_TABLE,
    EnvConfig,
    GenParams,
    SpectrumConfig,
    build_channel_state,
    channel_from_rb_matrix,
    generate_scenario,
    path_loss_db,
    rb_requirement,
    select_mcs,
    sinr_db,
)
from camsched.scenario import CameraSpec

from conftest import WORKED_RB

QUIET = EnvConfig(tx_power_dbm=24.0, shadowing_sigma_db=0.0,
                  interference_dbm_per_subband=-math.inf, noise_figure_db=0.0, seed=0)


def _cam_at(x: float, y: float = 0.0) -> CameraSpec:
    return CameraSpec(
        id=1, position=(x, y), boresight=0.0, angle_of_view=math.radians(150.0),
        distance_of_view=100.0, best_distance=50.0, bitrate=2_000_000.0,
    )


# ---------------------------------------------------------------------------
# path loss and SINR
# ---------------------------------------------------------------------------
def test_path_loss_reference_points():
    assert path_loss_db(1000.0) == pytest.approx(128.1)
    assert path_loss_db(100.0) == pytest.approx(90.5)
    assert path_loss_db(250.0) == pytest.approx(105.46, abs=0.01)


def test_path_loss_clamps_below_ten_metres():
    assert path_loss_db(3.0) == path_loss_db(10.0)
    assert path_loss_db(0.0) == path_loss_db(10.0)


def test_sinr_closed_form_cell_edge():
    # 24 dBm - 105.46 dB path loss + 121.45 dBm noise floor
    got = sinr_db(_cam_at(250.0), 1, QUIET)
    assert got == pytest.approx(39.99, abs=0.05)


def test_sinr_interference_monotone():
    base = replace(QUIET, interference_dbm_per_subband=-110.0)
    doubled = replace(QUIET, interference_dbm_per_subband=-110.0 + 10 * math.log10(2.0))
    assert sinr_db(_cam_at(100.0), 1, doubled) < sinr_db(_cam_at(100.0), 1, base)


def test_sinr_deterministic_per_seed_and_matches_matrix():
    scen = generate_scenario(GenParams(num_cameras=8, num_objects=4, cell_radius=150.0), 5)
    cfg = SpectrumConfig(total_rbs=12, sub_bands=4)
    env = EnvConfig(seed=99)
    a = build_channel_state(scen, cfg, env)
    b = build_channel_state(scen, cfg, env)
    assert np.array_equal(a.sinr_db, b.sinr_db)
    assert np.array_equal(a.rb_req, b.rb_req)
    for cam in scen.cameras[:3]:
        for m in (1, 4):
            assert a.sinr_db[m - 1, cam.id - 1] == sinr_db(cam, m, env)


# ---------------------------------------------------------------------------
# MCS selection and RB demand
# ---------------------------------------------------------------------------
def test_select_mcs_extremes_and_boundary():
    assert select_mcs(40.0).name == "16QAM 3/4"
    assert select_mcs(-5.0) is None
    assert select_mcs(8.0).name == "16QAM 1/2"  # inclusive lower bound
    assert select_mcs(7.999).name == "QPSK 3/4"


def test_rb_requirement_examples():
    cfg = SpectrumConfig(total_rbs=48, sub_bands=4)
    qpsk_half = DEFAULT_MCS_TABLE[1]
    qam_34 = DEFAULT_MCS_TABLE[6]
    assert rb_requirement(168.0, qpsk_half, cfg) == 1
    assert rb_requirement(2000.0, qpsk_half, cfg) == 12
    assert rb_requirement(2000.0, qam_34, cfg) == 4
    with pytest.raises(ValueError):
        rb_requirement(0.0, qpsk_half, cfg)


def test_rb_requirement_ceiling_identity():
    cfg = SpectrumConfig(total_rbs=48, sub_bands=4)
    rng = np.random.default_rng(11)
    for _ in range(500):
        tp = float(rng.integers(1, 5000))
        level = DEFAULT_MCS_TABLE[int(rng.integers(0, 7))]
        r = rb_requirement(tp, level, cfg)
        per_rb = level.bits_per_rb(cfg.res_per_rb_per_tti)
        assert r * per_rb >= tp
        assert (r - 1) * per_rb < tp


def test_rb_requirement_non_increasing_in_sinr():
    cfg = SpectrumConfig(total_rbs=48, sub_bands=4)
    prev = None
    for s in np.linspace(-1.5, 20.0, 100):
        level = select_mcs(float(s))
        assert level is not None
        r = rb_requirement(1000.0, level, cfg)
        if prev is not None:
            assert r <= prev
        prev = r


# ---------------------------------------------------------------------------
# full channel state
# ---------------------------------------------------------------------------
def test_quiet_small_cell_every_entry_present():
    scen = generate_scenario(GenParams(num_cameras=30, num_objects=10), 7)
    cfg = SpectrumConfig()
    state = build_channel_state(scen, cfg, QUIET)
    assert (state.rb_req > 0).all()
    assert (state.mcs_id == 7).all()  # >= 13 dB everywhere in a quiet 250 m cell


def test_built_state_mcs_and_rb_align():
    scen = generate_scenario(GenParams(num_cameras=20, num_objects=8), 3)
    cfg = SpectrumConfig()
    state = build_channel_state(scen, cfg, EnvConfig(shadowing_sigma_db=10.0, seed=1))
    present = state.rb_req > 0
    assert np.array_equal(present, state.mcs_id > 0)
    for k in range(scen.num_cameras):
        for m in range(cfg.sub_bands):
            if present[m, k]:
                level = state.table[state.mcs_id[m, k] - 1]
                assert level.sinr_threshold_db <= state.sinr_db[m, k]


def test_hand_built_matrix_loads_exactly():
    state = channel_from_rb_matrix(WORKED_RB, num_subbands=3)
    assert state.rb_req.shape == (3, 7)
    assert state.requirement(1, 6) == 2
    assert state.requirement(2, 1) == 3
    assert list(state.rb_req[:, 0]) == [5, 3, 5]
    assert state.mcs_level(1, 1) is None
    zeroed = [[2, 0, 1]]
    st = channel_from_rb_matrix(zeroed, num_subbands=3)
    assert st.requirement(2, 1) is None

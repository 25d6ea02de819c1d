from __future__ import annotations

import numpy as np
import pytest

from camsched import (
    BackgroundFlow,
    Decision,
    ScheduleInstance,
    SpectrumConfig,
    abstract_scenario,
    admit_background,
    channel_from_rb_matrix,
    make_dynamic_state,
    release_background,
    remove_camera,
    reroute_camera,
    schedule_mqbs,
    validate_allocation,
)
from camsched.dynamic import DynamicState, UnknownFlow
from camsched.sched import AllocationMap

from conftest import random_instance


def _state(coverage, qualities, rb_rows, num_objects, total_rbs, sub_bands,
           cameras=(), flows=(), th_h=None, th_l=None) -> DynamicState:
    """Hand-built live state: cameras and flows pre-placed in given order."""
    scen = abstract_scenario(coverage, qualities, num_objects)
    chan = channel_from_rb_matrix(rb_rows, sub_bands)
    inst = ScheduleInstance(scen, chan, SpectrumConfig(total_rbs=total_rbs, sub_bands=sub_bands))
    alloc = AllocationMap(inst.spectrum)
    for camera_id, sub_band in cameras:
        alloc.allocate_camera(camera_id, sub_band, inst.requirement(sub_band, camera_id))
    state = make_dynamic_state(alloc, inst, th_h=th_h, th_l=th_l)
    for flow_id, sub_band, count in flows:
        state.alloc.allocate_flow(flow_id, sub_band, count)
        state.flows[flow_id] = BackgroundFlow(
            id=flow_id,
            rb_req_per_subband=tuple([count] * sub_bands),
            assigned_subband=sub_band,
            assigned_rbs=count,
        )
    return state


# ---------------------------------------------------------------------------
# admission hand-traces
# ---------------------------------------------------------------------------
def test_admit_low_load_no_offload():
    # remaining (5, 2, 1); demand (2, 1, 3) lands on sub-band 1 at ratio 0.4
    state = _state([], [], [], 0, 18, 3,
                   flows=[(101, 1, 1), (102, 2, 4), (103, 3, 5)], th_h=2, th_l=4)
    assert state.remaining_vector() == [5, 2, 1]
    outcome = admit_background(state, BackgroundFlow(id=9, rb_req_per_subband=(2, 1, 3)))
    assert outcome.decision is Decision.ADMITTED
    assert outcome.candidate_subband == 1
    assert outcome.offload_subband is None and outcome.k_remove is None
    assert state.remaining_vector() == [3, 2, 1]
    assert state.flows[9].assigned_subband == 1
    assert state.flows[9].assigned_rbs == 2


def test_admit_congests_candidate_and_reroutes():
    # remaining (3, 2, 6); admitting drops sub-band 1 to 1 <= th_h, so its
    # most expensive camera leaves and an unscheduled stand-in joins band 3
    state = _state(
        coverage=[[1], [1], [1]],
        qualities=[2.0, 3.0, 1.0],
        rb_rows=[[5, 6, 6], [6, 6, 6], [6, 6, 2]],
        num_objects=1,
        total_rbs=24,
        sub_bands=3,
        cameras=[(1, 1), (2, 2)],
        flows=[(101, 3, 2)],
        th_h=2,
        th_l=4,
    )
    assert state.remaining_vector() == [3, 2, 6]
    outcome = admit_background(state, BackgroundFlow(id=9, rb_req_per_subband=(2, 5, 5)))
    assert outcome.decision is Decision.ADMITTED_WITH_REROUTE
    assert outcome.candidate_subband == 1
    assert outcome.offload_subband == 3
    assert outcome.k_remove == 1
    assert outcome.k_join == 3
    assert state.remaining_vector() == [6, 2, 4]
    assert state.alloc.camera_subband(1) is None
    assert state.alloc.camera_subband(3) == 3
    assert validate_allocation(state.alloc, state.instance) == []


def test_admit_rejected_leaves_state_bit_identical():
    # nothing fits, no offload target, and both cameras are coverage-required
    state = _state(
        coverage=[[1], [2]],
        qualities=[1.0, 1.0],
        rb_rows=[[4, 4], [4, 4]],
        num_objects=2,
        total_rbs=8,
        sub_bands=2,
        cameras=[(1, 1), (2, 2)],
        th_h=1,
        th_l=2,
    )
    before = state.to_jsonable()
    outcome = admit_background(state, BackgroundFlow(id=9, rb_req_per_subband=(1, 1)))
    assert outcome.decision is Decision.REJECTED
    assert outcome.candidate_subband is None
    assert state.to_jsonable() == before


def test_admit_fallback_removal_makes_room():
    # nothing fits outright; dropping the redundant camera frees sub-band 1
    state = _state(
        coverage=[[1], [1]],
        qualities=[2.0, 5.0],
        rb_rows=[[4, 8], [8, 4]],
        num_objects=1,
        total_rbs=8,
        sub_bands=2,
        cameras=[(1, 1), (2, 2)],
        th_h=1,
        th_l=3,
    )
    assert state.remaining_vector() == [0, 0]
    outcome = admit_background(state, BackgroundFlow(id=9, rb_req_per_subband=(2, 2)))
    assert outcome.decision is Decision.ADMITTED_WITH_REMOVAL
    assert outcome.candidate_subband == 1
    assert outcome.k_remove == 1  # camera 2 still covers the object
    assert state.remaining_vector() == [2, 0]
    assert validate_allocation(state.alloc, state.instance) == []


# ---------------------------------------------------------------------------
# re-routing hand-traces
# ---------------------------------------------------------------------------
def test_reroute_vacuous_coverage_picks_min_demand_stand_in():
    state = _state(
        coverage=[[1, 2], [1, 2], [], [], []],
        qualities=[5.0, 4.0, 1.0, 1.0, 1.0],
        rb_rows=[[4, 9], [3, 3], [9, 4], [9, 2], [9, 2]],
        num_objects=2,
        total_rbs=20,
        sub_bands=2,
        cameras=[(1, 1), (2, 2)],
        th_h=3,
        th_l=5,
    )
    pair = reroute_camera(state, 1, 2)
    assert pair == (1, 4)  # min r on the offload band, lowest id on the tie
    assert state.alloc.camera_subband(1) is None
    assert state.alloc.camera_range(4).sub_band == 2
    assert state.remaining_vector() == [10, 5]


def test_reroute_refuses_when_offload_band_would_congest():
    # remaining 5 minus stand-in demand 2 equals th_h 3: not strictly above
    state = _state(
        coverage=[[1], [1], []],
        qualities=[1.0, 1.0, 1.0],
        rb_rows=[[4, 8], [8, 3], [8, 2]],
        num_objects=1,
        total_rbs=16,
        sub_bands=2,
        cameras=[(1, 1), (2, 2)],
        th_h=3,
        th_l=5,
    )
    assert state.remaining_vector() == [4, 5]
    before = state.to_jsonable()
    assert reroute_camera(state, 1, 2) is None
    assert state.to_jsonable() == before


def test_reroute_rejects_equal_bands():
    state = _state([[1]], [1.0], [[2, 2]], 1, 12, 2, cameras=[(1, 1)])
    with pytest.raises(ValueError):
        reroute_camera(state, 1, 1)


def test_reroute_picks_highest_demand_camera_for_removal():
    state = _state(
        coverage=[[1], [1], [1], []],
        qualities=[1.0, 1.0, 9.0, 1.0],
        rb_rows=[[4, 9], [2, 9], [9, 3], [9, 1]],
        num_objects=1,
        total_rbs=18,
        sub_bands=2,
        cameras=[(1, 1), (2, 1), (3, 2)],
        th_h=1,
        th_l=3,
    )
    pair = reroute_camera(state, 1, 2)
    assert pair is not None and pair[0] == 1  # r=4 beats r=2


# ---------------------------------------------------------------------------
# removal hand-traces
# ---------------------------------------------------------------------------
def test_remove_spares_required_camera_despite_quality():
    state = _state(
        coverage=[[1, 2], [3], [1, 2, 4]],
        qualities=[5.0, 2.0, 9.0],
        rb_rows=[[3, 9], [2, 9], [9, 4]],
        num_objects=4,
        total_rbs=20,
        sub_bands=2,
        cameras=[(1, 1), (2, 1), (3, 2)],
    )
    got = remove_camera(state, 1)
    assert got == 1  # camera 2 is required for object 3; camera 1 is spare
    assert state.alloc.camera_subband(1) is None
    assert validate_allocation(state.alloc, state.instance) == []


def test_remove_returns_none_when_all_required():
    state = _state(
        coverage=[[1], [2], [3]],
        qualities=[1.0, 2.0, 3.0],
        rb_rows=[[2, 9], [2, 9], [9, 2]],
        num_objects=3,
        total_rbs=12,
        sub_bands=2,
        cameras=[(1, 1), (2, 1), (3, 2)],
    )
    before = state.to_jsonable()
    assert remove_camera(state, 1) is None
    assert state.to_jsonable() == before


def test_remove_lone_redundant_camera():
    state = _state(
        coverage=[[1], [1]],
        qualities=[4.0, 6.0],
        rb_rows=[[2, 9], [9, 3]],
        num_objects=1,
        total_rbs=12,
        sub_bands=2,
        cameras=[(1, 1), (2, 2)],
    )
    assert remove_camera(state, 1) == 1


# ---------------------------------------------------------------------------
# departures
# ---------------------------------------------------------------------------
def test_release_restores_remaining_exactly():
    state = _state([], [], [], 0, 12, 2, flows=[(5, 1, 3)], th_h=2, th_l=4)
    before = state.to_jsonable()
    admit_background(state, BackgroundFlow(id=9, rb_req_per_subband=(2, 2)))
    release_background(state, 9)
    assert state.to_jsonable() == before


def test_release_after_reroute_keeps_the_reroute():
    state = _state(
        coverage=[[1], [1], [1]],
        qualities=[2.0, 3.0, 1.0],
        rb_rows=[[5, 6, 6], [6, 6, 6], [6, 6, 2]],
        num_objects=1,
        total_rbs=24,
        sub_bands=3,
        cameras=[(1, 1), (2, 2)],
        flows=[(101, 3, 2)],
        th_h=2,
        th_l=4,
    )
    admit_background(state, BackgroundFlow(id=9, rb_req_per_subband=(2, 5, 5)))
    release_background(state, 9)
    assert state.remaining_vector() == [8, 2, 4]
    assert state.alloc.camera_subband(3) == 3  # stand-in stays

def test_release_unknown_flow():
    state = _state([], [], [], 0, 12, 2, th_h=2, th_l=4)
    with pytest.raises(UnknownFlow):
        release_background(state, 77)


# ---------------------------------------------------------------------------
# randomized event safety (small smoke; the large version is in acceptance)
# ---------------------------------------------------------------------------
def test_random_event_traces_keep_invariants():
    rng = np.random.default_rng(42)
    for trial in range(40):
        inst = random_instance(trial + 500)
        state = make_dynamic_state(schedule_mqbs(inst), inst)
        w_m = inst.spectrum.rbs_per_subband
        next_id = 1
        for _ in range(12):
            if state.flows and rng.uniform() < 0.35:
                fid = int(rng.choice(sorted(state.flows)))
                release_background(state, fid)
            else:
                big = rng.uniform() < 0.2
                demand = int(rng.integers(w_m, w_m + 3)) if big else int(rng.integers(1, max(w_m // 2, 1) + 1))
                arrival = BackgroundFlow(id=next_id, rb_req_per_subband=tuple([demand] * inst.num_subbands))
                next_id += 1
                before = state.to_jsonable()
                outcome = admit_background(state, arrival)
                if outcome.decision is Decision.REJECTED:
                    assert state.to_jsonable() == before
                    assert outcome.k_remove is None and outcome.k_join is None
                else:
                    assert outcome.candidate_subband is not None
                    if outcome.decision is Decision.ADMITTED_WITH_REROUTE:
                        assert outcome.k_remove is not None and outcome.k_join is not None
                        assert state.remaining(outcome.offload_subband) > state.th_h
                    if outcome.decision is Decision.ADMITTED_WITH_REMOVAL:
                        assert outcome.k_remove is not None and outcome.k_join is None
            assert min(state.remaining_vector()) >= 0
            assert validate_allocation(state.alloc, state.instance) == []
            for flow in state.flows.values():
                assert flow.assigned_rbs == flow.rb_req_per_subband[flow.assigned_subband - 1]

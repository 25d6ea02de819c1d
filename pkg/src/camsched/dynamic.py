"""Adapting a live allocation to background-traffic arrivals and departures.

An arriving flow lands in the sub-band minimizing demand/remaining.  If that
leaves the sub-band congested (remaining <= th_h), the load is offloaded: the
sub-band with the most headroom (>= th_l) receives a replacement camera for
the candidate's most expensive one (re-routing); with no such sub-band, the
least valuable camera that coverage can spare is dropped (removing).  Every
event applies transactionally: a rejected arrival leaves the state untouched.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from .sched import CAMERA, AllocationMap, ScheduleInstance


class UnknownFlow(KeyError):
    """Departure for a flow id that is not currently allocated."""


class Decision(str, Enum):
    ADMITTED = "admitted"
    ADMITTED_WITH_REROUTE = "admitted-with-reroute"
    ADMITTED_WITH_REMOVAL = "admitted-with-removal"
    REJECTED = "rejected"


@dataclass(frozen=True)
class AdmitOutcome:
    decision: Decision
    candidate_subband: int | None = None
    offload_subband: int | None = None
    k_remove: int | None = None
    k_join: int | None = None

    def to_jsonable(self) -> dict:
        return {
            "decision": self.decision.value,
            "candidate_subband": self.candidate_subband,
            "offload_subband": self.offload_subband,
            "k_remove": self.k_remove,
            "k_join": self.k_join,
        }


@dataclass
class BackgroundFlow:
    """Non-camera traffic with a per-sub-band RB demand."""

    id: int
    rb_req_per_subband: tuple[int, ...]
    assigned_subband: int | None = None
    assigned_rbs: int | None = None


def default_thresholds(rbs_per_subband: int) -> tuple[int, int]:
    """Congestion / offload-eligibility marks: 25% and 50% of a sub-band."""
    return math.ceil(0.25 * rbs_per_subband), math.ceil(0.5 * rbs_per_subband)


@dataclass
class DynamicState:
    """Live allocation (cameras + flows) plus the offload thresholds."""

    alloc: AllocationMap
    flows: dict[int, BackgroundFlow]
    th_h: int
    th_l: int
    instance: ScheduleInstance

    def __post_init__(self) -> None:
        if not 0 <= self.th_h < self.th_l <= self.instance.spectrum.rbs_per_subband:
            raise ValueError(f"need 0 <= th_h < th_l <= W_m, got {self.th_h}, {self.th_l}")

    def remaining(self, sub_band: int) -> int:
        return self.alloc.remaining(sub_band)

    def remaining_vector(self) -> list[int]:
        return self.alloc.remaining_vector()

    def clone(self) -> "DynamicState":
        return DynamicState(
            alloc=self.alloc.clone(),
            flows={fid: replace(f) for fid, f in self.flows.items()},
            th_h=self.th_h,
            th_l=self.th_l,
            instance=self.instance,
        )

    def to_jsonable(self) -> dict:
        return {
            "alloc": self.alloc.to_jsonable(),
            "flows": {
                str(fid): {
                    "rb_req_per_subband": list(f.rb_req_per_subband),
                    "assigned_subband": f.assigned_subband,
                    "assigned_rbs": f.assigned_rbs,
                }
                for fid, f in sorted(self.flows.items())
            },
            "th_h": self.th_h,
            "th_l": self.th_l,
        }


def make_dynamic_state(
    alloc: AllocationMap,
    inst: ScheduleInstance,
    th_h: int | None = None,
    th_l: int | None = None,
) -> DynamicState:
    d_h, d_l = default_thresholds(inst.spectrum.rbs_per_subband)
    return DynamicState(
        alloc=alloc.clone(),
        flows={},
        th_h=d_h if th_h is None else th_h,
        th_l=d_l if th_l is None else th_l,
        instance=inst,
    )


# ---------------------------------------------------------------------------
# Offload actions
# ---------------------------------------------------------------------------
def _cameras_in(alloc: AllocationMap, sub_band: int) -> list[tuple[int, int]]:
    """(camera_id, rb_count) pairs hosted by the sub-band, in physical order."""
    return [(p.ident, p.count) for p in alloc.segments(sub_band) if p.kind == CAMERA]


def reroute_camera(
    state: DynamicState, candidate_m: int, offload_m: int
) -> tuple[int, int] | None:
    """Swap the candidate's most expensive camera for an unscheduled stand-in.

    The stand-in must cover everything the leaving camera uniquely covered and
    must leave the offload sub-band with more than th_h RBs; otherwise nothing
    changes and None is returned (the caller falls through to removal).
    """
    if candidate_m == offload_m:
        raise ValueError("candidate and offload sub-bands must differ")
    inst = state.instance
    hosted = _cameras_in(state.alloc, candidate_m)
    if not hosted:
        return None
    k_remove, r_remove = hosted[0]
    for k, r in hosted[1:]:
        if r > r_remove:
            k_remove, r_remove = k, r
    scheduled = set(state.alloc.scheduled_cameras())
    covered: set[int] = set()
    for k in scheduled:
        if k != k_remove:
            covered |= inst.coverage_of(k)
    uncovered = set(range(1, inst.num_objects + 1)) - covered
    k_join = None
    r_join = None
    for k in range(1, inst.num_cameras + 1):
        if k in scheduled or not uncovered <= inst.coverage_of(k):
            continue
        r = inst.requirement(offload_m, k)
        if r is None:
            continue
        if r_join is None or r < r_join:
            k_join, r_join = k, r
    if k_join is None:
        return None
    if state.alloc.remaining(offload_m) - r_join <= state.th_h:
        return None
    state.alloc.remove_camera(k_remove)
    state.alloc.allocate_camera(k_join, offload_m, r_join)
    return k_remove, k_join


def remove_camera(state: DynamicState, candidate_m: int) -> int | None:
    """Drop the candidate's least-quality camera that coverage does not need.

    Cameras the other sub-bands cannot replace are marked required by a
    largest-coverage-first scan; None when every hosted camera is required.
    """
    inst = state.instance
    hosted = [k for k, _ in _cameras_in(state.alloc, candidate_m)]
    if not hosted:
        return None
    covered: set[int] = set()
    for k in state.alloc.scheduled_cameras():
        if k not in hosted:
            covered |= inst.coverage_of(k)
    order = sorted(hosted, key=lambda k: (-len(inst.coverage_of(k)), k))
    required: set[int] = set()
    for n in range(1, inst.num_objects + 1):
        if n in covered:
            continue
        for k in order:
            if n in inst.coverage_of(k):
                required.add(k)
                covered |= inst.coverage_of(k)
                break
    spare = [k for k in order if k not in required]
    if not spare:
        return None
    k_remove = min(spare, key=lambda k: (inst.quality(k), k))
    state.alloc.remove_camera(k_remove)
    return k_remove


# ---------------------------------------------------------------------------
# Arrival / departure events
# ---------------------------------------------------------------------------
def _candidate_subband(remaining: list[int], demand: tuple[int, ...]) -> int | None:
    """Sub-band minimizing demand/remaining among those with remaining > demand."""
    best_m, best_w = None, math.inf
    for m, (rem, need) in enumerate(zip(remaining, demand), start=1):
        if rem > need:
            w = need / rem
            if w < best_w:
                best_m, best_w = m, w
    return best_m


def _offload_target(state: DynamicState, candidate_m: int) -> int | None:
    """Sub-band with the largest remaining >= th_l, excluding the candidate."""
    best_m, best_rem = None, 0
    for m in range(1, state.instance.num_subbands + 1):
        if m == candidate_m:
            continue
        rem = state.remaining(m)
        if rem >= state.th_l and rem > best_rem:
            best_m, best_rem = m, rem
    return best_m


def _try_offload(work: DynamicState, candidate_m: int) -> tuple[Decision, dict]:
    """Re-route out of the candidate if a target sub-band exists, else remove."""
    offload_m = _offload_target(work, candidate_m)
    if offload_m is not None:
        pair = reroute_camera(work, candidate_m, offload_m)
        if pair is not None:
            k_remove, k_join = pair
            return Decision.ADMITTED_WITH_REROUTE, {
                "offload_subband": offload_m,
                "k_remove": k_remove,
                "k_join": k_join,
            }
    k_remove = remove_camera(work, candidate_m)
    if k_remove is not None:
        return Decision.ADMITTED_WITH_REMOVAL, {"k_remove": k_remove}
    return Decision.ADMITTED, {}


def _commit(state: DynamicState, work: DynamicState) -> None:
    state.alloc = work.alloc
    state.flows = work.flows


def admit_background(state: DynamicState, arrival: BackgroundFlow) -> AdmitOutcome:
    """Place an arriving flow, offloading cameras if the host gets congested.

    When no sub-band has headroom for the arrival, the offload machinery runs
    once against the max-remaining sub-band; if the arrival still does not fit
    the event is rejected and the state is left bit-identical.
    """
    inst = state.instance
    demand = tuple(arrival.rb_req_per_subband)
    if len(demand) != inst.num_subbands:
        raise ValueError(f"demand vector must have length {inst.num_subbands}")
    if any(d < 1 for d in demand):
        raise ValueError("demand must be >= 1 per sub-band")
    if arrival.id in state.flows:
        raise ValueError(f"flow {arrival.id} is already allocated")

    candidate_m = _candidate_subband(state.remaining_vector(), demand)
    if candidate_m is not None:
        work = state.clone()
        work.alloc.allocate_flow(arrival.id, candidate_m, demand[candidate_m - 1])
        work.flows[arrival.id] = replace(
            arrival, assigned_subband=candidate_m, assigned_rbs=demand[candidate_m - 1]
        )
        decision, extra = (
            _try_offload(work, candidate_m)
            if work.remaining(candidate_m) <= state.th_h
            else (Decision.ADMITTED, {})
        )
        _commit(state, work)
        return AdmitOutcome(decision=decision, candidate_subband=candidate_m, **extra)

    # nothing fits outright: offload the roomiest sub-band once, then retry
    remaining = state.remaining_vector()
    candidate_m = max(range(1, inst.num_subbands + 1), key=lambda m: (remaining[m - 1], -m))
    work = state.clone()
    decision, extra = _try_offload(work, candidate_m)
    if decision is not Decision.ADMITTED and work.remaining(candidate_m) > demand[candidate_m - 1]:
        work.alloc.allocate_flow(arrival.id, candidate_m, demand[candidate_m - 1])
        work.flows[arrival.id] = replace(
            arrival, assigned_subband=candidate_m, assigned_rbs=demand[candidate_m - 1]
        )
        _commit(state, work)
        return AdmitOutcome(decision=decision, candidate_subband=candidate_m, **extra)
    return AdmitOutcome(decision=Decision.REJECTED)


def release_background(state: DynamicState, flow_id: int) -> DynamicState:
    """Return a departed flow's RBs; cameras are never added on departures."""
    if flow_id not in state.flows:
        raise UnknownFlow(flow_id)
    state.alloc.remove_flow(flow_id)
    del state.flows[flow_id]
    return state

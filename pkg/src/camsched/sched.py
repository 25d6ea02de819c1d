"""Static uplink schedulers and the allocation data model.

Two schedulers share one representation: the SNR-greedy baseline (cheapest
camera first, coverage then fill) and the quality-first heuristic MQBS
(coverage assurance by highest quality, then quality improvement).  Within a
sub-band every occupant holds a contiguous RB run; runs are packed left to
right in allocation order, which keeps the SC-FDMA contiguity constraint
satisfied by construction.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelState, SpectrumConfig
from .scenario import Scenario

CAMERA = "camera"
FLOW = "flow"


class InfeasibleError(RuntimeError):
    """Coverage cannot be completed within the available spectrum."""

    def __init__(self, message: str, partial: "AllocationMap | None" = None):
        super().__init__(message)
        self.partial = partial


class CapacityExceeded(RuntimeError):
    """A placement would overflow its sub-band."""


@dataclass(frozen=True)
class Placement:
    """One occupant of a sub-band: a camera or a background flow."""

    kind: str
    ident: int
    count: int


@dataclass(frozen=True)
class RbRange:
    """Physical RB run inside a sub-band; 1-based inclusive indices."""

    sub_band: int
    first_rb: int
    count: int

    @property
    def last_rb(self) -> int:
        return self.first_rb + self.count - 1


class AllocationMap:
    """Per-sub-band occupant lists; physical ranges derive from list order.

    Removing an occupant re-packs the rest of its sub-band leftward, so the
    occupied RBs of a sub-band always form the prefix 1..used.
    """

    def __init__(self, spectrum: SpectrumConfig):
        self.spectrum = spectrum
        self._segments: list[list[Placement]] = [[] for _ in range(spectrum.sub_bands)]

    # -- queries ------------------------------------------------------------
    def segments(self, sub_band: int) -> list[Placement]:
        return list(self._segments[sub_band - 1])

    def used(self, sub_band: int) -> int:
        return sum(p.count for p in self._segments[sub_band - 1])

    def remaining(self, sub_band: int) -> int:
        return self.spectrum.rbs_per_subband - self.used(sub_band)

    def remaining_vector(self) -> list[int]:
        return [self.remaining(m) for m in range(1, self.spectrum.sub_bands + 1)]

    def _find(self, kind: str, ident: int) -> tuple[int, int] | None:
        for mi, seg in enumerate(self._segments):
            for si, p in enumerate(seg):
                if p.kind == kind and p.ident == ident:
                    return mi, si
        return None

    def camera_subband(self, camera_id: int) -> int | None:
        hit = self._find(CAMERA, camera_id)
        return hit[0] + 1 if hit else None

    def scheduled_cameras(self) -> list[int]:
        """Camera ids in allocation order (per sub-band, ascending sub-band)."""
        return [p.ident for seg in self._segments for p in seg if p.kind == CAMERA]

    def _range_at(self, mi: int, si: int) -> RbRange:
        first = 1 + sum(p.count for p in self._segments[mi][:si])
        return RbRange(mi + 1, first, self._segments[mi][si].count)

    def camera_range(self, camera_id: int) -> RbRange:
        hit = self._find(CAMERA, camera_id)
        if hit is None:
            raise KeyError(f"camera {camera_id} is not scheduled")
        return self._range_at(*hit)

    def flow_range(self, flow_id: int) -> RbRange:
        hit = self._find(FLOW, flow_id)
        if hit is None:
            raise KeyError(f"flow {flow_id} is not allocated")
        return self._range_at(*hit)

    def ranges(self) -> dict[int, RbRange]:
        """Camera id -> physical range, for every scheduled camera."""
        out: dict[int, RbRange] = {}
        for mi, seg in enumerate(self._segments):
            first = 1
            for p in seg:
                if p.kind == CAMERA:
                    out[p.ident] = RbRange(mi + 1, first, p.count)
                first += p.count
        return out

    def x_matrix(self, num_cameras: int) -> np.ndarray:
        x = np.zeros((self.spectrum.sub_bands, num_cameras), dtype=np.int8)
        for mi, seg in enumerate(self._segments):
            for p in seg:
                if p.kind == CAMERA:
                    x[mi, p.ident - 1] = 1
        return x

    # -- mutation -----------------------------------------------------------
    def _allocate(self, kind: str, ident: int, sub_band: int, count: int) -> RbRange:
        if not 1 <= sub_band <= self.spectrum.sub_bands:
            raise ValueError(f"sub-band {sub_band} out of range")
        if count < 1:
            raise ValueError("count must be >= 1")
        if self._find(kind, ident) is not None:
            raise ValueError(f"{kind} {ident} is already allocated")
        if count > self.remaining(sub_band):
            raise CapacityExceeded(
                f"{kind} {ident} needs {count} RBs, sub-band {sub_band} has "
                f"{self.remaining(sub_band)} left"
            )
        first = 1 + self.used(sub_band)
        self._segments[sub_band - 1].append(Placement(kind, ident, count))
        return RbRange(sub_band, first, count)

    def allocate_camera(self, camera_id: int, sub_band: int, count: int) -> RbRange:
        return self._allocate(CAMERA, camera_id, sub_band, count)

    def allocate_flow(self, flow_id: int, sub_band: int, count: int) -> RbRange:
        return self._allocate(FLOW, flow_id, sub_band, count)

    def _remove(self, kind: str, ident: int) -> tuple[int, int]:
        hit = self._find(kind, ident)
        if hit is None:
            raise KeyError(f"{kind} {ident} is not allocated")
        mi, si = hit
        p = self._segments[mi].pop(si)
        return mi + 1, p.count

    def remove_camera(self, camera_id: int) -> tuple[int, int]:
        """Free a camera's RBs; returns (sub_band, count)."""
        return self._remove(CAMERA, camera_id)

    def remove_flow(self, flow_id: int) -> tuple[int, int]:
        return self._remove(FLOW, flow_id)

    # -- misc ---------------------------------------------------------------
    def clone(self) -> "AllocationMap":
        other = AllocationMap(self.spectrum)
        other._segments = [list(seg) for seg in self._segments]
        return other

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, AllocationMap)
            and self.spectrum == other.spectrum
            and self._segments == other._segments
        )

    def to_jsonable(self) -> dict:
        return {
            "sub_bands": [
                [{"kind": p.kind, "id": p.ident, "count": p.count} for p in seg]
                for seg in self._segments
            ],
            "remaining": self.remaining_vector(),
        }

    def format_grid(self) -> str:
        """Human-readable RB grid, one row per sub-band."""
        width = self.spectrum.rbs_per_subband
        lines = []
        for m in range(1, self.spectrum.sub_bands + 1):
            cells = []
            for p in self._segments[m - 1]:
                label = f"Camera{p.ident}" if p.kind == CAMERA else f"Flow{p.ident}"
                cells.extend([label] * p.count)
            cells.extend(["-"] * (width - len(cells)))
            lines.append(f"Sub-band {m}: " + " ".join(cells))
        return "\n".join(lines)


def place_contiguous(
    events: list[tuple[int, int, int]], cfg: SpectrumConfig
) -> dict[int, RbRange]:
    """Pack (camera_id, sub_band, rb_count) events left-to-right per sub-band.

    Raises CapacityExceeded if any sub-band overflows.
    """
    alloc = AllocationMap(cfg)
    out = {}
    for camera_id, sub_band, count in events:
        out[camera_id] = alloc.allocate_camera(camera_id, sub_band, count)
    return out


@dataclass
class ScheduleInstance:
    """Scenario + channel + spectrum, with dimension checks and cached lookups."""

    scenario: Scenario
    channel: ChannelState
    spectrum: SpectrumConfig
    _cov_sets: list[frozenset[int]] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.channel.num_cameras != self.scenario.num_cameras:
            raise ValueError("channel and scenario disagree on camera count")
        if self.channel.num_subbands != self.spectrum.sub_bands:
            raise ValueError("channel and spectrum disagree on sub-band count")
        cov = self.scenario.coverage
        self._cov_sets = [frozenset(np.flatnonzero(cov[k]) + 1) for k in range(cov.shape[0])]

    @property
    def num_cameras(self) -> int:
        return self.scenario.num_cameras

    @property
    def num_objects(self) -> int:
        return self.scenario.num_objects

    @property
    def num_subbands(self) -> int:
        return self.spectrum.sub_bands

    def requirement(self, sub_band: int, camera_id: int) -> int | None:
        return self.channel.requirement(sub_band, camera_id)

    def coverage_of(self, camera_id: int) -> frozenset[int]:
        return self._cov_sets[camera_id - 1]

    def quality(self, camera_id: int) -> float:
        return float(self.scenario.qualities[camera_id - 1])


# ---------------------------------------------------------------------------
# Objective and constraint validation
# ---------------------------------------------------------------------------
def objective_value(alloc: AllocationMap, scenario: Scenario) -> float:
    """Total quality of the scheduled cameras (sum of x[m][k] * Q_k)."""
    q = scenario.qualities
    return float(sum(q[k - 1] for k in alloc.scheduled_cameras()))


@dataclass(frozen=True)
class Violation:
    constraint: str
    message: str


def validate_allocation(alloc: AllocationMap, inst: ScheduleInstance) -> list[Violation]:
    """All constraint breaches of an allocation; empty list means valid.

    Checks: one sub-band per camera, full object coverage by scheduled
    cameras, per-sub-band capacity, positive integral placements, RB counts
    matching the channel's per-sub-band requirement, and disjoint contiguous
    physical ranges.
    """
    out: list[Violation] = []
    seen: dict[int, int] = {}
    for m in range(1, inst.num_subbands + 1):
        used = 0
        for p in alloc.segments(m):
            if not isinstance(p.count, int) or p.count < 1:
                out.append(Violation("binary", f"{p.kind} {p.ident} has count {p.count}"))
                continue
            used += p.count
            if p.kind != CAMERA:
                continue
            seen[p.ident] = seen.get(p.ident, 0) + 1
            need = inst.requirement(m, p.ident)
            if need is None:
                out.append(
                    Violation("rb-mismatch", f"camera {p.ident} cannot transmit on sub-band {m}")
                )
            elif need != p.count:
                out.append(
                    Violation(
                        "rb-mismatch",
                        f"camera {p.ident} holds {p.count} RBs on sub-band {m}, needs {need}",
                    )
                )
        # ranges derive from list order, so runs are contiguous and disjoint by
        # construction; overflow is the only way the tiling can break
        if used > inst.spectrum.rbs_per_subband:
            out.append(
                Violation(
                    "capacity",
                    f"sub-band {m} allocates {used} RBs of {inst.spectrum.rbs_per_subband}",
                )
            )
    for k, times in seen.items():
        if times > 1:
            out.append(Violation("single-subband", f"camera {k} appears in {times} sub-bands"))
    covered: set[int] = set()
    for k in seen:
        covered |= inst.coverage_of(k)
    for n in range(1, inst.num_objects + 1):
        if n not in covered:
            out.append(Violation("coverage", f"object {n} is not covered by a scheduled camera"))
    return out


# ---------------------------------------------------------------------------
# Shared scheduling helpers
# ---------------------------------------------------------------------------
def _min_feasible_subband(inst: ScheduleInstance, alloc: AllocationMap, k: int):
    """(sub_band, r) minimizing r with r <= remaining; lowest sub-band on ties."""
    best = None
    for m in range(1, inst.num_subbands + 1):
        r = inst.requirement(m, k)
        if r is None or r > alloc.remaining(m):
            continue
        if best is None or r < best[1]:
            best = (m, r)
    return best


# ---------------------------------------------------------------------------
# SNR-greedy baseline
# ---------------------------------------------------------------------------
def baseline_coverage_phase(inst: ScheduleInstance) -> AllocationMap:
    """Serve the cheapest camera that covers something new until all covered.

    Candidate order: smallest feasible RB requirement over all sub-bands,
    ties to the lower camera index, then the lower sub-band index.
    """
    alloc = AllocationMap(inst.spectrum)
    uncovered = set(range(1, inst.num_objects + 1))
    unscheduled = set(range(1, inst.num_cameras + 1))
    while uncovered:
        best = None  # (r, k, m)
        for k in sorted(unscheduled):
            if not (inst.coverage_of(k) & uncovered):
                continue
            found = _min_feasible_subband(inst, alloc, k)
            if found is None:
                continue
            m, r = found
            if best is None or r < best[0]:
                best = (r, k, m)
        if best is None:
            raise InfeasibleError(
                f"objects {sorted(uncovered)} cannot be covered within the spectrum",
                partial=alloc,
            )
        r, k, m = best
        alloc.allocate_camera(k, m, r)
        unscheduled.discard(k)
        uncovered -= inst.coverage_of(k)
    return alloc


def baseline_fill_phase(alloc: AllocationMap, inst: ScheduleInstance) -> AllocationMap:
    """Keep serving the cheapest unscheduled camera until none fits."""
    out = alloc.clone()
    unscheduled = set(range(1, inst.num_cameras + 1)) - set(out.scheduled_cameras())
    while True:
        best = None
        for k in sorted(unscheduled):
            found = _min_feasible_subband(inst, out, k)
            if found is None:
                continue
            m, r = found
            if best is None or r < best[0]:
                best = (r, k, m)
        if best is None:
            return out
        r, k, m = best
        out.allocate_camera(k, m, r)
        unscheduled.discard(k)


def schedule_baseline(inst: ScheduleInstance) -> AllocationMap:
    """Coverage by cheapest-first, then fill remaining capacity cheapest-first."""
    return baseline_fill_phase(baseline_coverage_phase(inst), inst)


# ---------------------------------------------------------------------------
# MQBS
# ---------------------------------------------------------------------------
def mqbs_coverage_phase(
    inst: ScheduleInstance, base: AllocationMap | None = None
) -> AllocationMap:
    """Coverage assurance: per uncovered object (in index order) serve the
    covering camera with the highest quality, in its cheapest sub-band.

    If the best camera fits no sub-band the next-highest-quality covering
    camera is tried; InfeasibleError only when none fits.  ``base`` seeds the
    allocation with pre-existing occupants (periodic re-runs keep live flows).
    """
    alloc = base.clone() if base is not None else AllocationMap(inst.spectrum)
    covered: set[int] = set()
    scheduled = set(alloc.scheduled_cameras())
    for k in scheduled:
        covered |= inst.coverage_of(k)
    for n in range(1, inst.num_objects + 1):
        if n in covered:
            continue
        candidates = sorted(
            (k for k in range(1, inst.num_cameras + 1)
             if k not in scheduled and n in inst.coverage_of(k)),
            key=lambda k: (-inst.quality(k), k),
        )
        placed = False
        for k in candidates:
            found = _min_feasible_subband(inst, alloc, k)
            if found is None:
                continue
            m, r = found
            alloc.allocate_camera(k, m, r)
            scheduled.add(k)
            covered |= inst.coverage_of(k)
            placed = True
            break
        if not placed:
            raise InfeasibleError(
                f"object {n} cannot be covered within the spectrum", partial=alloc
            )
    return alloc


def mqbs_improvement_phase(alloc: AllocationMap, inst: ScheduleInstance) -> AllocationMap:
    """Quality improvement: walk unscheduled cameras by descending quality and
    serve each in its cheapest feasible sub-band; skipped cameras stay out."""
    out = alloc.clone()
    scheduled = set(out.scheduled_cameras())
    order = sorted(
        (k for k in range(1, inst.num_cameras + 1) if k not in scheduled),
        key=lambda k: (-inst.quality(k), k),
    )
    for k in order:
        found = _min_feasible_subband(inst, out, k)
        if found is not None:
            m, r = found
            out.allocate_camera(k, m, r)
    return out


def schedule_mqbs(inst: ScheduleInstance) -> AllocationMap:
    """Coverage assurance followed by quality improvement; deterministic."""
    return mqbs_improvement_phase(mqbs_coverage_phase(inst), inst)

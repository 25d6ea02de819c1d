"""Exact reference solver for small instances.

Depth-first branch and bound over per-camera choices (one of the M sub-bands
or unscheduled), pruned by a remaining-quality bound, sub-band capacity, and
coverage reachability.  Physical contiguity is not enumerated: any per-camera
RB counts that fit a sub-band admit a contiguous left-packing, so the search
over the 0/1 assignment matrix is exactly equivalent to the physical problem.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .sched import AllocationMap, InfeasibleError, ScheduleInstance


class BudgetExhausted(RuntimeError):
    """Node budget ran out before any feasible assignment was found."""


@dataclass
class ExactSolution:
    z_star: float
    assignment: dict[int, int]  # camera id -> sub-band id, scheduled cameras only
    x_star: np.ndarray  # (M, K) 0/1
    proven_optimal: bool
    nodes_explored: int


def allocation_from_assignment(
    inst: ScheduleInstance, assignment: dict[int, int]
) -> AllocationMap:
    """Left-pack an assignment into physical ranges (cameras by ascending id)."""
    alloc = AllocationMap(inst.spectrum)
    for k in sorted(assignment):
        m = assignment[k]
        r = inst.requirement(m, k)
        if r is None:
            raise ValueError(f"camera {k} cannot transmit on sub-band {m}")
        alloc.allocate_camera(k, m, r)
    return alloc


def _x_matrix(inst: ScheduleInstance, assignment: dict[int, int]) -> np.ndarray:
    x = np.zeros((inst.num_subbands, inst.num_cameras), dtype=np.int8)
    for k, m in assignment.items():
        x[m - 1, k - 1] = 1
    return x


def solve_exact(inst: ScheduleInstance, node_budget: int = 10_000_000) -> ExactSolution:
    """Best feasible assignment; proven optimal unless the budget ran out.

    Cameras branch in descending-quality order (ties to the lower id),
    sub-bands in ascending order, then the unscheduled choice.
    """
    K, M, N = inst.num_cameras, inst.num_subbands, inst.num_objects
    order = sorted(range(1, K + 1), key=lambda k: (-inst.quality(k), k))
    # optimistic bound: only positive qualities can raise z further
    suffix = [0.0] * (K + 1)
    for i in range(K - 1, -1, -1):
        suffix[i] = suffix[i + 1] + max(inst.quality(order[i]), 0.0)
    req = [[inst.requirement(m, k) for m in range(1, M + 1)] for k in range(1, K + 1)]
    cover = [sorted(inst.coverage_of(k)) for k in range(1, K + 1)]

    # objects coverable by no camera at all make the instance infeasible
    possible = [0] * (N + 1)
    for k in range(1, K + 1):
        for n in cover[k - 1]:
            possible[n] += 1
    if any(possible[n] == 0 for n in range(1, N + 1)):
        raise InfeasibleError("some object is covered by no camera")

    rem = [inst.spectrum.rbs_per_subband] * (M + 1)
    covered = [0] * (N + 1)
    best_z = 0.0
    best_assignment: dict[int, int] | None = None
    nodes = 0
    truncated = False
    choice: dict[int, int] = {}

    def descend(i: int, cur_z: float) -> None:
        nonlocal nodes, best_z, best_assignment, truncated
        if truncated:
            return
        nodes += 1
        if nodes > node_budget:
            truncated = True
            return
        if i == K:
            if best_assignment is None or cur_z > best_z:
                best_z = cur_z
                best_assignment = dict(choice)
            return
        if best_assignment is not None and cur_z + suffix[i] <= best_z:
            return
        k = order[i]
        objs = cover[k - 1]
        for m in range(1, M + 1):
            r = req[k - 1][m - 1]
            if r is None or r > rem[m]:
                continue
            rem[m] -= r
            for n in objs:
                covered[n] += 1
            choice[k] = m
            descend(i + 1, cur_z + inst.quality(k))
            del choice[k]
            for n in objs:
                covered[n] -= 1
            rem[m] += r
        # the unscheduled branch; prune if it strands an object
        dead = False
        for n in objs:
            possible[n] -= 1
            if possible[n] == 0 and covered[n] == 0:
                dead = True
        if not dead:
            descend(i + 1, cur_z)
        for n in objs:
            possible[n] += 1

    descend(0, 0.0)
    if best_assignment is None:
        if truncated:
            raise BudgetExhausted(f"no feasible assignment within {node_budget} nodes")
        raise InfeasibleError("no assignment satisfies coverage and capacity")
    return ExactSolution(
        z_star=best_z,
        assignment=best_assignment,
        x_star=_x_matrix(inst, best_assignment),
        proven_optimal=not truncated,
        nodes_explored=nodes,
    )


def solve_enumerate(inst: ScheduleInstance) -> ExactSolution:
    """Unpruned (M+1)^K enumeration; the desk-scale check for solve_exact."""
    K, M, N = inst.num_cameras, inst.num_subbands, inst.num_objects
    cap = inst.spectrum.rbs_per_subband
    best_z = 0.0
    best_assignment: dict[int, int] | None = None
    nodes = 0
    for combo in itertools.product(range(M + 1), repeat=K):
        nodes += 1
        used = [0] * (M + 1)
        covered: set[int] = set()
        z = 0.0
        ok = True
        for k, m in enumerate(combo, start=1):
            if m == 0:
                continue
            r = inst.requirement(m, k)
            if r is None:
                ok = False
                break
            used[m] += r
            if used[m] > cap:
                ok = False
                break
            covered |= inst.coverage_of(k)
            z += inst.quality(k)
        if not ok or len(covered) != N:
            continue
        if best_assignment is None or z > best_z:
            best_z = z
            best_assignment = {k: m for k, m in enumerate(combo, start=1) if m > 0}
    if best_assignment is None:
        raise InfeasibleError("no assignment satisfies coverage and capacity")
    return ExactSolution(
        z_star=best_z,
        assignment=best_assignment,
        x_star=_x_matrix(inst, best_assignment),
        proven_optimal=True,
        nodes_explored=nodes,
    )

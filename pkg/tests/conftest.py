from __future__ import annotations

import math
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from camsched import (
    EnvConfig,
    GenParams,
    ScheduleInstance,
    SpectrumConfig,
    abstract_scenario,
    build_channel_state,
    channel_from_rb_matrix,
    generate_scenario,
)
from camsched.scenario import FeasibilityExhausted

DATA_DIR = Path(__file__).parent / "data"

# The worked seven-camera / six-object example: per-camera RB demand on each
# of three sub-bands (five RBs each), coverage sets, and qualities.
WORKED_RB = [[5, 3, 5], [4, 5, 3], [4, 4, 4], [3, 4, 3], [4, 3, 5], [2, 2, 2], [4, 4, 4]]
WORKED_COVERAGE = [[2, 5], [1, 2, 4], [1, 4, 5], [5, 6], [2, 3, 4], [1, 3], [4, 5, 6]]
WORKED_QUALITY = [4, 5, 7, 3, 6, 3, 5]
WORKED_SPECTRUM = SpectrumConfig(total_rbs=15, sub_bands=3)


def worked_example_instance() -> ScheduleInstance:
    scen = abstract_scenario(WORKED_COVERAGE, WORKED_QUALITY, num_objects=6)
    chan = channel_from_rb_matrix(WORKED_RB, num_subbands=3)
    return ScheduleInstance(scen, chan, WORKED_SPECTRUM)


@pytest.fixture
def worked_example() -> ScheduleInstance:
    return worked_example_instance()


# Geometry defaults that keep random small instances reasonably likely to be
# coverable, for property tests that need many feasible draws quickly.
SMALL_PARAMS = GenParams(
    cell_radius=180.0,
    num_cameras=12,
    num_objects=6,
    angle_of_view=math.radians(150.0),
    distance_of_view=110.0,
)
SMALL_SPECTRUM = SpectrumConfig(total_rbs=24, sub_bands=3)
QUIET_ENV = EnvConfig(shadowing_sigma_db=4.0, seed=0)


def random_instance(
    seed: int,
    params: GenParams = SMALL_PARAMS,
    spectrum: SpectrumConfig = SMALL_SPECTRUM,
    env: EnvConfig = QUIET_ENV,
) -> ScheduleInstance:
    """A coverable instance; draws fresh seeds until generation succeeds."""
    rng = np.random.default_rng(seed)
    while True:
        inst_seed = int(rng.integers(0, 2**62))
        try:
            scen = generate_scenario(params, inst_seed)
        except FeasibilityExhausted:
            continue
        chan = build_channel_state(scen, spectrum, replace(env, seed=inst_seed))
        return ScheduleInstance(scen, chan, spectrum)


def random_abstract_instance(
    seed: int,
    num_cameras: int,
    num_objects: int,
    spectrum: SpectrumConfig,
    absent_prob: float = 0.1,
) -> ScheduleInstance:
    """Synthetic coverable instance with explicit coverage, demand, quality.

    Every object gets at least one covering camera, so coverage feasibility
    holds by construction; spectrum feasibility may still fail.
    """
    rng = np.random.default_rng(seed)
    M, cap = spectrum.sub_bands, spectrum.rbs_per_subband
    cov_sets: list[set[int]] = [set() for _ in range(num_cameras)]
    for n in range(1, num_objects + 1):
        cov_sets[int(rng.integers(0, num_cameras))].add(n)
    extra = rng.uniform(size=(num_cameras, num_objects)) < 0.25
    for k in range(num_cameras):
        for n in range(1, num_objects + 1):
            if extra[k, n - 1]:
                cov_sets[k].add(n)
    qualities = np.round(rng.uniform(0.5, 9.5, size=num_cameras), 3)
    scen = abstract_scenario([sorted(s) for s in cov_sets], qualities, num_objects)
    rb = rng.integers(1, cap + 2, size=(num_cameras, M))
    absent = rng.uniform(size=(num_cameras, M)) < absent_prob
    rb = np.where(absent, 0, rb)
    chan = channel_from_rb_matrix(rb, M)
    return ScheduleInstance(scen, chan, spectrum)

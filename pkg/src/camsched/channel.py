"""Link model: distance -> path loss -> per-sub-band SINR -> MCS -> RB demand.

The uplink is W resource blocks split into M equal sub-bands with flat fading
per (camera, sub-band).  A camera's SINR on a sub-band picks one MCS level,
which fixes how many RBs the camera needs there for its per-TTI demand.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .scenario import Scenario

RB_BANDWIDTH_HZ = 180_000.0
THERMAL_NOISE_DBM_PER_HZ = -174.0


@dataclass(frozen=True)
class McsLevel:
    """One modulation-and-coding level; code rate kept as an exact ratio."""

    id: int
    name: str
    modulation_bits: int
    code_num: int
    code_den: int
    sinr_threshold_db: float

    @property
    def bits_per_re(self) -> float:
        return self.modulation_bits * self.code_num / self.code_den

    def bits_per_rb(self, res_per_rb: int) -> Fraction:
        return Fraction(self.modulation_bits * self.code_num * res_per_rb, self.code_den)


# QPSK carries 2 bits/symbol, 16QAM 4; thresholds are configurable defaults,
# nothing downstream depends on their exact values.
DEFAULT_MCS_TABLE: tuple[McsLevel, ...] = (
    McsLevel(1, "QPSK 1/3", 2, 1, 3, -1.5),
    McsLevel(2, "QPSK 1/2", 2, 1, 2, 1.0),
    McsLevel(3, "QPSK 2/3", 2, 2, 3, 3.5),
    McsLevel(4, "QPSK 3/4", 2, 3, 4, 5.0),
    McsLevel(5, "16QAM 1/2", 4, 1, 2, 8.0),
    McsLevel(6, "16QAM 2/3", 4, 2, 3, 11.0),
    McsLevel(7, "16QAM 3/4", 4, 3, 4, 13.0),
)


def _check_table(table: tuple[McsLevel, ...]) -> None:
    if not table:
        raise ValueError("MCS table must be non-empty")
    for a, b in zip(table, table[1:]):
        if not (a.bits_per_re < b.bits_per_re and a.sinr_threshold_db < b.sinr_threshold_db):
            raise ValueError("MCS table must be strictly increasing in rate and threshold")


@dataclass(frozen=True)
class SpectrumConfig:
    """Uplink layout: W RBs split evenly into M sub-bands; one TTI = 168 REs/RB."""

    total_rbs: int = 48
    sub_bands: int = 4
    res_per_rb_per_tti: int = 168  # 2 slots x 7 symbols x 12 subcarriers

    def __post_init__(self) -> None:
        if self.total_rbs < 1 or self.sub_bands < 1 or self.res_per_rb_per_tti < 1:
            raise ValueError("spectrum dimensions must be positive")
        if self.total_rbs % self.sub_bands != 0:
            raise ValueError("total_rbs must be divisible by sub_bands")

    @property
    def rbs_per_subband(self) -> int:
        return self.total_rbs // self.sub_bands


@dataclass(frozen=True)
class EnvConfig:
    """Radio environment knobs; ``seed`` drives the shadowing draws."""

    tx_power_dbm: float = 24.0
    shadowing_sigma_db: float = 8.0
    interference_dbm_per_subband: float = -110.0  # -inf disables interference
    noise_figure_db: float = 5.0
    seed: int = 0


@dataclass
class ChannelState:
    """Per-(sub-band, camera) SINR, MCS id, and RB requirement.

    Arrays are (M, K); ``mcs_id`` 0 and ``rb_req`` 0 mean the camera cannot
    transmit on that sub-band.  Hand-built states carry NaN SINR and no MCS.
    """

    sinr_db: np.ndarray
    mcs_id: np.ndarray
    rb_req: np.ndarray
    table: tuple[McsLevel, ...] = DEFAULT_MCS_TABLE

    @property
    def num_subbands(self) -> int:
        return self.rb_req.shape[0]

    @property
    def num_cameras(self) -> int:
        return self.rb_req.shape[1]

    def requirement(self, sub_band: int, camera_id: int) -> int | None:
        """RB demand of a camera on a sub-band (1-based ids); None if unusable."""
        r = int(self.rb_req[sub_band - 1, camera_id - 1])
        return r if r > 0 else None

    def mcs_level(self, sub_band: int, camera_id: int) -> McsLevel | None:
        i = int(self.mcs_id[sub_band - 1, camera_id - 1])
        return self.table[i - 1] if i > 0 else None


def path_loss_db(
    distance_m: float,
    min_distance_m: float = 10.0,
    intercept_db: float = 128.1,
    slope_db_per_decade: float = 37.6,
) -> float:
    """Macro-cell path loss 128.1 + 37.6*log10(d_km); distance clamped at 10 m."""
    d = max(distance_m, min_distance_m)
    return intercept_db + slope_db_per_decade * math.log10(d / 1000.0)


def noise_floor_dbm(env: EnvConfig) -> float:
    """Thermal noise per RB plus receiver noise figure, in dBm."""
    return THERMAL_NOISE_DBM_PER_HZ + 10.0 * math.log10(RB_BANDWIDTH_HZ) + env.noise_figure_db


def _shadowing_db(env: EnvConfig, camera_id: int, sub_band: int) -> float:
    # one log-normal draw per (camera, sub-band), addressable by seed
    rng = np.random.default_rng(np.random.SeedSequence([env.seed, sub_band, camera_id]))
    return float(rng.normal()) * env.shadowing_sigma_db


def sinr_db(camera, sub_band: int, env: EnvConfig) -> float:
    """SINR of a camera on one sub-band, deterministic per (env.seed, camera, sub-band)."""
    d = math.hypot(camera.position[0], camera.position[1])
    rx = env.tx_power_dbm - path_loss_db(d) - _shadowing_db(env, camera.id, sub_band)
    noise_lin = 10.0 ** (noise_floor_dbm(env) / 10.0)
    interference_lin = (
        0.0
        if env.interference_dbm_per_subband == -math.inf
        else 10.0 ** (env.interference_dbm_per_subband / 10.0)
    )
    return rx - 10.0 * math.log10(noise_lin + interference_lin)


def select_mcs(sinr: float, table: tuple[McsLevel, ...] = DEFAULT_MCS_TABLE) -> McsLevel | None:
    """Highest level whose threshold is <= sinr (inclusive); None below the lowest."""
    _check_table(table)
    chosen = None
    for level in table:
        if sinr >= level.sinr_threshold_db:
            chosen = level
        else:
            break
    return chosen


def rb_requirement(tp: float, mcs: McsLevel, cfg: SpectrumConfig) -> int:
    """RBs needed to carry ``tp`` bits per TTI at the given level (exact ceiling)."""
    if tp <= 0:
        raise ValueError("tp must be positive")
    return math.ceil(Fraction(tp) / mcs.bits_per_rb(cfg.res_per_rb_per_tti))


def build_channel_state(
    scenario: Scenario,
    cfg: SpectrumConfig,
    env: EnvConfig,
    table: tuple[McsLevel, ...] = DEFAULT_MCS_TABLE,
) -> ChannelState:
    """Compose sinr_db -> select_mcs -> rb_requirement for every (sub-band, camera)."""
    if scenario.cameras is None:
        raise ValueError("scenario carries no geometry")
    _check_table(table)
    M, K = cfg.sub_bands, scenario.num_cameras
    sinr = np.zeros((M, K))
    mcs_id = np.zeros((M, K), dtype=np.int64)
    rb = np.zeros((M, K), dtype=np.int64)
    demand_cache: dict[tuple[float, int], int] = {}
    for k, cam in enumerate(scenario.cameras):
        for m in range(1, M + 1):
            s = sinr_db(cam, m, env)
            sinr[m - 1, k] = s
            level = select_mcs(s, table)
            if level is None:
                continue
            key = (cam.tp, level.id)
            need = demand_cache.get(key)
            if need is None:
                need = rb_requirement(cam.tp, level, cfg)
                demand_cache[key] = need
            mcs_id[m - 1, k] = level.id
            rb[m - 1, k] = need
    return ChannelState(sinr_db=sinr, mcs_id=mcs_id, rb_req=rb, table=table)


def channel_from_rb_matrix(rb_per_camera, num_subbands: int) -> ChannelState:
    """Hand-built state from per-camera rows of RB demands (0 = cannot transmit)."""
    rows = list(rb_per_camera)
    arr = np.asarray(rows, dtype=np.int64).reshape(len(rows), num_subbands)
    if arr.ndim != 2 or arr.shape[1] != num_subbands:
        raise ValueError(f"expected rows of length {num_subbands}")
    if (arr < 0).any():
        raise ValueError("RB demands must be nonnegative")
    rb = arr.T.copy()
    M, K = rb.shape
    return ChannelState(
        sinr_db=np.full((M, K), np.nan),
        mcs_id=np.zeros((M, K), dtype=np.int64),
        rb_req=rb,
    )

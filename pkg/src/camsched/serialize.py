"""JSON round-trips for scenarios, instances, allocations, and event traces.

Instances are one JSON document holding the spectrum layout, the scenario
(geometric, with positions, or abstract, with explicit coverage/qualities),
and the channel (environment parameters to rebuild it, or an explicit RB
matrix for hand-built fixtures).  Geometric coverage and qualities are
recomputed on load, so files stay small and the invariants hold by
construction.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .channel import (
    DEFAULT_MCS_TABLE,
    ChannelState,
    EnvConfig,
    McsLevel,
    SpectrumConfig,
    build_channel_state,
    channel_from_rb_matrix,
)
from .scenario import (
    CameraSpec,
    QoVWeights,
    Scenario,
    TargetObject,
    abstract_scenario,
    build_scenario,
)
from .sched import AllocationMap, ScheduleInstance, objective_value

FORMAT_NAME = "camsched-instance"
FORMAT_VERSION = 1


# ---------------------------------------------------------------------------
# Scenario
# ---------------------------------------------------------------------------
def weights_to_jsonable(w: QoVWeights) -> dict:
    return {
        "w_theta": w.w_theta,
        "w_phi": w.w_phi,
        "w_dist": w.w_dist,
        "clamp_negative": w.clamp_negative,
        "distance_deviation": w.distance_deviation,
    }


def weights_from_jsonable(doc: dict) -> QoVWeights:
    return QoVWeights(
        w_theta=doc.get("w_theta", 1.0),
        w_phi=doc.get("w_phi", 0.0),
        w_dist=doc.get("w_dist", 1.0),
        clamp_negative=doc.get("clamp_negative", True),
        distance_deviation=doc.get("distance_deviation", False),
    )


def scenario_to_jsonable(s: Scenario) -> dict:
    if s.cameras is None or s.objects is None:
        return {
            "kind": "abstract",
            "num_objects": s.num_objects,
            "coverage": [s.coverage_set(k) for k in range(1, s.num_cameras + 1)],
            "qualities": [float(q) for q in s.qualities],
        }
    return {
        "kind": "geometric",
        "cell_radius": s.cell_radius,
        "seed": s.seed,
        "weights": weights_to_jsonable(s.weights),
        "cameras": [
            {
                "id": c.id,
                "position": list(c.position),
                "boresight": c.boresight,
                "angle_of_view": c.angle_of_view,
                "distance_of_view": c.distance_of_view,
                "best_distance": c.best_distance,
                "bitrate": c.bitrate,
            }
            for c in s.cameras
        ],
        "objects": [
            {
                "id": o.id,
                "position": list(o.position),
                "body_orientation": o.body_orientation,
                "elevation_angle": o.elevation_angle,
            }
            for o in s.objects
        ],
    }


def scenario_from_jsonable(doc: dict) -> Scenario:
    kind = doc.get("kind", "geometric")
    if kind == "abstract":
        return abstract_scenario(doc["coverage"], doc["qualities"], doc["num_objects"])
    if kind != "geometric":
        raise ValueError(f"unknown scenario kind: {kind!r}")
    cameras = [
        CameraSpec(
            id=c["id"],
            position=tuple(c["position"]),
            boresight=c["boresight"],
            angle_of_view=c["angle_of_view"],
            distance_of_view=c["distance_of_view"],
            best_distance=c["best_distance"],
            bitrate=c["bitrate"],
        )
        for c in doc["cameras"]
    ]
    objects = [
        TargetObject(
            id=o["id"],
            position=tuple(o["position"]),
            body_orientation=o["body_orientation"],
            elevation_angle=o.get("elevation_angle", 0.0),
        )
        for o in doc["objects"]
    ]
    return build_scenario(
        cameras,
        objects,
        weights_from_jsonable(doc.get("weights", {})),
        cell_radius=doc["cell_radius"],
        seed=doc.get("seed"),
    )


# ---------------------------------------------------------------------------
# Channel / environment
# ---------------------------------------------------------------------------
def env_to_jsonable(env: EnvConfig) -> dict:
    return {
        "tx_power_dbm": env.tx_power_dbm,
        "shadowing_sigma_db": env.shadowing_sigma_db,
        "interference_dbm_per_subband": env.interference_dbm_per_subband,
        "noise_figure_db": env.noise_figure_db,
        "seed": env.seed,
    }


def env_from_jsonable(doc: dict) -> EnvConfig:
    base = EnvConfig()
    return EnvConfig(
        tx_power_dbm=doc.get("tx_power_dbm", base.tx_power_dbm),
        shadowing_sigma_db=doc.get("shadowing_sigma_db", base.shadowing_sigma_db),
        interference_dbm_per_subband=doc.get(
            "interference_dbm_per_subband", base.interference_dbm_per_subband
        ),
        noise_figure_db=doc.get("noise_figure_db", base.noise_figure_db),
        seed=doc.get("seed", base.seed),
    )


def mcs_table_from_jsonable(rows: list[dict]) -> tuple[McsLevel, ...]:
    return tuple(
        McsLevel(
            id=r["id"],
            name=r["name"],
            modulation_bits=r["modulation_bits"],
            code_num=r["code_num"],
            code_den=r["code_den"],
            sinr_threshold_db=r["sinr_threshold_db"],
        )
        for r in rows
    )


def mcs_table_to_jsonable(table: tuple[McsLevel, ...]) -> list[dict]:
    return [
        {
            "id": lv.id,
            "name": lv.name,
            "modulation_bits": lv.modulation_bits,
            "code_num": lv.code_num,
            "code_den": lv.code_den,
            "sinr_threshold_db": lv.sinr_threshold_db,
        }
        for lv in table
    ]


def spectrum_to_jsonable(cfg: SpectrumConfig) -> dict:
    return {
        "total_rbs": cfg.total_rbs,
        "sub_bands": cfg.sub_bands,
        "res_per_rb_per_tti": cfg.res_per_rb_per_tti,
    }


def spectrum_from_jsonable(doc: dict) -> SpectrumConfig:
    base = SpectrumConfig()
    return SpectrumConfig(
        total_rbs=doc.get("total_rbs", base.total_rbs),
        sub_bands=doc.get("sub_bands", base.sub_bands),
        res_per_rb_per_tti=doc.get("res_per_rb_per_tti", base.res_per_rb_per_tti),
    )


# ---------------------------------------------------------------------------
# Whole instances
# ---------------------------------------------------------------------------
def instance_to_jsonable(inst: ScheduleInstance, env: EnvConfig | None = None) -> dict:
    doc: dict[str, Any] = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "spectrum": spectrum_to_jsonable(inst.spectrum),
        "scenario": scenario_to_jsonable(inst.scenario),
    }
    if env is not None:
        doc["channel"] = {"kind": "env", **env_to_jsonable(env)}
    else:
        rb = inst.channel.rb_req
        doc["channel"] = {
            "kind": "table",
            "rb_per_camera": [[int(rb[m, k]) for m in range(rb.shape[0])] for k in range(rb.shape[1])],
        }
    return doc


def instance_from_jsonable(doc: dict) -> ScheduleInstance:
    if doc.get("format") != FORMAT_NAME:
        raise ValueError(f"not a {FORMAT_NAME} document")
    spectrum = spectrum_from_jsonable(doc.get("spectrum", {}))
    scenario = scenario_from_jsonable(doc["scenario"])
    ch = doc["channel"]
    kind = ch.get("kind", "env")
    if kind == "table":
        channel: ChannelState = channel_from_rb_matrix(ch["rb_per_camera"], spectrum.sub_bands)
    elif kind == "env":
        mcs = mcs_table_from_jsonable(ch["mcs_table"]) if "mcs_table" in ch else DEFAULT_MCS_TABLE
        channel = build_channel_state(scenario, spectrum, env_from_jsonable(ch), table=mcs)
    else:
        raise ValueError(f"unknown channel kind: {kind!r}")
    return ScheduleInstance(scenario=scenario, channel=channel, spectrum=spectrum)


def save_instance(inst: ScheduleInstance, path: str | Path, env: EnvConfig | None = None) -> None:
    Path(path).write_text(dumps(instance_to_jsonable(inst, env)), encoding="utf-8")


def load_instance(path: str | Path) -> ScheduleInstance:
    return instance_from_jsonable(json.loads(Path(path).read_text(encoding="utf-8")))


# ---------------------------------------------------------------------------
# Allocations and event traces
# ---------------------------------------------------------------------------
def allocation_to_jsonable(alloc: AllocationMap, scenario: Scenario) -> dict:
    ranges = alloc.ranges()
    return {
        "objective": objective_value(alloc, scenario),
        "cameras": [
            {
                "camera": k,
                "sub_band": rng.sub_band,
                "first_rb": rng.first_rb,
                "rb_count": rng.count,
            }
            for k, rng in sorted(ranges.items())
        ],
        "remaining": alloc.remaining_vector(),
    }


def load_events(path: str | Path) -> list[dict]:
    """Event trace: a JSON array of {time_ms, kind, ...} records, time-ordered."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(doc, list):
        raise ValueError("event trace must be a JSON array")
    return doc


def save_events(events: list[dict], path: str | Path) -> None:
    Path(path).write_text(dumps(events), encoding="utf-8")


def dumps(doc: Any) -> str:
    """Stable JSON text: fixed key order as constructed, trailing newline."""
    return json.dumps(doc, indent=2) + "\n"

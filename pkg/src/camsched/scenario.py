"""Surveillance-scenario geometry: cameras, monitored objects, coverage, and quality.

A camera sees a circular sector (boresight +/- half the angle of view, out to
its distance of view).  Per covered object the quality of view combines three
terms: how frontally the subject faces the camera (theta), the elevation angle
(phi, fixed 0 in the 2-D model), and how close the capture distance is to the
camera's preferred distance.  A camera's quality is the sum over the objects
it covers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

TWO_PI = 2.0 * math.pi


class FeasibilityExhausted(RuntimeError):
    """No instance with full coverage was found within the attempt bound."""

    def __init__(self, attempts: int):
        super().__init__(f"no coverable instance after {attempts} attempts")
        self.attempts = attempts


def wrap_angle(a: float) -> float:
    """Normalize an angle to (-pi, pi]."""
    a = math.fmod(a, TWO_PI)
    if a <= -math.pi:
        a += TWO_PI
    elif a > math.pi:
        a -= TWO_PI
    return a


@dataclass(frozen=True)
class TargetObject:
    """A monitored subject: where it stands and which way it faces."""

    id: int
    position: tuple[float, float]
    body_orientation: float = 0.0  # radians in (-pi, pi]
    elevation_angle: float = 0.0  # radians in [-pi/2, pi/2]; 0 in 2-D scenarios

    def __post_init__(self) -> None:
        object.__setattr__(self, "body_orientation", wrap_angle(self.body_orientation))
        if not -math.pi / 2 <= self.elevation_angle <= math.pi / 2:
            raise ValueError(f"elevation_angle out of [-pi/2, pi/2]: {self.elevation_angle}")


@dataclass(frozen=True)
class CameraSpec:
    """A fixed camera: pose, sector geometry, and uplink data-rate demand."""

    id: int
    position: tuple[float, float]
    boresight: float  # radians, central viewing direction
    angle_of_view: float  # radians, full sector width in (0, 2*pi]
    distance_of_view: float  # metres
    best_distance: float  # metres, preferred capture distance
    bitrate: float  # bits/second

    def __post_init__(self) -> None:
        if not 0.0 < self.angle_of_view <= TWO_PI:
            raise ValueError(f"angle_of_view out of (0, 2*pi]: {self.angle_of_view}")
        if not 0.0 < self.best_distance <= self.distance_of_view:
            raise ValueError("best_distance must be in (0, distance_of_view]")
        if self.bitrate <= 0.0:
            raise ValueError("bitrate must be positive")

    @property
    def tp(self) -> float:
        """Demand per 1 ms TTI, in bits."""
        return self.bitrate * 1e-3


@dataclass(frozen=True)
class QoVWeights:
    """Weights of the three quality-of-view terms, with formula variants.

    ``clamp_negative`` floors each per-object contribution at 0 (the distance
    term goes negative past twice the preferred distance otherwise).
    ``distance_deviation`` switches the distance term from ``1 - L/L_B`` to
    ``1 - |L - L_B|/L_B``, which peaks at the preferred distance.
    """

    w_theta: float = 1.0
    w_phi: float = 0.0
    w_dist: float = 1.0
    clamp_negative: bool = True
    distance_deviation: bool = False

    def __post_init__(self) -> None:
        if min(self.w_theta, self.w_phi, self.w_dist) < 0.0:
            raise ValueError("weights must be nonnegative")
        if self.w_theta == self.w_phi == self.w_dist == 0.0:
            raise ValueError("weights must not all be zero")


@dataclass
class Scenario:
    """A full instance: geometry (optional), coverage matrix, and qualities.

    ``coverage`` is a (K, N) 0/1 matrix; ``qualities`` the per-camera quality.
    Hand-built instances may carry no geometry (``cameras``/``objects`` None),
    in which case coverage and qualities are authoritative as given.
    """

    cell_radius: float
    cameras: list[CameraSpec] | None
    objects: list[TargetObject] | None
    coverage: np.ndarray
    qualities: np.ndarray
    weights: QoVWeights = field(default_factory=QoVWeights)
    seed: int | None = None
    gen_attempts: int = 1
    base_station: tuple[float, float] = (0.0, 0.0)

    @property
    def num_cameras(self) -> int:
        return self.coverage.shape[0]

    @property
    def num_objects(self) -> int:
        return self.coverage.shape[1]

    def coverage_set(self, camera_id: int) -> list[int]:
        """Object ids covered by the camera (ids are 1-based)."""
        return [int(n) + 1 for n in np.flatnonzero(self.coverage[camera_id - 1])]

    def covering_cameras(self, object_id: int) -> list[int]:
        """Camera ids covering the object (ids are 1-based)."""
        return [int(k) + 1 for k in np.flatnonzero(self.coverage[:, object_id - 1])]


@dataclass(frozen=True)
class GenParams:
    """Knobs for random scenario generation (defaults match the harness setup)."""

    cell_radius: float = 250.0
    num_cameras: int = 50
    num_objects: int = 50
    angle_of_view: float = math.radians(150.0)
    distance_of_view: float = 100.0
    bitrates: tuple[float, ...] = (512_000.0, 1_000_000.0, 2_000_000.0)
    best_distance: float | None = None  # None: distance_of_view / 2
    weights: QoVWeights = field(default_factory=QoVWeights)
    max_attempts: int = 1000


# ---------------------------------------------------------------------------
# Scalar geometry operations
# ---------------------------------------------------------------------------
def coverage_indicator(camera: CameraSpec, obj: TargetObject) -> bool:
    """True iff the object lies inside the camera's viewing sector.

    The bearing test |wrap(atan2(dy, dx) - boresight)| <= aov/2 is evaluated
    in dot-product form (cos is monotone on [0, pi]), which every coverage
    path shares so scalar and vectorized results agree bit for bit.
    """
    dx = obj.position[0] - camera.position[0]
    dy = obj.position[1] - camera.position[1]
    dist = math.hypot(dx, dy)
    if dist > camera.distance_of_view:
        return False
    along = dx * math.cos(camera.boresight) + dy * math.sin(camera.boresight)
    return along >= dist * math.cos(camera.angle_of_view / 2.0)


def quality_of_view(camera: CameraSpec, obj: TargetObject, weights: QoVWeights) -> float:
    """Per-object view quality; the object must be covered by the camera.

    w_theta*(1 - |theta|/pi) + w_phi*(1 - |2*phi|/pi) + w_dist*(1 - L/L_B),
    where theta is the signed angle between the subject's facing direction and
    the object-to-camera direction (0 when the subject faces the camera).
    """
    if not coverage_indicator(camera, obj):
        raise ValueError(f"object {obj.id} is not covered by camera {camera.id}")
    dx = camera.position[0] - obj.position[0]
    dy = camera.position[1] - obj.position[1]
    theta = wrap_angle(math.atan2(dy, dx) - obj.body_orientation)
    dist = math.hypot(dx, dy)
    term_theta = 1.0 - abs(theta) / math.pi
    term_phi = 1.0 - abs(2.0 * obj.elevation_angle) / math.pi
    if weights.distance_deviation:
        term_dist = 1.0 - abs(dist - camera.best_distance) / camera.best_distance
    else:
        term_dist = 1.0 - dist / camera.best_distance
    value = weights.w_theta * term_theta + weights.w_phi * term_phi + weights.w_dist * term_dist
    return max(0.0, value) if weights.clamp_negative else value


def camera_quality(camera: CameraSpec, scenario: Scenario, weights: QoVWeights) -> float:
    """Sum of quality_of_view over the objects the camera covers; 0 if none."""
    if scenario.objects is None:
        raise ValueError("scenario carries no geometry")
    total = 0.0
    for n in np.flatnonzero(scenario.coverage[camera.id - 1]):
        total += quality_of_view(camera, scenario.objects[n], weights)
    return total


def check_feasible(scenario: Scenario) -> bool:
    """True iff every object is covered by at least one camera."""
    return bool(scenario.coverage.any(axis=0).all())


# ---------------------------------------------------------------------------
# Vectorized geometry (used by the builders; agrees with the scalar ops)
# ---------------------------------------------------------------------------
def _wrap_array(a: np.ndarray) -> np.ndarray:
    # maps to [-pi, pi); the boundary only matters at exactly -pi, measure zero
    return (a + math.pi) % TWO_PI - math.pi


def _coverage_matrix(cam_xy, cam_bore, cam_half, cam_dov, obj_xy) -> np.ndarray:
    dx = obj_xy[None, :, 0] - cam_xy[:, None, 0]
    dy = obj_xy[None, :, 1] - cam_xy[:, None, 1]
    dist = np.hypot(dx, dy)
    along = dx * np.cos(cam_bore)[:, None] + dy * np.sin(cam_bore)[:, None]
    return (dist <= cam_dov[:, None]) & (along >= dist * np.cos(cam_half)[:, None])


def _quality_vector(cam_xy, cam_best, obj_xy, obj_orient, obj_elev, coverage, weights) -> np.ndarray:
    dx = cam_xy[:, None, 0] - obj_xy[None, :, 0]
    dy = cam_xy[:, None, 1] - obj_xy[None, :, 1]
    dist = np.hypot(dx, dy)
    theta = _wrap_array(np.arctan2(dy, dx) - obj_orient[None, :])
    term_theta = 1.0 - np.abs(theta) / math.pi
    term_phi = 1.0 - np.abs(2.0 * obj_elev[None, :]) / math.pi
    if weights.distance_deviation:
        term_dist = 1.0 - np.abs(dist - cam_best[:, None]) / cam_best[:, None]
    else:
        term_dist = 1.0 - dist / cam_best[:, None]
    qov = weights.w_theta * term_theta + weights.w_phi * term_phi + weights.w_dist * term_dist
    if weights.clamp_negative:
        qov = np.maximum(qov, 0.0)
    return np.where(coverage, qov, 0.0).sum(axis=1)


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------
def build_scenario(
    cameras: Sequence[CameraSpec],
    objects: Sequence[TargetObject],
    weights: QoVWeights | None = None,
    cell_radius: float = 250.0,
    seed: int | None = None,
    gen_attempts: int = 1,
) -> Scenario:
    """Assemble a geometric scenario, computing coverage and qualities."""
    weights = weights or QoVWeights()
    cam_xy = np.array([c.position for c in cameras], dtype=float).reshape(len(cameras), 2)
    obj_xy = np.array([o.position for o in objects], dtype=float).reshape(len(objects), 2)
    cov = _coverage_matrix(
        cam_xy,
        np.array([c.boresight for c in cameras]),
        np.array([c.angle_of_view / 2.0 for c in cameras]),
        np.array([c.distance_of_view for c in cameras]),
        obj_xy,
    )
    q = _quality_vector(
        cam_xy,
        np.array([c.best_distance for c in cameras]),
        obj_xy,
        np.array([o.body_orientation for o in objects]),
        np.array([o.elevation_angle for o in objects]),
        cov,
        weights,
    )
    return Scenario(
        cell_radius=cell_radius,
        cameras=list(cameras),
        objects=list(objects),
        coverage=cov.astype(np.uint8),
        qualities=q,
        weights=weights,
        seed=seed,
        gen_attempts=gen_attempts,
    )


def abstract_scenario(
    coverage_sets: Sequence[Sequence[int]],
    qualities: Sequence[float],
    num_objects: int,
) -> Scenario:
    """Hand-built instance from explicit coverage sets (1-based ids) and qualities."""
    if len(coverage_sets) != len(qualities):
        raise ValueError("coverage_sets and qualities must have equal length")
    cov = np.zeros((len(coverage_sets), num_objects), dtype=np.uint8)
    for k, objs in enumerate(coverage_sets):
        for n in objs:
            if not 1 <= n <= num_objects:
                raise ValueError(f"object id {n} out of range 1..{num_objects}")
            cov[k, n - 1] = 1
    q = np.asarray(qualities, dtype=float)
    if (q < 0).any():
        raise ValueError("qualities must be nonnegative")
    return Scenario(cell_radius=0.0, cameras=None, objects=None, coverage=cov, qualities=q)


_GEN_BLOCK = 256  # attempts sampled per vectorized batch; fixed for determinism


def generate_scenario(params: GenParams, seed: int) -> Scenario:
    """Sample uniform instances until every object is covered; deterministic per seed.

    Positions are uniform over the cell disc, orientations and boresights
    uniform over (-pi, pi].  The whole instance is resampled on failure, up to
    ``params.max_attempts`` draws, then FeasibilityExhausted is raised.
    Attempts are drawn in fixed-size batches so the coverage check vectorizes;
    rare-coverage corners (narrow angles, few cameras) burn through thousands
    of attempts per kept instance.
    """
    if params.num_cameras < 1:
        raise ValueError("num_cameras must be >= 1")
    if params.num_objects < 1:
        raise ValueError("num_objects must be >= 1")
    if not params.bitrates:
        raise ValueError("bitrates must be non-empty")
    rng = np.random.default_rng(seed)
    K, N = params.num_cameras, params.num_objects
    radius = params.cell_radius
    half = params.angle_of_view / 2.0
    best = params.best_distance if params.best_distance is not None else params.distance_of_view / 2.0
    rates = np.asarray(params.bitrates, dtype=float)
    dov = params.distance_of_view
    examined = 0
    while examined < params.max_attempts:
        B = min(_GEN_BLOCK, params.max_attempts - examined)
        cam_r = radius * np.sqrt(rng.uniform(size=(B, K)))
        cam_a = rng.uniform(-math.pi, math.pi, size=(B, K))
        cam_bore = rng.uniform(-math.pi, math.pi, size=(B, K))
        cam_rate = rates[rng.integers(0, len(rates), size=(B, K))]
        obj_r = radius * np.sqrt(rng.uniform(size=(B, N)))
        obj_a = rng.uniform(-math.pi, math.pi, size=(B, N))
        obj_orient = rng.uniform(-math.pi, math.pi, size=(B, N))
        cam_x = cam_r * np.cos(cam_a)
        cam_y = cam_r * np.sin(cam_a)
        obj_x = obj_r * np.cos(obj_a)
        obj_y = obj_r * np.sin(obj_a)
        bore_cos = np.cos(cam_bore)
        bore_sin = np.sin(cam_bore)
        cos_half = math.cos(half)
        # narrow the block object by object; most failing attempts die early
        alive = np.arange(B)
        for n in range(N):
            dx = obj_x[alive, n, None] - cam_x[alive]
            dy = obj_y[alive, n, None] - cam_y[alive]
            dist = np.hypot(dx, dy)
            along = dx * bore_cos[alive] + dy * bore_sin[alive]
            covered = ((dist <= dov) & (along >= dist * cos_half)).any(axis=1)
            alive = alive[covered]
            if alive.size == 0:
                break
        if alive.size == 0:
            examined += B
            continue
        i = int(alive[0])
        cameras = [
            CameraSpec(
                id=k + 1,
                position=(float(cam_x[i, k]), float(cam_y[i, k])),
                boresight=wrap_angle(float(cam_bore[i, k])),
                angle_of_view=params.angle_of_view,
                distance_of_view=dov,
                best_distance=best,
                bitrate=float(cam_rate[i, k]),
            )
            for k in range(K)
        ]
        objects = [
            TargetObject(
                id=n + 1,
                position=(float(obj_x[i, n]), float(obj_y[i, n])),
                body_orientation=wrap_angle(float(obj_orient[i, n])),
            )
            for n in range(N)
        ]
        return build_scenario(
            cameras,
            objects,
            params.weights,
            cell_radius=radius,
            seed=seed,
            gen_attempts=examined + i + 1,
        )
    raise FeasibilityExhausted(params.max_attempts)

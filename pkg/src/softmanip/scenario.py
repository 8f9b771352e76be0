"""Scenario configuration: schema, validation, JSON round-trip, presets.

A Scenario bundles everything one run needs: sheet and link parameters,
grasper and task point placement, camera pose, rendering and detection
settings, and the learning configuration. Files use JSON; parsing is
strict, unknown keys anywhere are configuration errors.
"""

import json
import math
from dataclasses import dataclass, fields, replace

from .agent import LearningConfig
from .errors import ConfigurationError
from .physics import node_index
from .vision import CameraPose

_DEFAULT_CAMERA = CameraPose(
    position=(0.0, 0.0, 0.10),
    look_at=(0.0, 0.0, 0.0),
    up=(0.0, 1.0, 0.0),
    focal_px=450.0,
    width=320,
    height=240,
)


@dataclass(frozen=True)
class Scenario:
    name: str = "default"
    seed: int = 0

    # sheet lattice
    nx: int = 25
    ny: int = 25
    nz: int = 1
    spacing: float = 0.01              # m between neighbour nodes
    node_mass: float = 0.002           # kg
    structural_stiffness: float = 12.0  # N/m, axis-aligned links
    shear_stiffness: float = 6.0       # N/m, diagonal links
    link_damping: float = 0.45         # N*s/m, axis-aligned links
    shear_damping: float = 0.225       # N*s/m, diagonal links
    node_drag: float = 0.05            # N*s/m ambient drag per free node
    gravity: tuple = (0.0, 0.0, 0.0)   # m/s^2
    dt: float = 0.001                  # s per integrator step
    settle_steps: int = 50             # integrator steps after each action

    # graspers
    coupling_stiffness: float = 300.0  # N/m grasper-to-node pinch spring
    coupling_damping: float = 1.0      # N*s/m on the attached node
    grasper_step: float = 0.002        # m per action
    plane_height: float = 0.02        # m above the sheet plane
    # Tool workspace. The clamp mimics robot joint limits sized to the
    # camera's field of view: exploration that drags a marker far outside
    # the frame earns nothing (detection fails, updates are gated), so an
    # unbounded workspace just dilutes the training budget. Sized so the
    # markers, towed at roughly half the grasper travel, stay in frame.
    workspace_halfwidth_x: float = 0.080  # m, x clamp around the sheet center
    workspace_halfwidth_y: float = 0.045  # m, y clamp around the sheet center

    # task points (node indices for grasped/tracked, pixels for destinations).
    # Graspers flank the tracked markers so that moving a grasper outward
    # tows its marker: a tension-only sheet cannot be pushed. Markers sit
    # four columns apart so each one answers mostly to its own grasper;
    # closer spacing makes the two pixel errors nearly collinear and the
    # bilinear features unlearnable.
    tgp1: int = node_index(25, 8, 12)
    tgp2: int = node_index(25, 16, 12)
    ttp1: int = node_index(25, 10, 12)
    ttp2: int = node_index(25, 14, 12)
    idp1: tuple = (52.0, 108.0)
    idp2: tuple = (268.0, 132.0)

    # rendering and detection
    camera: CameraPose = _DEFAULT_CAMERA
    ttp_marker_radius: float = 0.00135   # m, ~6 px at the default camera
    grasper_avatar_radius: float = 0.0025  # m, can fully cover a marker
    idp_radius_px: float = 3.0
    min_cluster_pixels: int = 5

    # scripted occlusion windows: (first_action, last_action, ttp_id)
    occlusion_windows: tuple = ()

    learning: LearningConfig = LearningConfig()


def validate_scenario(s: Scenario) -> Scenario:
    """Raise ConfigurationError on the first inconsistent field."""
    if not s.name:
        raise ConfigurationError("scenario name must be non-empty")
    if s.nx < 2 or s.ny < 2:
        raise ConfigurationError(f"grid must be at least 2x2, got {s.nx}x{s.ny}")
    if s.nz != 1:
        raise ConfigurationError(f"only single-layer sheets are supported, got nz={s.nz}")
    for attr in ("spacing", "node_mass", "dt", "grasper_step",
                 "workspace_halfwidth_x", "workspace_halfwidth_y",
                 "ttp_marker_radius", "grasper_avatar_radius", "idp_radius_px"):
        if getattr(s, attr) <= 0:
            raise ConfigurationError(f"{attr} must be positive, got {getattr(s, attr)}")
    for attr in ("structural_stiffness", "shear_stiffness", "link_damping",
                 "shear_damping", "node_drag", "coupling_stiffness",
                 "coupling_damping"):
        if getattr(s, attr) < 0:
            raise ConfigurationError(f"{attr} must be non-negative, got {getattr(s, attr)}")
    if s.settle_steps < 1:
        raise ConfigurationError(f"settle_steps must be at least 1, got {s.settle_steps}")
    if s.min_cluster_pixels < 1:
        raise ConfigurationError(f"min_cluster_pixels must be at least 1, got {s.min_cluster_pixels}")
    if len(s.gravity) != 3:
        raise ConfigurationError(f"gravity must have 3 components, got {s.gravity}")
    if s.grasper_avatar_radius <= s.ttp_marker_radius:
        raise ConfigurationError("grasper_avatar_radius must exceed ttp_marker_radius "
                                 "so avatars can occlude markers")

    n = s.nx * s.ny
    points = {"tgp1": s.tgp1, "tgp2": s.tgp2, "ttp1": s.ttp1, "ttp2": s.ttp2}
    for label, idx in points.items():
        if not 0 <= idx < n:
            raise ConfigurationError(f"{label} node {idx} outside 0..{n - 1}")
        ix, iy = idx % s.nx, idx // s.nx
        if ix in (0, s.nx - 1) or iy in (0, s.ny - 1):
            raise ConfigurationError(f"{label} node {idx} lies on the fixed boundary")
    if len(set(points.values())) != 4:
        raise ConfigurationError(f"tgp/ttp nodes must be distinct, got {points}")
    for label in ("tgp1", "tgp2"):
        idx = points[label]
        x = (idx % s.nx - (s.nx - 1) / 2.0) * s.spacing
        y = (idx // s.nx - (s.ny - 1) / 2.0) * s.spacing
        if abs(x) > s.workspace_halfwidth_x or abs(y) > s.workspace_halfwidth_y:
            raise ConfigurationError(
                f"{label} grasped node starts at ({x:.3f}, {y:.3f}) m, "
                f"outside the tool workspace "
                f"+-({s.workspace_halfwidth_x}, {s.workspace_halfwidth_y}) m")

    s.camera.validate()
    for label, idp in (("idp1", s.idp1), ("idp2", s.idp2)):
        if len(idp) != 2:
            raise ConfigurationError(f"{label} must be an (x, y) pixel pair, got {idp}")
        x, y = idp
        if not (0 <= x < s.camera.width and 0 <= y < s.camera.height):
            raise ConfigurationError(f"{label} {idp} outside the {s.camera.width}x{s.camera.height} image")

    lc = s.learning
    if not 0 <= lc.gamma < 1:
        raise ConfigurationError(f"gamma must be in [0, 1), got {lc.gamma}")
    if lc.eps_s <= 0:
        raise ConfigurationError(f"eps_s must be positive, got {lc.eps_s}")
    if lc.stop_threshold <= 0:
        raise ConfigurationError(f"stop_threshold must be positive, got {lc.stop_threshold}")
    if lc.lr_k <= 0:
        raise ConfigurationError(f"lr_k must be positive, got {lc.lr_k}")
    if not 0 < lc.alpha_floor <= lc.alpha_ceiling:
        raise ConfigurationError(
            f"need 0 < alpha_floor <= alpha_ceiling, got {lc.alpha_floor}, {lc.alpha_ceiling}")
    if lc.cycle_period < 1:
        raise ConfigurationError(f"cycle_period must be at least 1, got {lc.cycle_period}")
    if lc.n_episodes < 1 or lc.n_actions < 1:
        raise ConfigurationError(f"need at least 1 episode and action, got {lc.n_episodes}, {lc.n_actions}")
    if not 0 <= lc.eps_min <= 1:
        raise ConfigurationError(f"eps_min must be in [0, 1], got {lc.eps_min}")
    if lc.weight_init_low >= lc.weight_init_high:
        raise ConfigurationError(
            f"weight init range is empty: [{lc.weight_init_low}, {lc.weight_init_high}]")

    for window in s.occlusion_windows:
        if len(window) != 3:
            raise ConfigurationError(f"occlusion window must be (first, last, ttp), got {window}")
        first, last, ttp = window
        if first < 0 or last < first:
            raise ConfigurationError(f"bad occlusion window range {window}")
        if ttp not in (1, 2):
            raise ConfigurationError(f"occlusion window ttp must be 1 or 2, got {ttp}")
    return s


def _check_keys(d: dict, allowed, where: str):
    unknown = sorted(set(d) - set(allowed))
    if unknown:
        raise ConfigurationError(f"unknown {where} keys: {unknown}")


def _from_dict(d: dict) -> Scenario:
    _check_keys(d, [f.name for f in fields(Scenario)], "scenario")
    kwargs = {}
    for f in fields(Scenario):
        if f.name not in d:
            continue
        value = d[f.name]
        if f.name == "camera":
            _check_keys(value, [cf.name for cf in fields(CameraPose)], "camera")
            cam = dict(value)
            for key in ("position", "look_at", "up"):
                if key in cam:
                    cam[key] = tuple(float(v) for v in cam[key])
            if "focal_px" in cam:
                cam["focal_px"] = float(cam["focal_px"])
            for key in ("width", "height"):
                if key in cam:
                    cam[key] = int(cam[key])
            kwargs["camera"] = CameraPose(**cam)
        elif f.name == "learning":
            _check_keys(value, [lf.name for lf in fields(LearningConfig)], "learning")
            coerced = {}
            for lf in fields(LearningConfig):
                if lf.name in value:
                    cast = int if lf.type is int else float
                    coerced[lf.name] = cast(value[lf.name])
            kwargs["learning"] = LearningConfig(**coerced)
        elif f.name in ("gravity", "idp1", "idp2"):
            kwargs[f.name] = tuple(float(v) for v in value)
        elif f.name == "occlusion_windows":
            kwargs[f.name] = tuple((int(a), int(b), int(t)) for a, b, t in value)
        elif f.name == "name":
            kwargs[f.name] = str(value)
        elif f.type is int:
            kwargs[f.name] = int(value)
        else:
            kwargs[f.name] = float(value)
    return Scenario(**kwargs)


def _to_dict(s: Scenario) -> dict:
    cam = s.camera
    return {
        **{f.name: getattr(s, f.name) for f in fields(Scenario)
           if f.name not in ("camera", "learning", "gravity", "idp1", "idp2",
                             "occlusion_windows")},
        "gravity": list(s.gravity),
        "idp1": list(s.idp1),
        "idp2": list(s.idp2),
        "camera": {
            "position": list(cam.position),
            "look_at": list(cam.look_at),
            "up": list(cam.up),
            "focal_px": cam.focal_px,
            "width": cam.width,
            "height": cam.height,
        },
        "occlusion_windows": [list(w) for w in s.occlusion_windows],
        "learning": {f.name: getattr(s.learning, f.name) for f in fields(LearningConfig)},
    }


def parse_scenario(text: str) -> Scenario:
    """Parse a JSON scenario document; empty text means all defaults."""
    if not text.strip():
        return validate_scenario(Scenario())
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"scenario is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigurationError(f"scenario document must be an object, got {type(raw).__name__}")
    return validate_scenario(_from_dict(raw))


def serialize_scenario(s: Scenario) -> str:
    """JSON document that parse_scenario reads back to an equal Scenario."""
    return json.dumps(_to_dict(s), indent=2) + "\n"


def _rotated_up(degrees: float) -> tuple:
    rad = math.radians(degrees)
    return (-math.sin(rad), math.cos(rad), 0.0)


_BASE = Scenario()

_PRESETS = {
    "default": _BASE,
    # near-goal short-reach task, ~22 px per marker
    "c1": replace(_BASE, name="c1"),
    # large deformation: stretch the marker pair apart along up-left and
    # down-right diagonals, ~64 px per marker
    "c2": replace(_BASE, name="c2", idp1=(25.0, 75.0), idp2=(295.0, 165.0)),
    # large deformation on the opposite diagonals with row-offset graspers,
    # ~63 px per marker
    "c3": replace(
        _BASE, name="c3",
        tgp1=node_index(25, 8, 10), tgp2=node_index(25, 16, 14),
        ttp1=node_index(25, 10, 11), ttp2=node_index(25, 14, 13),
        idp1=(20.0, 203.0), idp2=(300.0, 37.0),
    ),
}
# c2's physical task seen by a rolled, shifted, non-nadir camera: the
# destinations are c2's world-space targets projected through that camera,
# so success means the same deformation; agent settings untouched.
_PRESETS["c4"] = replace(
    _PRESETS["c2"], name="c4",
    camera=CameraPose(
        position=(0.008, -0.006, 0.105),
        look_at=(0.002, 0.001, 0.0),
        up=_rotated_up(25.0),
        focal_px=450.0,
        width=320,
        height=240,
    ),
    idp1=(54.86, 30.05), idp2=(250.46, 214.66),
)

PRESET_NAMES = tuple(sorted(_PRESETS))


def preset(name: str) -> Scenario:
    """Built-in scenario by name; see PRESET_NAMES."""
    try:
        return _PRESETS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown preset {name!r}, available: {', '.join(PRESET_NAMES)}") from None


def load_scenario(source) -> Scenario:
    """Scenario from a preset name or a JSON file path."""
    text = str(source)
    if text in _PRESETS:
        return _PRESETS[text]
    try:
        with open(source, "r", encoding="utf-8") as fh:
            return parse_scenario(fh.read())
    except FileNotFoundError:
        raise ConfigurationError(
            f"{source!r} is neither a preset ({', '.join(PRESET_NAMES)}) "
            f"nor a readable scenario file") from None

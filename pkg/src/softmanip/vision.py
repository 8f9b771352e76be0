"""Software camera, frame rasterizer and marker detection.

Frames are plain RGB arrays of shape (height, width, 3), dtype uint8,
row-major with pixel (x, y) = column x of row y. The rasterizer draws,
in order: background, tracked-point markers (green), image destination
points (black), grasper avatars (gray). Detection runs an HSV band mask
over the frame, splits the green pixels between the two tracked points
by nearest previous center, and measures each sufficiently large cluster
with its smallest enclosing circle. A point whose cluster is too small
is reported occluded and keeps its previous coordinates.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .mincircle import smallest_enclosing_circle

BACKGROUND_COLOR = (46, 46, 54)
TTP_COLOR = (0, 200, 0)
IDP_COLOR = (0, 0, 0)
GRASPER_COLOR = (150, 150, 150)


@dataclass(frozen=True)
class CameraPose:
    """Pinhole camera: position, aim point, roll reference and intrinsics."""

    position: tuple
    look_at: tuple
    up: tuple
    focal_px: float = 300.0
    width: int = 320
    height: int = 240

    def validate(self):
        pos = np.asarray(self.position, dtype=np.float64)
        aim = np.asarray(self.look_at, dtype=np.float64)
        up = np.asarray(self.up, dtype=np.float64)
        if pos.shape != (3,) or aim.shape != (3,) or up.shape != (3,):
            raise ConfigurationError("camera position/look_at/up must be 3-vectors")
        if not np.all(np.isfinite(pos)) or not np.all(np.isfinite(aim)) or not np.all(np.isfinite(up)):
            raise ConfigurationError("camera pose contains non-finite values")
        forward = aim - pos
        norm_f = np.linalg.norm(forward)
        if norm_f == 0:
            raise ConfigurationError("camera position and look_at coincide")
        norm_u = np.linalg.norm(up)
        if norm_u == 0:
            raise ConfigurationError("camera up vector is zero")
        if np.linalg.norm(np.cross(forward / norm_f, up / norm_u)) < 1e-9:
            raise ConfigurationError("camera up vector is parallel to the view direction")
        if self.focal_px <= 0:
            raise ConfigurationError(f"focal length must be positive, got {self.focal_px}")
        if self.width <= 0 or self.height <= 0:
            raise ConfigurationError(f"image size must be positive, got {self.width}x{self.height}")

    def basis(self):
        """Orthonormal (right, up, forward) in world coordinates."""
        pos = np.asarray(self.position, dtype=np.float64)
        forward = np.asarray(self.look_at, dtype=np.float64) - pos
        forward /= np.linalg.norm(forward)
        right = np.cross(forward, np.asarray(self.up, dtype=np.float64))
        right /= np.linalg.norm(right)
        true_up = np.cross(right, forward)
        return right, true_up, forward


@dataclass(eq=False)
class Observation:
    """Pixel-space measurement of both tracked tissue points."""

    ttp1: np.ndarray        # (2,) float64 pixel coordinates
    ttp2: np.ndarray
    visible1: bool
    visible2: bool


@dataclass(frozen=True)
class ChannelSpec:
    """HSV acceptance band; hue in degrees, saturation/value in 0..1."""

    hue_min: float
    hue_max: float
    sat_min: float
    val_min: float


GREEN_SPEC = ChannelSpec(hue_min=90.0, hue_max=150.0, sat_min=0.5, val_min=0.2)


def project(camera: CameraPose, point) -> "tuple | None":
    """World point to pixel (x, y); None when at or behind the camera."""
    right, true_up, forward = camera.basis()
    rel = np.asarray(point, dtype=np.float64) - np.asarray(camera.position, dtype=np.float64)
    depth = float(rel @ forward)
    if depth <= 0.0:
        return None
    x = camera.width / 2.0 + camera.focal_px * float(rel @ right) / depth
    y = camera.height / 2.0 - camera.focal_px * float(rel @ true_up) / depth
    return (x, y)


def _projected_radius(camera: CameraPose, point, world_radius: float) -> float:
    _, _, forward = camera.basis()
    rel = np.asarray(point, dtype=np.float64) - np.asarray(camera.position, dtype=np.float64)
    depth = float(rel @ forward)
    if depth <= 0.0:
        return 0.0
    return camera.focal_px * world_radius / depth


def _draw_disk(image, center, radius, color):
    if center is None or radius <= 0.0:
        return
    h, w = image.shape[:2]
    cx, cy = center
    x0 = max(int(np.floor(cx - radius)), 0)
    x1 = min(int(np.ceil(cx + radius)), w - 1)
    y0 = max(int(np.floor(cy - radius)), 0)
    y1 = min(int(np.ceil(cy + radius)), h - 1)
    if x0 > x1 or y0 > y1:
        return
    ys = np.arange(y0, y1 + 1, dtype=np.float64)
    xs = np.arange(x0, x1 + 1, dtype=np.float64)
    dist2 = (xs[None, :] - cx) ** 2 + (ys[:, None] - cy) ** 2
    patch = image[y0:y1 + 1, x0:x1 + 1]
    patch[dist2 <= radius * radius] = color


def render_frame(model, scenario, camera: CameraPose, occlude_ttps=()) -> np.ndarray:
    """Rasterize the current scene to an RGB frame.

    occlude_ttps lists tracked-point ids (1 or 2) to cover with an
    avatar-sized gray disk; the training harness uses it to force
    occlusion at scripted steps.
    """
    image = np.empty((camera.height, camera.width, 3), dtype=np.uint8)
    image[:] = BACKGROUND_COLOR

    for node in (scenario.ttp1, scenario.ttp2):
        p = model.positions[node]
        _draw_disk(image, project(camera, p),
                   _projected_radius(camera, p, scenario.ttp_marker_radius), TTP_COLOR)
    for idp in (scenario.idp1, scenario.idp2):
        _draw_disk(image, (float(idp[0]), float(idp[1])), scenario.idp_radius_px, IDP_COLOR)
    for grasper in model.graspers:
        p = grasper.position
        _draw_disk(image, project(camera, p),
                   _projected_radius(camera, p, scenario.grasper_avatar_radius), GRASPER_COLOR)
    for ttp_id in occlude_ttps:
        node = scenario.ttp1 if ttp_id == 1 else scenario.ttp2
        p = model.positions[node]
        _draw_disk(image, project(camera, p),
                   _projected_radius(camera, p, scenario.grasper_avatar_radius), GRASPER_COLOR)
    return image


def rgb_to_hsv(image: np.ndarray) -> np.ndarray:
    """Vectorized RGB (uint8) to HSV; hue in degrees, s and v in 0..1."""
    rgb = image.astype(np.float32) / 255.0
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    v = np.max(rgb, axis=-1)
    c = v - np.min(rgb, axis=-1)
    s = np.zeros_like(v)
    np.divide(c, v, out=s, where=v > 0)
    safe_c = np.where(c > 0, c, 1.0)
    h = np.zeros_like(v)
    h = np.where(v == r, ((g - b) / safe_c) % 6.0, h)
    h = np.where(v == g, (b - r) / safe_c + 2.0, h)
    h = np.where(v == b, (r - g) / safe_c + 4.0, h)
    h = np.where(c == 0, 0.0, h) * 60.0
    return np.stack([h, s, v], axis=-1)


def color_mask(image: np.ndarray, spec: ChannelSpec) -> np.ndarray:
    """Pixels whose HSV value falls inside spec, as an (n, 2) array of (x, y).

    Runs a cheap integer saturation/value prefilter over the whole frame
    (with one-unit slack so it never rejects a true match), then the exact
    HSV test on the few surviving pixels.
    """
    r, g, b = image[..., 0], image[..., 1], image[..., 2]
    mx = np.maximum(np.maximum(r, g), b)
    mn = np.minimum(np.minimum(r, g), b)
    cand = ((mx.astype(np.float32) >= 255.0 * spec.val_min - 1.0)
            & ((mx - mn).astype(np.float32) >= spec.sat_min * mx - 1.0))
    ys, xs = np.nonzero(cand)
    if xs.size == 0:
        return np.zeros((0, 2), dtype=np.int64)
    hsv = rgb_to_hsv(image[ys, xs])
    keep = ((hsv[..., 0] >= spec.hue_min) & (hsv[..., 0] <= spec.hue_max)
            & (hsv[..., 1] >= spec.sat_min) & (hsv[..., 2] >= spec.val_min))
    return np.stack([xs[keep], ys[keep]], axis=1).astype(np.int64)


def _row_extremes(cluster: np.ndarray) -> np.ndarray:
    """Leftmost and rightmost pixel of every raster row of the cluster.

    A circle is convex, so any circle enclosing a row's two extreme pixels
    encloses the whole row: the reduced set has the same smallest
    enclosing circle at a fraction of the size.
    """
    order = np.lexsort((cluster[:, 0], cluster[:, 1]))
    sorted_pts = cluster[order]
    ys = sorted_pts[:, 1]
    starts = np.flatnonzero(np.r_[True, ys[1:] != ys[:-1]])
    ends = np.r_[starts[1:] - 1, sorted_pts.shape[0] - 1]
    return np.concatenate([sorted_pts[starts], sorted_pts[ends]])


def detect_ttps(image: np.ndarray, scenario, previous: Observation) -> Observation:
    """Measure both tracked points in a frame.

    Green pixels are split by nearest previous center; each cluster with
    at least scenario.min_cluster_pixels pixels is measured as the center
    of its smallest enclosing circle. Too-small clusters mean the point
    is occluded: its flag drops and the previous coordinates carry over.
    """
    pts = color_mask(image, GREEN_SPEC)
    if pts.shape[0] == 0:
        to_first = np.zeros(0, dtype=bool)
    else:
        d1 = np.sum((pts - previous.ttp1) ** 2, axis=1)
        d2 = np.sum((pts - previous.ttp2) ** 2, axis=1)
        to_first = d1 <= d2

    centers = []
    flags = []
    for prev, cluster in ((previous.ttp1, pts[to_first]),
                          (previous.ttp2, pts[~to_first])):
        if cluster.shape[0] >= scenario.min_cluster_pixels:
            (cx, cy), _ = smallest_enclosing_circle(_row_extremes(cluster))
            centers.append(np.array([cx, cy], dtype=np.float64))
            flags.append(True)
        else:
            centers.append(np.asarray(prev, dtype=np.float64).copy())
            flags.append(False)
    return Observation(ttp1=centers[0], ttp2=centers[1],
                       visible1=flags[0], visible2=flags[1])


def write_ppm(image: np.ndarray, path):
    """Write a frame as binary PPM (P6)."""
    h, w = image.shape[:2]
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(image, dtype=np.uint8).tobytes())


def read_ppm(path) -> np.ndarray:
    """Read a binary PPM (P6) frame written by write_ppm."""
    with open(path, "rb") as fh:
        data = fh.read()
    fields = []
    pos = 0
    while len(fields) < 4:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        fields.append(data[start:pos])
    if fields[0] != b"P6":
        raise ConfigurationError(f"{path} is not a binary PPM file")
    w, h, maxval = int(fields[1]), int(fields[2]), int(fields[3])
    if maxval != 255:
        raise ConfigurationError(f"unsupported PPM max value {maxval}")
    pixels = np.frombuffer(data[pos + 1 :], dtype=np.uint8, count=w * h * 3)
    return pixels.reshape(h, w, 3).copy()

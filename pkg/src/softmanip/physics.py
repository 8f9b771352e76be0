"""Mass-spring-damper sheet with kinematic grasper coupling.

The tissue is a rectangular single-layer lattice of point masses in the
x-y plane. Nodes on the four lateral edges are fixed. Interior nodes are
joined by structural links (4-neighbourhood) and shear links (diagonals),
each a tension-only linear spring with axial damping: like a thin
membrane, the sheet goes slack under in-plane compression instead of
storing elastic energy that would later snap free. Free nodes also feel
a small ambient drag, the viscous contact of a phantom resting on a work
surface, which keeps travelling waves from ringing between the fixed
edges. Two kinematic graspers hover on
a fixed horizontal plane above the sheet and drag their attached nodes
through soft spring-damper couplings; graspers themselves feel no
reaction force. The coupling acts in the sheet's x-y directions only,
like a tool pinching the tissue from above: the vertical offset to the
grasper plane is geometry for the camera, not a loaded spring, so a
parked grasper leaves the sheet in exact equilibrium.

Integration is semi-implicit Euler at a fixed timestep: velocities are
advanced from forces first, then positions from the new velocities.
Node layout is row-major, flat index = iy * nx + ix.
"""

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import ConfigurationError, SimulationDiverged

# Per-grasper move codes, also used by the agent's joint actions.
STAY, POS_X, NEG_X, POS_Y, NEG_Y = range(5)

# Move code -> (dx, dy) sign in the robot base frame.
DIRECTIONS = ((0.0, 0.0), (1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0))


def node_index(nx: int, ix: int, iy: int) -> int:
    """Flat node index of grid column ix, row iy."""
    return iy * nx + ix


@dataclass(eq=False)
class Grasper:
    """Kinematic tool tip dragging one lattice node through an x-y spring."""

    gid: int                    # 1 or 2
    attached_node: int
    position: np.ndarray        # (3,), z stays on the grasper plane
    coupling_stiffness: float   # N/m
    coupling_damping: float     # N*s/m
    step_size: float            # m moved per action


@dataclass(eq=False)
class TissueModel:
    nx: int
    ny: int
    spacing: float
    positions: np.ndarray       # (n, 3) float64
    velocities: np.ndarray      # (n, 3) float64
    masses: np.ndarray          # (n,) float64
    free: np.ndarray            # (n,) uint8, 0 = fixed boundary node
    rest_positions: np.ndarray  # (n, 3) build-time node positions
    link_ends: np.ndarray       # (L, 2) int64
    link_rest: np.ndarray       # (L,) float64
    link_stiffness: np.ndarray  # (L,) float64
    link_damping: np.ndarray    # (L,) float64
    graspers: tuple
    node_drag: float            # N*s/m ambient drag on each free node
    gravity: np.ndarray         # (3,) m/s^2
    dt: float                   # s
    workspace_lo: np.ndarray    # (2,) x-y clamp, lower corner
    workspace_hi: np.ndarray    # (2,) x-y clamp, upper corner
    steps_done: int = field(default=0)

    @property
    def n_nodes(self) -> int:
        return self.positions.shape[0]

    @property
    def n_fixed(self) -> int:
        return int(np.sum(self.free == 0))


def grid_layout(nx: int, ny: int, spacing: float):
    """Node positions, fixed-node mask and link arrays for an nx-by-ny sheet.

    Returns (positions, free, link_ends, link_rest). Link rest lengths are
    the exact as-built distances, so the sheet starts strain free.
    """
    if nx < 2 or ny < 2:
        raise ConfigurationError(f"grid must be at least 2x2, got {nx}x{ny}")
    if spacing <= 0:
        raise ConfigurationError(f"node spacing must be positive, got {spacing}")

    ix = np.arange(nx, dtype=np.float64)
    iy = np.arange(ny, dtype=np.float64)
    gx, gy = np.meshgrid(ix, iy)                      # row-major: [iy, ix]
    positions = np.zeros((nx * ny, 3), dtype=np.float64)
    positions[:, 0] = ((gx - (nx - 1) / 2.0) * spacing).ravel()
    positions[:, 1] = ((gy - (ny - 1) / 2.0) * spacing).ravel()

    on_edge = (gx == 0) | (gx == nx - 1) | (gy == 0) | (gy == ny - 1)
    free = (~on_edge).ravel().astype(np.uint8)

    ends = []
    for jy in range(ny):
        for jx in range(nx):
            a = node_index(nx, jx, jy)
            if jx + 1 < nx:
                ends.append((a, node_index(nx, jx + 1, jy)))
            if jy + 1 < ny:
                ends.append((a, node_index(nx, jx, jy + 1)))
            if jx + 1 < nx and jy + 1 < ny:
                ends.append((a, node_index(nx, jx + 1, jy + 1)))
                ends.append((node_index(nx, jx + 1, jy), node_index(nx, jx, jy + 1)))
    link_ends = np.asarray(ends, dtype=np.int64)

    d = positions[link_ends[:, 1]] - positions[link_ends[:, 0]]
    # Same scalar expression the integrator uses, so initial force is exactly 0.
    link_rest = np.sqrt(d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1] + d[:, 2] * d[:, 2])
    return positions, free, link_ends, link_rest


def _is_structural(nx: int, ny: int, link_ends: np.ndarray) -> np.ndarray:
    """Mask of axis-aligned links (the rest are shear diagonals)."""
    ax = link_ends[:, 0] % nx
    ay = link_ends[:, 0] // nx
    bx = link_ends[:, 1] % nx
    by = link_ends[:, 1] // nx
    return (ax == bx) | (ay == by)


def build_lattice(scenario) -> TissueModel:
    """Construct the sheet, its links and both graspers from a scenario."""
    if scenario.nz != 1:
        raise ConfigurationError(f"only single-layer sheets are supported, got nz={scenario.nz}")
    nx, ny = scenario.nx, scenario.ny
    positions, free, link_ends, link_rest = grid_layout(nx, ny, scenario.spacing)
    n = nx * ny

    structural = _is_structural(nx, ny, link_ends)
    link_stiffness = np.where(structural, scenario.structural_stiffness,
                              scenario.shear_stiffness).astype(np.float64)
    link_damping = np.where(structural, scenario.link_damping,
                            scenario.shear_damping).astype(np.float64)

    named = {"tgp1": scenario.tgp1, "tgp2": scenario.tgp2,
             "ttp1": scenario.ttp1, "ttp2": scenario.ttp2}
    for label, idx in named.items():
        if not 0 <= idx < n:
            raise ConfigurationError(f"{label} node {idx} outside 0..{n - 1}")
        if not free[idx]:
            raise ConfigurationError(f"{label} node {idx} lies on the fixed boundary")
    if len(set(named.values())) != 4:
        raise ConfigurationError(f"tgp/ttp nodes must be distinct, got {named}")

    graspers = tuple(
        Grasper(
            gid=gid,
            attached_node=node,
            position=np.array([positions[node, 0], positions[node, 1],
                               scenario.plane_height], dtype=np.float64),
            coupling_stiffness=scenario.coupling_stiffness,
            coupling_damping=scenario.coupling_damping,
            step_size=scenario.grasper_step,
        )
        for gid, node in ((1, scenario.tgp1), (2, scenario.tgp2))
    )

    hwx, hwy = scenario.workspace_halfwidth_x, scenario.workspace_halfwidth_y
    return TissueModel(
        nx=nx, ny=ny, spacing=scenario.spacing,
        positions=positions,
        velocities=np.zeros((n, 3), dtype=np.float64),
        masses=np.full(n, scenario.node_mass, dtype=np.float64),
        free=free,
        rest_positions=positions.copy(),
        link_ends=link_ends,
        link_rest=link_rest,
        link_stiffness=link_stiffness,
        link_damping=link_damping,
        graspers=graspers,
        node_drag=scenario.node_drag,
        gravity=np.asarray(scenario.gravity, dtype=np.float64),
        dt=scenario.dt,
        workspace_lo=np.array([-hwx, -hwy], dtype=np.float64),
        workspace_hi=np.array([hwx, hwy], dtype=np.float64),
    )


@njit(cache=True, error_model="numpy")
def _advance(pos, vel, free, mass, ia, ib, rest, lk, lc,
             g_pos, g_node, g_k, g_c, drag, gravity, dt, n_steps):
    """Run n_steps of semi-implicit Euler in place.

    Returns (node, step) of the first non-finite state, or (-1, -1).
    """
    n = pos.shape[0]
    n_links = ia.shape[0]
    force = np.zeros((n, 3), dtype=np.float64)
    for s in range(n_steps):
        for i in range(n):
            force[i, 0] = 0.0
            force[i, 1] = 0.0
            force[i, 2] = 0.0
        for l in range(n_links):
            a = ia[l]
            b = ib[l]
            dx = pos[b, 0] - pos[a, 0]
            dy = pos[b, 1] - pos[a, 1]
            dz = pos[b, 2] - pos[a, 2]
            dist = np.sqrt(dx * dx + dy * dy + dz * dz)
            # Links carry tension only. A thin sheet wrinkles instead of
            # resisting in-plane compression; bilateral springs would store
            # compressive energy and release it in violent snap-throughs.
            # Slack links also exert no damping, and taut ones have
            # dist > rest > 0, which keeps the 1/dist factor regular.
            if dist > rest[l]:
                dvx = vel[b, 0] - vel[a, 0]
                dvy = vel[b, 1] - vel[a, 1]
                dvz = vel[b, 2] - vel[a, 2]
                fmag = lk[l] * (dist - rest[l]) \
                    + lc[l] * (dvx * dx + dvy * dy + dvz * dz) / dist
                scale = fmag / dist
                fx = scale * dx
                fy = scale * dy
                fz = scale * dz
                force[a, 0] += fx
                force[a, 1] += fy
                force[a, 2] += fz
                force[b, 0] -= fx
                force[b, 1] -= fy
                force[b, 2] -= fz
        for g in range(g_node.shape[0]):
            # In-plane pinch coupling: the grasper drags its node in x and
            # y only. The vertical offset to the grasper plane carries no
            # force, so parked graspers leave the sheet at rest.
            node = g_node[g]
            force[node, 0] += g_k[g] * (g_pos[g, 0] - pos[node, 0]) - g_c[g] * vel[node, 0]
            force[node, 1] += g_k[g] * (g_pos[g, 1] - pos[node, 1]) - g_c[g] * vel[node, 1]
        for i in range(n):
            if free[i]:
                # Ambient drag: the sheet rests in a dissipative medium, so
                # travelling waves die out instead of bouncing off the
                # fixed boundary.
                inv_m = 1.0 / mass[i]
                vel[i, 0] += dt * ((force[i, 0] - drag * vel[i, 0]) * inv_m + gravity[0])
                vel[i, 1] += dt * ((force[i, 1] - drag * vel[i, 1]) * inv_m + gravity[1])
                vel[i, 2] += dt * ((force[i, 2] - drag * vel[i, 2]) * inv_m + gravity[2])
                pos[i, 0] += dt * vel[i, 0]
                pos[i, 1] += dt * vel[i, 1]
                pos[i, 2] += dt * vel[i, 2]
        for i in range(n):
            ok = (np.isfinite(pos[i, 0]) and np.isfinite(pos[i, 1])
                  and np.isfinite(pos[i, 2]) and np.isfinite(vel[i, 0])
                  and np.isfinite(vel[i, 1]) and np.isfinite(vel[i, 2]))
            if not ok:
                return i, s
    return -1, -1


def _grasper_arrays(model: TissueModel):
    g_pos = np.stack([g.position for g in model.graspers])
    g_node = np.array([g.attached_node for g in model.graspers], dtype=np.int64)
    g_k = np.array([g.coupling_stiffness for g in model.graspers], dtype=np.float64)
    g_c = np.array([g.coupling_damping for g in model.graspers], dtype=np.float64)
    return g_pos, g_node, g_k, g_c


def settle(model: TissueModel, n_steps: int) -> TissueModel:
    """Advance the sheet n_steps timesteps in place."""
    if n_steps <= 0:
        return model
    g_pos, g_node, g_k, g_c = _grasper_arrays(model)
    bad_node, bad_step = _advance(
        model.positions, model.velocities, model.free, model.masses,
        model.link_ends[:, 0], model.link_ends[:, 1],
        model.link_rest, model.link_stiffness, model.link_damping,
        g_pos, g_node, g_k, g_c, model.node_drag, model.gravity,
        model.dt, n_steps,
    )
    if bad_node >= 0:
        raise SimulationDiverged(int(bad_node), model.steps_done + int(bad_step))
    model.steps_done += n_steps
    return model


def step(model: TissueModel) -> TissueModel:
    """Advance the sheet one timestep in place."""
    return settle(model, 1)


def move_grasper(model: TissueModel, gid: int, direction: int) -> TissueModel:
    """Translate one grasper a single step along a robot-frame axis.

    direction is one of STAY/POS_X/NEG_X/POS_Y/NEG_Y. The position is
    clamped to the workspace box; z never leaves the grasper plane.
    """
    if direction not in (STAY, POS_X, NEG_X, POS_Y, NEG_Y):
        raise ConfigurationError(f"unknown move direction {direction}")
    grasper = model.graspers[gid - 1]
    dx, dy = DIRECTIONS[direction]
    x = grasper.position[0] + dx * grasper.step_size
    y = grasper.position[1] + dy * grasper.step_size
    grasper.position[0] = min(max(x, model.workspace_lo[0]), model.workspace_hi[0])
    grasper.position[1] = min(max(y, model.workspace_lo[1]), model.workspace_hi[1])
    return model


def kinetic_energy(model: TissueModel) -> float:
    """Total kinetic energy of the lattice in joules."""
    v2 = np.einsum("ij,ij->i", model.velocities, model.velocities)
    return float(0.5 * np.dot(model.masses, v2))

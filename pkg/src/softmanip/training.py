"""Episodic training and greedy evaluation loops.

Each action: read the schedules, pick an epsilon-greedy joint action,
move both graspers one step, let the sheet settle, render and detect the
new observation, then apply one TD update. Updates are gated on vision:
if either tracked point was occluded in either endpoint observation of
the transition, the weights are left untouched for that step while the
action and schedule counters still advance. Episodes restart from the
same initial sheet; the exploration schedule keeps counting across them.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .agent import (LearningConfig, JointAction, TargetSet, N_FEATURES,
                    best_action, epsilon_schedule, euclidean_error,
                    learning_rate_schedule, reward, select_action, td_update)
from .errors import ConfigurationError, SimulationDiverged, TrainingDiverged
from .physics import build_lattice, move_grasper, settle
from .scenario import Scenario, validate_scenario
from .vision import Observation, detect_ttps, project, render_frame

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class TransitionRecord:
    episode: int
    action_index: int
    state: Observation
    action: JointAction
    reward: float             # reward of the pre-action state
    epsilon: float
    alpha: float
    updated: bool
    weights_after: np.ndarray


@dataclass(eq=False)
class EpisodeLog:
    episode: int
    records: list
    mean_reward: float


def targets_from(scenario: Scenario) -> TargetSet:
    return TargetSet(idp1=np.asarray(scenario.idp1, dtype=np.float64),
                     idp2=np.asarray(scenario.idp2, dtype=np.float64))


def _forced_occlusions(scenario: Scenario, action_index: int) -> tuple:
    """TTP ids whose markers are scripted to be covered at this action."""
    return tuple(ttp for first, last, ttp in scenario.occlusion_windows
                 if first <= action_index <= last)


def reset_environment(scenario: Scenario):
    """Fresh sheet, graspers parked over their nodes, tracker initialized.

    The detection tracker is seeded with the ground-truth projections of
    both tracked nodes; the returned observation comes from an actual
    rendered frame and must see both markers.
    """
    model = build_lattice(scenario)
    camera = scenario.camera
    seeds = []
    for node in (scenario.ttp1, scenario.ttp2):
        pix = project(camera, model.positions[node])
        if pix is None:
            raise ConfigurationError(f"tracked node {node} projects behind the camera")
        seeds.append(np.asarray(pix, dtype=np.float64))
    seed_obs = Observation(ttp1=seeds[0], ttp2=seeds[1], visible1=True, visible2=True)
    frame = render_frame(model, scenario, camera)
    obs = detect_ttps(frame, scenario, previous=seed_obs)
    if not (obs.visible1 and obs.visible2):
        raise ConfigurationError(
            "initial frame does not show both tracked markers; check camera and marker settings")
    return model, obs


def train(scenario: Scenario, record_hook=None):
    """Run the full training schedule; returns (weights, episode logs).

    record_hook, when given, is called with each TransitionRecord as soon
    as it exists, so callers can stream logs to disk and keep partial
    output if training aborts.
    """
    validate_scenario(scenario)
    lc = scenario.learning
    rng = np.random.default_rng(scenario.seed)
    weights = rng.uniform(lc.weight_init_low, lc.weight_init_high, N_FEATURES)
    targets = targets_from(scenario)

    episode_logs = []
    step = 0
    for episode in range(lc.n_episodes):
        model, obs = reset_environment(scenario)
        records = []
        for n_action in range(lc.n_actions):
            eps = epsilon_schedule(lc, episode, n_action)
            alpha = learning_rate_schedule(lc, step)
            action = select_action(weights, obs, targets, eps, rng, lc)
            move_grasper(model, 1, action.g1)
            move_grasper(model, 2, action.g2)
            try:
                settle(model, scenario.settle_steps)
            except SimulationDiverged as exc:
                raise TrainingDiverged(str(exc), episode, n_action) from exc
            frame = render_frame(model, scenario, scenario.camera,
                                 occlude_ttps=_forced_occlusions(scenario, n_action))
            next_obs = detect_ttps(frame, scenario, previous=obs)

            vision_ok = (obs.visible1 and obs.visible2
                         and next_obs.visible1 and next_obs.visible2)
            if vision_ok:
                try:
                    weights = td_update(weights, obs, action, next_obs,
                                        targets, alpha, lc)
                except TrainingDiverged as exc:
                    raise TrainingDiverged(str(exc), episode, n_action) from exc

            record = TransitionRecord(
                episode=episode, action_index=n_action, state=obs,
                action=action, reward=reward(obs, targets, lc.eps_s),
                epsilon=eps, alpha=alpha, updated=vision_ok,
                weights_after=weights.copy(),
            )
            records.append(record)
            if record_hook is not None:
                record_hook(record)
            obs = next_obs
            step += 1
        mean_reward = float(np.mean([r.reward for r in records]))
        episode_logs.append(EpisodeLog(episode=episode, records=records,
                                       mean_reward=mean_reward))
        logger.info("episode %d/%d: mean reward %.4f", episode + 1,
                    lc.n_episodes, mean_reward)
    return weights, episode_logs


def evaluate(weights: np.ndarray, scenario: Scenario, max_actions: int = None,
             frame_hook=None):
    """Greedy rollout of a fixed policy; no exploration, no updates.

    Returns [(actions_taken, pixel_error), ...] starting at zero actions.
    Stops early once the all-stay action is chosen twice in a row while
    the reward clears the stop threshold. frame_hook, when given, is
    called with (actions_taken, frame) for the initial frame and after
    every action.
    """
    validate_scenario(scenario)
    lc = scenario.learning
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (N_FEATURES,):
        raise ConfigurationError(f"policy must have {N_FEATURES} weights, got {weights.shape}")
    if max_actions is None:
        max_actions = lc.n_actions
    targets = targets_from(scenario)
    model, obs = reset_environment(scenario)
    if frame_hook is not None:
        frame_hook(0, render_frame(model, scenario, scenario.camera))

    curve = [(0, euclidean_error(obs, targets))]
    stay_streak = 0
    for n in range(1, max_actions + 1):
        action = best_action(weights, obs, targets, lc)[0]
        if (action.index == 0
                and reward(obs, targets, lc.eps_s) > lc.stop_threshold):
            stay_streak += 1
        else:
            stay_streak = 0
        move_grasper(model, 1, action.g1)
        move_grasper(model, 2, action.g2)
        settle(model, scenario.settle_steps)
        frame = render_frame(model, scenario, scenario.camera,
                             occlude_ttps=_forced_occlusions(scenario, n - 1))
        obs = detect_ttps(frame, scenario, previous=obs)
        curve.append((n, euclidean_error(obs, targets)))
        if frame_hook is not None:
            frame_hook(n, frame)
        if stay_streak >= 2:
            logger.info("stopping after %d actions: holding position at the goal", n)
            break
    return curve

"""File-producing run wrappers: training, testing, rendering, full suite.

CSV schemas (all plain comma-separated, one header line, '\n' endings,
floats written in shortest round-trip form):

  training.csv  episode,action,epsilon,alpha,reward,updated
                one row per training action; updated is 1 when the TD
                update ran, 0 when occlusion gated it off
  episodes.csv  episode,mean_reward
  testing.csv   action,error_px
                greedy rollout error curve, starting at action 0
  summary.csv   scenario,seeds,successes,success_rate,mean_final_error_px

Policy files hold one decimal weight per line, 17 lines. Frames are
binary PPM named frame_{episode}_{action}.ppm. Reruns with an identical
scenario produce byte-identical files.
"""

import logging
import time
from dataclasses import dataclass, replace
from pathlib import Path

from .agent import load_weights, save_weights
from .errors import TrainingDiverged
from .scenario import Scenario, preset, validate_scenario
from .training import evaluate, reset_environment, train
from .vision import render_frame, write_ppm

logger = logging.getLogger(__name__)

SUITE_SCENARIOS = ("c1", "c2", "c3", "c4")


@dataclass
class RunArtifacts:
    out_dir: Path
    training_csv: Path = None
    episodes_csv: Path = None
    testing_csv: Path = None
    policy_file: Path = None
    frames_dir: Path = None


@dataclass
class SuiteResult:
    scenario: str
    seed: int
    success: bool
    final_error_px: float     # nan when the run aborted
    episode_mean_rewards: list
    wall_seconds: float
    error: str = None         # abort reason, None for completed runs


def _fmt(x) -> str:
    return repr(float(x))


def run_train(scenario: Scenario, out_dir) -> RunArtifacts:
    """Train one scenario and write training.csv, episodes.csv, policy.txt.

    If training aborts, the rows produced so far are already on disk and
    the abort propagates.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    arts = RunArtifacts(out_dir=out,
                        training_csv=out / "training.csv",
                        episodes_csv=out / "episodes.csv",
                        policy_file=out / "policy.txt")
    with open(arts.training_csv, "w", encoding="ascii", newline="") as fh:
        fh.write("episode,action,epsilon,alpha,reward,updated\n")

        def row(rec):
            fh.write(f"{rec.episode},{rec.action_index},{_fmt(rec.epsilon)},"
                     f"{_fmt(rec.alpha)},{_fmt(rec.reward)},{int(rec.updated)}\n")

        weights, logs = train(scenario, record_hook=row)

    with open(arts.episodes_csv, "w", encoding="ascii", newline="") as fh:
        fh.write("episode,mean_reward\n")
        for log in logs:
            fh.write(f"{log.episode},{_fmt(log.mean_reward)}\n")
    save_weights(weights, arts.policy_file)
    logger.info("trained %s seed %d -> %s", scenario.name, scenario.seed, out)
    return arts


def run_test(scenario: Scenario, policy_file, out_dir,
             dump_frames: bool = False) -> RunArtifacts:
    """Greedy rollout of a stored policy; writes testing.csv and frames."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    arts = RunArtifacts(out_dir=out, testing_csv=out / "testing.csv",
                        policy_file=Path(policy_file))
    weights = load_weights(policy_file)

    frame_hook = None
    if dump_frames:
        arts.frames_dir = out / "frames"
        arts.frames_dir.mkdir(exist_ok=True)

        def frame_hook(actions_taken, frame):
            write_ppm(frame, arts.frames_dir / f"frame_0_{actions_taken}.ppm")

    curve = evaluate(weights, scenario, frame_hook=frame_hook)
    with open(arts.testing_csv, "w", encoding="ascii", newline="") as fh:
        fh.write("action,error_px\n")
        for actions_taken, error_px in curve:
            fh.write(f"{actions_taken},{_fmt(error_px)}\n")
    logger.info("tested %s seed %d: final error %.2f px after %d actions",
                scenario.name, scenario.seed, curve[-1][1], curve[-1][0])
    return arts


def run_render(scenario: Scenario, out_dir) -> Path:
    """Render the initial scene of a scenario to frame_0_0.ppm."""
    validate_scenario(scenario)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    model, _ = reset_environment(scenario)
    path = out / "frame_0_0.ppm"
    write_ppm(render_frame(model, scenario, scenario.camera), path)
    return path


def _read_csv_column(path, column: str):
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip().split(",")
        idx = header.index(column)
        return [float(line.strip().split(",")[idx]) for line in fh if line.strip()]


def run_suite(out_dir, seeds: int = 10, scenario_names=SUITE_SCENARIOS):
    """Train and test every preset across seeds; returns SuiteResults.

    A run counts as a success when the greedy test ends with pixel error
    at or below 1 / stop_threshold (12.5 px at the default 0.08). Aborted
    runs count as failures and the suite continues. summary.csv gets one
    row per scenario; mean_final_error_px averages completed runs.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results = []
    for name in scenario_names:
        for seed in range(seeds):
            scen = replace(preset(name), seed=seed)
            sub = out / name / f"seed{seed}"
            started = time.perf_counter()
            try:
                arts = run_train(scen, sub)
                run_test(scen, arts.policy_file, sub)
                final_error = _read_csv_column(arts.out_dir / "testing.csv", "error_px")[-1]
                means = _read_csv_column(arts.episodes_csv, "mean_reward")
                success = final_error <= 1.0 / scen.learning.stop_threshold
                results.append(SuiteResult(
                    scenario=name, seed=seed, success=success,
                    final_error_px=final_error, episode_mean_rewards=means,
                    wall_seconds=time.perf_counter() - started))
            except TrainingDiverged as exc:
                logger.warning("%s seed %d aborted: %s", name, seed, exc)
                results.append(SuiteResult(
                    scenario=name, seed=seed, success=False,
                    final_error_px=float("nan"), episode_mean_rewards=[],
                    wall_seconds=time.perf_counter() - started, error=str(exc)))

    with open(out / "summary.csv", "w", encoding="ascii", newline="") as fh:
        fh.write("scenario,seeds,successes,success_rate,mean_final_error_px\n")
        for name in scenario_names:
            rows = [r for r in results if r.scenario == name]
            succ = sum(r.success for r in rows)
            finals = [r.final_error_px for r in rows if r.error is None]
            mean_final = sum(finals) / len(finals) if finals else float("nan")
            fh.write(f"{name},{len(rows)},{succ},{_fmt(succ / len(rows))},"
                     f"{_fmt(mean_final)}\n")
            logger.info("suite %s: %d/%d successes", name, succ, len(rows))
    return results

"""File-writing layer and command line: artifacts, partial flushes, exit codes."""

from dataclasses import replace

import numpy as np
import pytest

import softmanip.harness as harness
from softmanip.agent import save_weights
from softmanip.cli import main
from softmanip.errors import TrainingDiverged
from softmanip.harness import run_render, run_suite, run_test, run_train
from softmanip.scenario import preset, serialize_scenario
from softmanip.vision import read_ppm


def shortened(scenario, n_episodes, n_actions, **fields):
    learning = replace(scenario.learning, n_episodes=n_episodes, n_actions=n_actions)
    return replace(scenario, learning=learning, **fields)


def csv_lines(path):
    return path.read_text(encoding="ascii").splitlines()


SMALL = shortened(preset("c1"), n_episodes=2, n_actions=30, seed=5)


class TestRunTrain:
    def test_artifacts_and_schemas(self, tmp_path):
        arts = run_train(SMALL, tmp_path / "run")

        training = csv_lines(arts.training_csv)
        assert training[0] == "episode,action,epsilon,alpha,reward,updated"
        assert len(training) == 1 + 2 * 30
        for line in training[1:]:
            episode, action, epsilon, alpha, reward, updated = line.split(",")
            assert int(episode) in (0, 1)
            assert 0 <= int(action) < 30
            assert np.isfinite(float(epsilon)) and np.isfinite(float(alpha))
            assert np.isfinite(float(reward))
            assert updated in ("0", "1")

        episodes = csv_lines(arts.episodes_csv)
        assert episodes[0] == "episode,mean_reward"
        assert len(episodes) == 1 + 2
        assert [line.split(",")[0] for line in episodes[1:]] == ["0", "1"]

        policy = arts.policy_file.read_text(encoding="ascii").splitlines()
        assert len(policy) == 17
        assert all(np.isfinite(float(line)) for line in policy)

    def test_reruns_are_byte_identical(self, tmp_path):
        a = run_train(SMALL, tmp_path / "a")
        b = run_train(SMALL, tmp_path / "b")
        assert a.training_csv.read_bytes() == b.training_csv.read_bytes()
        assert a.episodes_csv.read_bytes() == b.episodes_csv.read_bytes()
        assert a.policy_file.read_bytes() == b.policy_file.read_bytes()

    def test_abort_keeps_rows_written_so_far(self, tmp_path):
        unstable = replace(preset("c1"), dt=0.05)
        with pytest.raises(TrainingDiverged, match="non-finite"):
            run_train(unstable, tmp_path / "run")
        training = csv_lines(tmp_path / "run" / "training.csv")
        assert training[0] == "episode,action,epsilon,alpha,reward,updated"
        assert len(training) == 2
        assert not (tmp_path / "run" / "episodes.csv").exists()
        assert not (tmp_path / "run" / "policy.txt").exists()


class TestRunTest:
    def test_zero_policy_rollout_schema(self, tmp_path):
        policy = tmp_path / "policy.txt"
        save_weights(np.zeros(17), policy)
        scenario = shortened(preset("c1"), n_episodes=1, n_actions=40)
        arts = run_test(scenario, policy, tmp_path / "out")

        lines = csv_lines(arts.testing_csv)
        assert lines[0] == "action,error_px"
        assert len(lines) == 1 + 41
        actions = [int(line.split(",")[0]) for line in lines[1:]]
        errors = [float(line.split(",")[1]) for line in lines[1:]]
        assert actions == list(range(41))
        assert all(err == errors[0] for err in errors)
        assert arts.frames_dir is None

    def test_frame_dump_writes_one_image_per_state(self, tmp_path):
        policy = tmp_path / "policy.txt"
        save_weights(np.zeros(17), policy)
        scenario = shortened(preset("c1"), n_episodes=1, n_actions=40)
        arts = run_test(scenario, policy, tmp_path / "out", dump_frames=True)

        names = sorted(p.name for p in arts.frames_dir.iterdir())
        assert names == sorted(f"frame_0_{n}.ppm" for n in range(41))
        first = arts.frames_dir / "frame_0_0.ppm"
        assert first.read_bytes().startswith(b"P6\n")
        assert read_ppm(first).shape == (240, 320, 3)


class TestRunRender:
    def test_initial_scene_image(self, tmp_path):
        path = run_render(preset("c3"), tmp_path)
        assert path.name == "frame_0_0.ppm"
        frame = read_ppm(path)
        assert frame.shape == (240, 320, 3)
        assert (frame == (0, 200, 0)).all(axis=2).sum() > 0


class TestRunSuite:
    def test_summary_covers_each_scenario(self, tmp_path, monkeypatch):
        monkeypatch.setattr(harness, "preset",
                            lambda name: shortened(preset(name), 2, 30))
        results = run_suite(tmp_path, seeds=2, scenario_names=("c1", "c3"))

        assert [(r.scenario, r.seed) for r in results] == [
            ("c1", 0), ("c1", 1), ("c3", 0), ("c3", 1)]
        for r in results:
            assert r.error is None
            assert np.isfinite(r.final_error_px)
            assert len(r.episode_mean_rewards) == 2
            assert r.wall_seconds > 0
            assert r.success == (r.final_error_px <= 12.5)

        lines = csv_lines(tmp_path / "summary.csv")
        assert lines[0] == "scenario,seeds,successes,success_rate,mean_final_error_px"
        assert len(lines) == 3
        for line, name in zip(lines[1:], ("c1", "c3")):
            scenario, seeds, successes, rate, mean_err = line.split(",")
            assert scenario == name
            assert seeds == "2"
            assert 0 <= int(successes) <= 2
            assert float(rate) == int(successes) / 2
            assert np.isfinite(float(mean_err))
        assert (tmp_path / "c1" / "seed1" / "testing.csv").exists()

    def test_aborted_runs_do_not_stop_the_suite(self, tmp_path, monkeypatch):
        monkeypatch.setattr(harness, "preset",
                            lambda name: replace(preset(name), dt=0.05))
        results = run_suite(tmp_path, seeds=1, scenario_names=("c1",))

        assert len(results) == 1
        assert not results[0].success
        assert "non-finite" in results[0].error
        assert np.isnan(results[0].final_error_px)
        assert results[0].episode_mean_rewards == []
        summary = csv_lines(tmp_path / "summary.csv")[1].split(",")
        assert summary[2] == "0"
        assert np.isnan(float(summary[4]))


class TestCli:
    def scenario_file(self, tmp_path, scenario):
        path = tmp_path / f"{scenario.name}.json"
        path.write_text(serialize_scenario(scenario))
        return str(path)

    def test_train_then_test_round_trip(self, tmp_path):
        doc = self.scenario_file(tmp_path, replace(SMALL, name="cli-small"))
        train_dir = tmp_path / "train"
        assert main(["train", "--scenario", doc, "--out", str(train_dir)]) == 0
        assert (train_dir / "policy.txt").exists()

        test_dir = tmp_path / "test"
        assert main(["test", "--scenario", doc,
                     "--policy", str(train_dir / "policy.txt"),
                     "--out", str(test_dir), "--dump-frames"]) == 0
        assert (test_dir / "testing.csv").exists()
        assert any(test_dir.joinpath("frames").iterdir())

    def test_render_accepts_preset_names(self, tmp_path):
        assert main(["render", "--scenario", "c4", "--out", str(tmp_path)]) == 0
        assert (tmp_path / "frame_0_0.ppm").exists()

    def test_suite_runs_end_to_end(self, tmp_path, monkeypatch):
        monkeypatch.setattr(harness, "preset",
                            lambda name: shortened(preset(name), 1, 10))
        assert main(["suite", "--out", str(tmp_path / "suite"), "--seeds", "1"]) == 0
        assert (tmp_path / "suite" / "summary.csv").exists()

    def test_configuration_problems_exit_2(self, tmp_path):
        assert main(["train", "--scenario", str(tmp_path / "missing.json"),
                     "--out", str(tmp_path / "out")]) == 2
        assert main(["suite", "--out", str(tmp_path / "s"), "--seeds", "0"]) == 2
        (tmp_path / "cli-bad.json").write_text('{"nx": 1}')
        assert main(["train", "--scenario", str(tmp_path / "cli-bad.json"),
                     "--out", str(tmp_path / "out2")]) == 2
        policy = tmp_path / "short.txt"
        policy.write_text("1.0\n")
        doc = self.scenario_file(tmp_path, SMALL)
        assert main(["test", "--scenario", doc, "--policy", str(policy),
                     "--out", str(tmp_path / "out3")]) == 2

    def test_diverging_runs_exit_3(self, tmp_path):
        doc = self.scenario_file(
            tmp_path, replace(SMALL, name="unstable", dt=0.05))
        assert main(["train", "--scenario", doc,
                     "--out", str(tmp_path / "out")]) == 3

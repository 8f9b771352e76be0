"""Walk through the learner's moving parts with printable numbers.

No simulation here. This script evaluates the reward curve, both
schedules, the 17-entry feature vector, and one temporal-difference
update on hand-picked inputs, so you can see exactly what the agent
computes before trusting it with the sheet.
"""

import numpy as np

from softmanip import (ALL_ACTIONS, JointAction, LearningConfig, TargetSet,
                       Observation, best_action, epsilon_schedule, features,
                       learning_rate_schedule, q_value, reward, td_update)

CFG = LearningConfig()
TARGETS = TargetSet(idp1=np.array([100.0, 100.0]), idp2=np.array([200.0, 150.0]))


def obs_with_error(e):
    e = np.asarray(e, dtype=np.float64)
    return Observation(ttp1=TARGETS.idp1 - e[:2], ttp2=TARGETS.idp2 - e[2:],
                       visible1=True, visible2=True)


def main():
    print("reward as the markers close in on their destinations:")
    for err in (100.0, 50.0, 25.0, 12.5, 5.0, 0.0):
        r = reward(obs_with_error([err, 0, 0, 0]), TARGETS, CFG.eps_s)
        marker = "  <- success threshold" if err == 12.5 else ""
        print(f"  error {err:6.1f} px -> reward {r:12.6g}{marker}")

    print("\nexploration schedule (fraction of random actions per episode):")
    row = ", ".join(f"ep{ep}: {epsilon_schedule(CFG, ep, 0):.2f}"
                    for ep in range(CFG.n_episodes))
    print(f"  {row}")

    print("\nstep-size schedule inside one 200-action episode:")
    for step in (0, 10, 25, 50, 100, 199):
        print(f"  action {step:3d} -> alpha {learning_rate_schedule(CFG, step):.3e}")
    print(f"  action 200 -> alpha {learning_rate_schedule(CFG, 200):.3e} "
          "(new episode, cycle restarts)")

    print("\nfeature vector for error (10, -5, 0, 0) when grasper 1 moves +x:")
    f = features(obs_with_error([10.0, -5.0, 0.0, 0.0]), TARGETS, JointAction(5), CFG)
    nonzero = {int(i): float(f[i]) for i in np.flatnonzero(f)}
    print(f"  nonzero entries: {nonzero}")
    print("  (each moving axis copies the four error components into its column)")

    w = np.zeros(17)
    obs, nxt = obs_with_error([1.0, 0, 0, 0]), obs_with_error([1.0, 0, 0, 0])
    updated = td_update(w, obs, JointAction(5), nxt, TARGETS, 0.1, CFG)
    print("\none TD step from zero weights, alpha 0.1, static 1 px error:")
    print(f"  weight 0 becomes {float(updated[0])!r} (alpha times the next reward)")

    rng = np.random.default_rng(7)
    w = rng.normal(scale=0.01, size=17)
    obs = obs_with_error(rng.normal(scale=40.0, size=4))
    choice, value = best_action(w, obs, TARGETS, CFG)
    scores = [q_value(w, features(obs, TARGETS, a, CFG)) for a in ALL_ACTIONS]
    moves = {0: "stay", 1: "+x", 2: "-x", 3: "+y", 4: "-y"}
    print("\ngreedy choice on a random weight vector:")
    print(f"  best_action picked index {choice.index} "
          f"(grasper 1 {moves[choice.g1]}, grasper 2 {moves[choice.g2]}) "
          f"with value {value:.5f}")
    print(f"  explicit 25-way enumeration agrees: "
          f"{int(np.argmax(scores)) == choice.index}")


if __name__ == "__main__":
    main()

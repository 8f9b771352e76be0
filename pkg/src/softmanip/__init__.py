"""Learned indirect manipulation of a simulated deformable sheet.

A mass-spring sheet is deformed by two kinematic graspers while a
software camera watches two marked tissue points. A linear Q-learning
agent reads pixel errors between the tracked points and their
destination pixels and learns, without any camera or tissue calibration,
which grasper moves shrink that error.
"""

from .agent import (ALL_ACTIONS, ALL_STAY, N_ACTIONS, N_FEATURES, JointAction,
                    LearningConfig, TargetSet, best_action, epsilon_schedule,
                    error_vector, euclidean_error, features,
                    learning_rate_schedule, load_weights, q_value, reward,
                    save_weights, select_action, td_update)
from .errors import (ConfigurationError, NoDetection, PolicyFileError,
                     SimulationDiverged, TrainingDiverged)
from .harness import (RunArtifacts, SuiteResult, SUITE_SCENARIOS, run_render,
                      run_suite, run_test, run_train)
from .mincircle import smallest_enclosing_circle
from .physics import (DIRECTIONS, NEG_X, NEG_Y, POS_X, POS_Y, STAY, Grasper,
                      TissueModel, build_lattice, grid_layout, kinetic_energy,
                      move_grasper, node_index, settle, step)
from .scenario import (PRESET_NAMES, Scenario, load_scenario, parse_scenario,
                       preset, serialize_scenario, validate_scenario)
from .training import (EpisodeLog, TransitionRecord, evaluate,
                       reset_environment, targets_from, train)
from .vision import (CameraPose, ChannelSpec, GREEN_SPEC, Observation,
                     color_mask, detect_ttps, project, read_ppm, render_frame,
                     rgb_to_hsv, write_ppm)

__version__ = "0.1.0"

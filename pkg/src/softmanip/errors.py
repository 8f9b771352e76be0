"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A scenario or camera value is out of range, inconsistent, or unknown."""


class SimulationDiverged(RuntimeError):
    """The integrator produced a non-finite position or velocity."""

    def __init__(self, node_index: int, step_index: int):
        self.node_index = node_index
        self.step_index = step_index
        super().__init__(
            f"non-finite state at node {node_index} after step {step_index}"
        )


class TrainingDiverged(RuntimeError):
    """A TD update produced a non-finite error signal or weight vector."""

    def __init__(self, message: str, episode: int = -1, action: int = -1):
        self.episode = episode
        self.action = action
        if episode >= 0:
            message = f"{message} (episode {episode}, action {action})"
        super().__init__(message)


class NoDetection(ValueError):
    """A geometric query was made on an empty point set."""


class PolicyFileError(ValueError):
    """A policy file does not contain exactly one finite weight per line."""

"""Experiment run session model."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum

from app.models.config import ExperimentConfig  # noqa: TC001
from app.models.metrics import MetricsReport  # noqa: TC001


class RunState(str, Enum):
    """Stage of an experiment run."""

    PENDING = "pending"
    LOADING = "loading"
    TRAINING = "training"
    REPORTING = "reporting"
    COMPLETED = "completed"
    FAILED = "failed"


# A run walks these stages in order; FAILED may interrupt any non-terminal stage.
STAGE_ORDER: tuple[RunState, ...] = (
    RunState.PENDING,
    RunState.LOADING,
    RunState.TRAINING,
    RunState.REPORTING,
    RunState.COMPLETED,
)
TERMINAL_STATES = frozenset({RunState.COMPLETED, RunState.FAILED})


def allowed_next(state: RunState) -> frozenset[RunState]:
    """Return the states reachable from ``state`` in one step."""
    if state in TERMINAL_STATES:
        return frozenset()
    following = STAGE_ORDER[STAGE_ORDER.index(state) + 1]
    return frozenset({following, RunState.FAILED})


@dataclass
class RunSession:
    """Tracks the stages of one experiment run.

    Timing uses a monotonic clock and only ever reaches the logs, so result
    files stay byte-identical across repeated runs.
    """

    config: ExperimentConfig
    state: RunState = RunState.PENDING
    started_at: float = field(default_factory=time.monotonic)
    completed_at: float | None = None
    report: MetricsReport | None = None
    error: str | None = None
    failed_stage: RunState | None = None
    stage_seconds: dict[str, float] = field(default_factory=dict)
    _stage_started: float | None = field(default=None, repr=False)

    def transition_to(self, new_state: RunState) -> None:
        """Move to ``new_state``, closing the timer of the current stage.

        Raises:
            ValueError: If ``new_state`` does not directly follow the current stage.
        """
        reachable = allowed_next(self.state)
        if new_state not in reachable:
            names = sorted(s.value for s in reachable)
            raise ValueError(
                f"Invalid transition: {self.state.value} -> {new_state.value}. "
                f"Allowed: {names}"
            )
        self._close_stage()
        if new_state is RunState.FAILED:
            self.failed_stage = self.state
        self.state = new_state
        if new_state in TERMINAL_STATES:
            self.completed_at = time.monotonic()
        else:
            self._stage_started = time.monotonic()

    def advance(self) -> RunState:
        """Move to the next stage of the pipeline and return it."""
        if self.state in TERMINAL_STATES:
            raise ValueError(f"Run already {self.state.value}")
        following = STAGE_ORDER[STAGE_ORDER.index(self.state) + 1]
        self.transition_to(following)
        return following

    def fail(self, error: str) -> None:
        """Record ``error`` and mark the run failed unless it already finished."""
        self.error = error
        if not self.is_terminal:
            self.transition_to(RunState.FAILED)

    def _close_stage(self) -> None:
        if self._stage_started is None:
            return
        elapsed = time.monotonic() - self._stage_started
        self.stage_seconds[self.state.value] = elapsed
        self._stage_started = None

    @property
    def is_terminal(self) -> bool:
        """Whether the run has completed or failed."""
        return self.state in TERMINAL_STATES

    @property
    def duration_seconds(self) -> float | None:
        """Wall time from creation to the terminal state, if reached."""
        if self.completed_at is None:
            return None
        return self.completed_at - self.started_at

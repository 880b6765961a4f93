import logging
import os
from typing import ClassVar, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from scoreforge.exceptions import ConfigurationError

logger = logging.getLogger(__name__)

JOBS_ENV_VAR = "SCOREFORGE_JOBS"

EpsMode = Literal["floor_ceil", "round"]


class CheckConfig(BaseModel):
    """
    Knobs shared by every consistency test: witness collection, search budgets and parallelism.
    """

    witness_cap: Optional[int] = Field(default=16, ge=1, description="Maximum number of witnesses collected; None collects all")
    node_budget: int = Field(default=1_000_000, ge=1, description="Search state and branch-and-bound node limit per linear system")
    config_budget: Optional[int] = Field(default=10_000_000, ge=1, description="Maximum fold-configuration bundles examined; None is unbounded")
    blowup_threshold: int = Field(default=10_000_000, ge=1, description="Estimated bundle count above which a blow-up warning is emitted")
    jobs: int = Field(default=1, ge=1, description="Worker processes for configuration and problem fan-out")
    eps_mode: EpsMode = Field(default="floor_ceil", description="Uncertainty of a k-digit value: 10^-k (floor_ceil) or 10^-k/2 (round)")
    count_all_configurations: bool = Field(default=False, description="Keep testing configurations after the first feasible one")

    model_config: ClassVar[ConfigDict] = ConfigDict(validate_assignment=True, extra="forbid")

    @classmethod
    def from_env(cls, **overrides: object) -> "CheckConfig":
        """
        Build a configuration whose ``jobs`` default comes from the SCOREFORGE_JOBS environment variable.

        Explicit keyword overrides take precedence over the environment.

        Raises:
            ConfigurationError: If SCOREFORGE_JOBS is set but is not a positive integer.
        """
        values: dict[str, object] = {}
        raw = os.getenv(JOBS_ENV_VAR)
        if raw is not None and raw.strip():
            try:
                jobs = int(raw)
            except ValueError:
                jobs = 0
            if jobs < 1:
                raise ConfigurationError(
                    message=f"{JOBS_ENV_VAR} must be a positive integer, got {raw!r}",
                    error_code="CFG_JOBS",
                    details={"variable": JOBS_ENV_VAR, "value": raw},
                    suggestion=f"Set {JOBS_ENV_VAR} to a number such as 4, or pass --jobs",
                )
            logger.debug(f"Using {jobs} jobs from {JOBS_ENV_VAR}")
            values["jobs"] = jobs
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls.model_validate(values)

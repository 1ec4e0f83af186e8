"""Solver configuration."""

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import asdict, dataclass, fields
from dataclasses import replace as dataclass_replace
from pathlib import Path

from bundle_solve.errors import ConfigError

INNER_STEPS = ("newton", "gradient")


@dataclass(frozen=True)
class SolveConfig:
    """Line search settings, optionally loaded from the ``[solver]`` table of a TOML file.

    Attributes:
        mu_prime_factor: Initial barrier scale, multiplied by the stage utility norm
        m_factor: DP shift scale, multiplied by ||u||_inf / (1 - gamma)
        eta: Barrier decrease rate per outer step, in (0, 1)
        inner_step: Inner logit update, "newton" (Gauss-Newton on the coefficient matrix) or
            "gradient" (plain projected-gradient step)
        step_size: Step length of the projected-gradient inner update
        newton_damping: Damping of the Gauss-Newton inner update
        inner_tol_bias: Inner exit tolerance on ||pi - pi_hat||_inf (relative for r - r_hat)
        inner_tol_angle: Inner exit tolerance on the angle between dV and 1, radians
        outer_tol_eps: Target infinity norm of the canonical section
        max_inner: Inner step cap per outer iteration
        max_outer: Outer step cap
        singular_rcond: Reciprocal condition number below which C is treated as singular
        seed: Seed for random starting points
        m_decay: Factor applied to the DP shift after every outer step, in (0, 1]
        inner_patience: Inner steps after which an outer step counts as stalled and is
            retried with a smaller eta or a fiber escape; at least max_inner disables it
    """

    mu_prime_factor: float = 1e3
    m_factor: float = 1.0
    eta: float = 0.1
    inner_step: str = "newton"
    step_size: float = 0.2
    newton_damping: float = 0.5
    inner_tol_bias: float = 1e-8
    inner_tol_angle: float = 1e-6
    outer_tol_eps: float = 1e-4
    max_inner: int = 50_000
    max_outer: int = 5_000
    singular_rcond: float = 1e-10
    seed: int = 0
    m_decay: float = 1.0
    inner_patience: int = 500

    def __post_init__(self):
        self.validate()

    @classmethod
    def load(cls, config_path: Path | None = None) -> "SolveConfig":
        """Load config from a TOML file, use defaults if missing.

        Args:
            config_path: Path to a TOML file with a ``[solver]`` table. If None or absent,
                the defaults are returned.

        Returns:
            Validated SolveConfig

        Raises:
            ConfigError: On unknown keys, bad values or unparsable TOML
        """
        if config_path is None or not Path(config_path).exists():
            return cls()

        try:
            with open(config_path, "rb") as f:
                loaded = tomllib.load(f)
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"{config_path}: {e}") from e

        section = loaded.get("solver", {})
        if not isinstance(section, dict):
            raise ConfigError(f"{config_path}: [solver] must be a table")
        return cls().replace(**section)

    def replace(self, **overrides) -> "SolveConfig":
        """Return a validated copy with ``overrides`` applied; None values are ignored.

        Raises:
            ConfigError: If a key is not a config field or a value is out of range
        """
        known = {f.name for f in fields(self)}
        unknown = sorted(set(overrides) - known)
        if unknown:
            raise ConfigError(f"unknown solver setting: {', '.join(unknown)}")
        changes = {k: v for k, v in overrides.items() if v is not None}
        return dataclass_replace(self, **changes)

    def validate(self) -> None:
        """Check every bound, naming the first offending field.

        Raises:
            ConfigError: On an out-of-range or mistyped value
        """
        for f in fields(self):
            value = getattr(self, f.name)
            if f.type is str or f.type == "str":
                if not isinstance(value, str):
                    raise ConfigError(f"{f.name} must be a string, got {value!r}")
            elif f.type is int or f.type == "int":
                if isinstance(value, bool) or not isinstance(value, int):
                    raise ConfigError(f"{f.name} must be an integer, got {value!r}")
            elif isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"{f.name} must be a number, got {value!r}")

        if self.inner_step not in INNER_STEPS:
            raise ConfigError(
                f"inner_step must be one of {', '.join(INNER_STEPS)}, got {self.inner_step!r}"
            )
        positive = ("mu_prime_factor", "step_size", "newton_damping", "inner_tol_bias",
                    "inner_tol_angle", "outer_tol_eps", "singular_rcond")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0, got {getattr(self, name)}")
        if not self.m_factor >= 0:
            raise ConfigError(f"m_factor must be >= 0, got {self.m_factor}")
        if not 0.0 < self.eta < 1.0:
            raise ConfigError(f"eta must lie in (0, 1), got {self.eta}")
        if not 0.0 < self.m_decay <= 1.0:
            raise ConfigError(f"m_decay must lie in (0, 1], got {self.m_decay}")
        for name in ("max_inner", "max_outer", "inner_patience"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")

    def to_dict(self) -> dict:
        return asdict(self)

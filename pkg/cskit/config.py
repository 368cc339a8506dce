"""cskit configuration.

Settings are merged from built-in defaults, the user config file, the
project's cskit.toml and the CSKIT_SEED environment variable. CLI flags
are applied on top by the caller via Config.with_overrides().
"""

import os
import tomllib
from dataclasses import dataclass, field, replace
from pathlib import Path

from platformdirs import user_config_dir

from cskit.errors import ConfigError

CONFIG_DIR = Path(user_config_dir("cskit"))
USER_CONFIG_FILE = CONFIG_DIR / "config.toml"
PROJECT_FILE = "cskit.toml"
SEED_ENV = "CSKIT_SEED"

OUTPUT_FORMATS = ("json", "text", "csv")

TOLERANCES: dict[str, float] = {
    "jacobi": 1e-12,
    "nullspace": 1e-10,
    "centralizer": 1e-10,
    "complex_structure": 1e-10,
    "ad_invariance": 1e-12,
    "unit": 1e-12,
    "norm": 1e-12,
    "membership": 1e-8,
    "homomorphism": 1e-10,
    "cover": 1e-12,
    "parallelism": 1e-6,
    "geodesic": 1e-4,
    "eigenvalue": 1e-10,
}


@dataclass(frozen=True)
class Config:
    """Effective settings for a run."""

    seed: int = 0
    trials: int = 200
    output_format: str = "json"
    trace_form_scale: float = 1.0
    tolerances: dict[str, float] = field(default_factory=lambda: dict(TOLERANCES))

    def __post_init__(self) -> None:
        for name, value in self.tolerances.items():
            if not value > 0:
                raise ConfigError(f"tolerance {name!r} must be positive, got {value}")
        if self.output_format not in OUTPUT_FORMATS:
            raise ConfigError(f"unknown output format {self.output_format!r}")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if not self.trace_form_scale > 0:
            raise ConfigError("trace_form_scale must be positive")

    def tol(self, name: str) -> float:
        """Get a named tolerance."""
        try:
            return self.tolerances[name]
        except KeyError:
            raise ConfigError(f"unknown tolerance {name!r}") from None

    def with_overrides(
        self,
        seed: int | None = None,
        trials: int | None = None,
        output_format: str | None = None,
        tolerances: dict[str, float] | None = None,
    ) -> "Config":
        """Return a copy with CLI-level overrides applied."""
        merged = dict(self.tolerances)
        for name, value in (tolerances or {}).items():
            if name not in merged:
                raise ConfigError(f"unknown tolerance {name!r}")
            merged[name] = value
        return replace(
            self,
            seed=self.seed if seed is None else seed,
            trials=self.trials if trials is None else trials,
            output_format=output_format or self.output_format,
            tolerances=merged,
        )


def find_project_root(start: Path | None = None) -> Path | None:
    """Search up the directory tree for cskit.toml."""
    current = start or Path.cwd()
    for parent in [current, *current.parents]:
        if (parent / PROJECT_FILE).exists():
            return parent
    return None


def load_toml(path: Path) -> dict:
    """Load a TOML file, returning {} if it does not exist."""
    if not path.exists():
        return {}
    try:
        with open(path, "rb") as f:
            return tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"{path}: {e}") from e


def _apply(settings: dict, data: dict) -> None:
    check = data.get("check", {})
    if "seed" in check:
        settings["seed"] = int(check["seed"])
    if "trials" in check:
        settings["trials"] = int(check["trials"])
    output = data.get("output", {})
    if "format" in output:
        settings["output_format"] = str(output["format"])
    isomaps = data.get("isomaps", {})
    if "trace_form_scale" in isomaps:
        settings["trace_form_scale"] = float(isomaps["trace_form_scale"])
    for name, value in data.get("tolerances", {}).items():
        if name not in TOLERANCES:
            raise ConfigError(f"unknown tolerance {name!r}")
        settings["tolerances"][name] = float(value)


def load_config(start: Path | None = None) -> Config:
    """Build the effective Config.

    Args:
        start: Directory to begin the cskit.toml search from (default: cwd)

    Returns:
        Config with defaults < user file < project file < CSKIT_SEED applied
    """
    settings: dict = {"tolerances": dict(TOLERANCES)}
    _apply(settings, load_toml(USER_CONFIG_FILE))
    root = find_project_root(start)
    if root:
        _apply(settings, load_toml(root / PROJECT_FILE))
    env_seed = os.environ.get(SEED_ENV)
    if env_seed:
        try:
            settings["seed"] = int(env_seed)
        except ValueError:
            raise ConfigError(f"{SEED_ENV} must be an integer, got {env_seed!r}") from None
    return Config(**settings)


def parse_tolerance(spec: str) -> tuple[str, float]:
    """Parse a NAME=VALUE tolerance override."""
    name, sep, value = spec.partition("=")
    if not sep or not name.strip():
        raise ConfigError(f"expected NAME=VALUE, got {spec!r}")
    try:
        return name.strip(), float(value)
    except ValueError:
        raise ConfigError(f"tolerance {name.strip()!r} is not a number: {value!r}") from None

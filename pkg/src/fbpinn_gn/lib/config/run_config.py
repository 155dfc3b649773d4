"""Run configuration loaded from YAML files.

A run file has the sections ``problem``, ``model``, ``constraint``,
``init``, ``optimizer``, ``collocation``, ``stopping``, ``test_grid`` and
``output``. Every key has a default taken from the one-dimensional
Gauss–Newton setup, so ``problem: {name: ode1d_hf}`` alone is a valid file.

Example:
    problem:
      name: helmholtz2d
    model:
      kind: fbpinn
      layer_sizes: [2, 20, 1]
      subdomains: [2, 2]
      overlap: [0.5, 0.5]
    optimizer:
      method: gn
      eta: 1.0e-2
      mu: 1.0
      solver: block_cg
"""

import copy
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any

import yaml

from fbpinn_gn.models.mlp import InitKind
from fbpinn_gn.optim.solvers import SolverKind
from fbpinn_gn.problems.collocation import SamplingScheme
from fbpinn_gn.problems.registry import PROBLEM_NAMES, PROBLEMS

MODEL_KINDS = ("fbpinn", "vanilla")
OPTIMIZER_METHODS = ("adam", "gn")

DEFAULT_TEST_COUNTS = {1: [2001], 2: [101, 101]}


class ConfigError(ValueError):
    """Raised when a run configuration is invalid.

    This includes:
    - Unknown sections or keys
    - Unknown problem, model, optimizer, solver or sampling names
    - Non-positive counts, rates or iteration limits
    - Overlaps outside ``0 < delta < 1``
    - Layer sizes that do not match the problem dimension or end in a width other than 1
    - Unreadable or malformed YAML files
    """

    pass


@dataclass(frozen=True)
class ProblemSection:
    name: str = "ode1d_hf"


@dataclass(frozen=True)
class ModelSection:
    kind: str = "fbpinn"
    layer_sizes: list[int] = field(default_factory=lambda: [1, 20, 1])
    activation: str = "tanh"
    subdomains: int | list[int] = 24
    overlap: float | list[float] = 0.5


@dataclass(frozen=True)
class ConstraintSection:
    kappa: float | None = None


@dataclass(frozen=True)
class InitSection:
    scheme: str = InitKind.UNIFORM_WEIGHTS_ZERO_BIAS.value
    seed: int = 0


@dataclass(frozen=True)
class OptimizerSection:
    method: str = "gn"
    lr: float = 1e-3
    eta: float = 1e-2
    mu: float = 1.0
    solver: str = SolverKind.DENSE_CHOLESKY.value
    cg_tol: float = 1e-10
    cg_max_iter: int | None = None


@dataclass(frozen=True)
class CollocationSection:
    counts: int | list[int] = 1000
    sampling: str = SamplingScheme.UNIFORM_GRID.value


@dataclass(frozen=True)
class StoppingSection:
    max_iters: int = 5000
    loss_tol: float = 1e-6


@dataclass(frozen=True)
class TestGridSection:
    counts: int | list[int] | None = None


@dataclass(frozen=True)
class OutputSection:
    directory: str | None = None
    log_every: int = 100


FLOAT_KEYS = {
    "model": ("overlap",),
    "constraint": ("kappa",),
    "optimizer": ("lr", "eta", "mu", "cg_tol"),
    "stopping": ("loss_tol",),
}


def _coerce_floats(section: str, values: dict[str, Any]) -> dict[str, Any]:
    # YAML 1.1 reads ``1e-2`` (no dot) as a string
    out = dict(values)
    for key in FLOAT_KEYS.get(section, ()):
        value = out.get(key)
        if value is None:
            continue
        try:
            if isinstance(value, (list, tuple)):
                out[key] = [float(v) for v in value]
            else:
                out[key] = float(value)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"{section}.{key} must be a number, got {value!r}") from e
    return out


_SECTIONS: dict[str, type] = {
    "problem": ProblemSection,
    "model": ModelSection,
    "constraint": ConstraintSection,
    "init": InitSection,
    "optimizer": OptimizerSection,
    "collocation": CollocationSection,
    "stopping": StoppingSection,
    "test_grid": TestGridSection,
    "output": OutputSection,
}


@dataclass(frozen=True)
class RunConfig:
    """
    Complete description of one training run.

    Attributes:
        problem: Which boundary-value problem
        model: Architecture and decomposition (``kind: fbpinn | vanilla``)
        constraint: Constraint parameters (``kappa`` for the 1D ODE)
        init: Initialization scheme and master seed
        optimizer: ``adam`` (``lr``) or ``gn`` (``eta``, ``mu``, ``solver``)
        collocation: Training points
        stopping: Iteration limit and loss tolerance
        test_grid: Evaluation grid for the relative error
        output: Run directory and logging cadence
    """

    problem: ProblemSection = field(default_factory=ProblemSection)
    model: ModelSection = field(default_factory=ModelSection)
    constraint: ConstraintSection = field(default_factory=ConstraintSection)
    init: InitSection = field(default_factory=InitSection)
    optimizer: OptimizerSection = field(default_factory=OptimizerSection)
    collocation: CollocationSection = field(default_factory=CollocationSection)
    stopping: StoppingSection = field(default_factory=StoppingSection)
    test_grid: TestGridSection = field(default_factory=TestGridSection)
    output: OutputSection = field(default_factory=OutputSection)

    @classmethod
    def from_dict(cls, data: dict[str, Any] | None) -> "RunConfig":
        """
        Build and validate a config from nested dictionaries.

        Raises:
            ConfigError: Unknown keys or invalid values
        """
        data = data or {}
        if not isinstance(data, dict):
            raise ConfigError(f"Run config must be a mapping, got {type(data).__name__}")

        sections = {}
        for name, value in data.items():
            if name not in _SECTIONS:
                raise ConfigError(f"Unknown config section {name!r}; expected one of {sorted(_SECTIONS)}")
            section_cls = _SECTIONS[name]
            value = value or {}
            if not isinstance(value, dict):
                raise ConfigError(f"Section {name!r} must be a mapping")
            known = {f.name for f in fields(section_cls)}
            for key in value:
                if key not in known:
                    raise ConfigError(f"Unknown key {name}.{key}; expected one of {sorted(known)}")
            sections[name] = section_cls(**_coerce_floats(name, value))

        config = cls(**sections)
        config.validate()
        return config

    @classmethod
    def from_yaml(cls, path: Path | str) -> "RunConfig":
        """
        Load a config file.

        Raises:
            ConfigError: File missing, not valid YAML, or invalid contents
        """
        path = Path(path)
        try:
            with open(path, encoding="utf-8") as f:
                data = yaml.safe_load(f)
        except OSError as e:
            raise ConfigError(f"Cannot read config file {path}: {e}") from e
        except yaml.YAMLError as e:
            raise ConfigError(f"Invalid YAML in {path}: {e}") from e
        return cls.from_dict(data)

    @classmethod
    def preset(cls, name: str) -> "RunConfig":
        """
        Named configuration from the published experiments.

        Raises:
            ConfigError: Unknown preset name
        """
        if name not in PRESETS:
            raise ConfigError(f"Unknown preset {name!r}; expected one of {sorted(PRESETS)}")
        return cls.from_dict(copy.deepcopy(PRESETS[name]))

    def to_dict(self) -> dict[str, Any]:
        """Convert to nested dictionaries (YAML-serializable)."""
        return {name: asdict(getattr(self, name)) for name in _SECTIONS}

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)

    def with_overrides(self, **overrides: Any) -> "RunConfig":
        """
        Copy with dotted-key overrides, e.g. ``with_overrides(**{"init.seed": 3})``.

        Raises:
            ConfigError: Unknown key or invalid resulting config
        """
        data = self.to_dict()
        for dotted, value in overrides.items():
            section, _, key = dotted.partition(".")
            if section not in data or key not in data[section]:
                raise ConfigError(f"Unknown override key {dotted!r}")
            data[section][key] = value
        return RunConfig.from_dict(data)

    def with_seed(self, seed: int) -> "RunConfig":
        return replace(self, init=replace(self.init, seed=seed))

    @property
    def dim(self) -> int:
        return PROBLEMS[self.problem.name].dim

    def per_axis(self, value: Any, key: str) -> list:
        """Expand a scalar to one value per axis; lists must have ``dim`` entries."""
        values = list(value) if isinstance(value, (list, tuple)) else [value] * self.dim
        if len(values) != self.dim:
            raise ConfigError(f"{key} needs {self.dim} entries for {self.problem.name}, got {values}")
        return values

    @property
    def test_counts(self) -> list[int]:
        if self.test_grid.counts is None:
            return list(DEFAULT_TEST_COUNTS[self.dim])
        return [int(c) for c in self.per_axis(self.test_grid.counts, "test_grid.counts")]

    def validate(self) -> None:
        """
        Validate cross-field consistency.

        Raises:
            ConfigError: Invalid configuration, naming the offending key
        """
        if self.problem.name not in PROBLEM_NAMES:
            raise ConfigError(f"problem.name must be one of {PROBLEM_NAMES}, got {self.problem.name!r}")
        dim = self.dim

        model = self.model
        if model.kind not in MODEL_KINDS:
            raise ConfigError(f"model.kind must be one of {MODEL_KINDS}, got {model.kind!r}")
        if model.activation != "tanh":
            raise ConfigError(f"model.activation must be 'tanh', got {model.activation!r}")
        sizes = list(model.layer_sizes)
        if len(sizes) < 2 or any(not isinstance(d, int) or d < 1 for d in sizes):
            raise ConfigError(f"model.layer_sizes must be at least two positive integers, got {sizes}")
        if sizes[0] != dim:
            raise ConfigError(f"model.layer_sizes must start with the problem dimension {dim}, got {sizes}")
        if sizes[-1] != 1:
            raise ConfigError(f"model.layer_sizes must end with output size 1, got {sizes}")
        if model.kind == "fbpinn":
            for k in self.per_axis(model.subdomains, "model.subdomains"):
                if not isinstance(k, int) or k < 1:
                    raise ConfigError(f"model.subdomains must be positive integers, got {model.subdomains}")
            for delta in self.per_axis(model.overlap, "model.overlap"):
                if not 0.0 < float(delta) < 1.0:
                    raise ConfigError(f"model.overlap must satisfy 0 < delta < 1, got {model.overlap}")

        if self.constraint.kappa is not None and self.constraint.kappa <= 0:
            raise ConfigError(f"constraint.kappa must be positive, got {self.constraint.kappa}")

        if self.init.scheme not in [k.value for k in InitKind]:
            raise ConfigError(f"init.scheme must be one of {[k.value for k in InitKind]}, got {self.init.scheme!r}")
        if not isinstance(self.init.seed, int) or self.init.seed < 0:
            raise ConfigError(f"init.seed must be a non-negative integer, got {self.init.seed}")

        opt = self.optimizer
        if opt.method not in OPTIMIZER_METHODS:
            raise ConfigError(f"optimizer.method must be one of {OPTIMIZER_METHODS}, got {opt.method!r}")
        for key in ("lr", "eta", "mu", "cg_tol"):
            if float(getattr(opt, key)) <= 0:
                raise ConfigError(f"optimizer.{key} must be positive, got {getattr(opt, key)}")
        if opt.solver not in [k.value for k in SolverKind]:
            raise ConfigError(f"optimizer.solver must be one of {[k.value for k in SolverKind]}, got {opt.solver!r}")
        if opt.cg_max_iter is not None and opt.cg_max_iter < 1:
            raise ConfigError(f"optimizer.cg_max_iter must be positive, got {opt.cg_max_iter}")

        if self.collocation.sampling not in [s.value for s in SamplingScheme]:
            raise ConfigError(f"collocation.sampling must be one of {[s.value for s in SamplingScheme]}")
        colloc_counts = self.per_axis(self.collocation.counts, "collocation.counts")
        minimum = 2 if self.collocation.sampling == SamplingScheme.UNIFORM_GRID.value else 1
        if any(not isinstance(c, int) or c < minimum for c in colloc_counts):
            raise ConfigError(f"collocation.counts must be integers >= {minimum}, got {self.collocation.counts}")
        if any(c < 2 for c in self.test_counts):
            raise ConfigError(f"test_grid.counts must be at least 2 per axis, got {self.test_grid.counts}")

        if not isinstance(self.stopping.max_iters, int) or self.stopping.max_iters < 0:
            raise ConfigError(f"stopping.max_iters must be a non-negative integer, got {self.stopping.max_iters}")
        if self.stopping.loss_tol < 0:
            raise ConfigError(f"stopping.loss_tol must be non-negative, got {self.stopping.loss_tol}")
        if self.output.log_every < 0:
            raise ConfigError(f"output.log_every must be non-negative, got {self.output.log_every}")


PRESETS: dict[str, dict[str, Any]] = {
    "table1_gn": {
        "problem": {"name": "ode1d_hf"},
        "model": {"kind": "fbpinn", "layer_sizes": [1, 20, 1], "subdomains": 24, "overlap": 0.5},
        "init": {"scheme": "uniform_weights_zero_bias", "seed": 0},
        "optimizer": {"method": "gn", "eta": 1e-2, "mu": 1.0, "solver": "dense_cholesky"},
        "collocation": {"counts": 1000, "sampling": "uniform_grid"},
        "stopping": {"max_iters": 5000, "loss_tol": 1e-6},
    },
    "table1_adam": {
        "problem": {"name": "ode1d_hf"},
        "model": {"kind": "fbpinn", "layer_sizes": [1, 20, 1], "subdomains": 24, "overlap": 0.5},
        "init": {"scheme": "uniform_weights_zero_bias", "seed": 0},
        "optimizer": {"method": "adam", "lr": 1e-2},
        "collocation": {"counts": 1000, "sampling": "uniform_grid"},
        "stopping": {"max_iters": 2000, "loss_tol": 1e-6},
    },
    "baseline_pinn": {
        "problem": {"name": "ode1d_hf"},
        "model": {"kind": "vanilla", "layer_sizes": [1, 20, 20, 20, 1]},
        "init": {"scheme": "glorot_uniform", "seed": 0},
        "optimizer": {"method": "adam", "lr": 1e-3},
        "collocation": {"counts": 256, "sampling": "uniform_grid"},
        "stopping": {"max_iters": 50000, "loss_tol": 1e-6},
        "output": {"log_every": 1000},
    },
    "table2_gn": {
        "problem": {"name": "helmholtz2d"},
        "model": {"kind": "fbpinn", "layer_sizes": [2, 20, 1], "subdomains": [2, 2], "overlap": [0.5, 0.5]},
        "init": {"scheme": "uniform_weights_zero_bias", "seed": 0},
        "optimizer": {"method": "gn", "eta": 1e-2, "mu": 1.0, "solver": "dense_cholesky"},
        "collocation": {"counts": [100, 100], "sampling": "uniform_grid"},
        "stopping": {"max_iters": 1000, "loss_tol": 1e-5},
    },
    "table2_adam": {
        "problem": {"name": "helmholtz2d"},
        "model": {"kind": "fbpinn", "layer_sizes": [2, 20, 1], "subdomains": [2, 2], "overlap": [0.5, 0.5]},
        "init": {"scheme": "uniform_weights_zero_bias", "seed": 0},
        "optimizer": {"method": "adam", "lr": 1e-3},
        "collocation": {"counts": [100, 100], "sampling": "uniform_grid"},
        "stopping": {"max_iters": 30000, "loss_tol": 1e-5},
        "output": {"log_every": 1000},
    },
}

PRESET_NAMES = tuple(PRESETS)

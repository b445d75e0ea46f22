"""Experiment configuration: a single JSON document per run.

The schema is flat key/value with nested arrays for the matrix, the
automorphism triple, and element lists. Every field has a default except the
experiment name and the matrix, so small configs stay small; unknown keys are
rejected with the nearest known key named, which catches typos before any
computation starts. Round-tripping is exact: parse(serialize(c)) == c.
"""

from __future__ import annotations

import dataclasses
import difflib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ValidationError
from .words import DEFAULT_ELEMENT_BUDGET

EXPERIMENT_NAMES = (
    "abelian-control",
    "ball-census",
    "birkhoff",
    "box-lemmas",
    "centralizer",
    "lyapunov",
    "qi-compare",
    "set-dynamics",
    "word-length",
)


@dataclass
class ExperimentConfig:
    experiment: str
    matrix: list
    notes: str = ""
    seed: int = 0
    output_dir: str = "runs"

    # group / automorphism / iteration
    automorphism: dict | None = None  # {"b": rows, "v": vec, "e": +-1}
    neighborhood_n: int = 1
    a0: list = field(default_factory=list)  # [[x..., ], k] pairs; empty -> identity
    ell0: int | None = None
    h0: int | None = None
    k_max: int = 6

    # ball enumeration
    bfs_radius: int = 8
    budget_elements: int = DEFAULT_ELEMENT_BUDGET

    # box lemma checks
    box_ell_values: list = field(default_factory=lambda: [2, 3, 4, 5, 6])
    box_h_values: list = field(default_factory=lambda: [2, 3, 4, 5, 6])
    box_n_values: list = field(default_factory=lambda: [1, 2, 3])
    box_samples: int = 1000

    # word-length queries
    elements: list = field(default_factory=list)

    # quasi-isometry comparison
    qi_radii: list = field(default_factory=lambda: [10, 12])

    # centralizer scan
    centralizer_bound: int = 8
    centralizer_e: int = 1

    # lyapunov / birkhoff
    map_kind: str = "linear_toral"  # linear_toral | suspension_time_one | shear_conjugated
    direction: str = "unstable"  # unstable | stable | flow
    shear_coefficients: list = field(default_factory=list)
    orbit_steps: int = 1000
    orbit_starts: int = 1
    birkhoff_starts: int = 100
    birkhoff_steps: int = 10000
    dump_orbit: bool = False

    # lattice control
    control_a0: list | None = None

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ValidationError("config must be a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        for key in data:
            if key not in known:
                hint = difflib.get_close_matches(key, known, n=1)
                extra = f" (did you mean {hint[0]!r}?)" if hint else ""
                raise ValidationError(f"unknown config key {key!r}{extra}")
        for required in ("experiment", "matrix"):
            if required not in data:
                raise ValidationError(f"config is missing required key {required!r}")
        cfg = cls(**data)
        cfg.check_experiment_name()
        return cfg

    def check_experiment_name(self):
        if self.experiment not in EXPERIMENT_NAMES:
            hint = difflib.get_close_matches(self.experiment, EXPERIMENT_NAMES, n=1)
            extra = f"; nearest match is {hint[0]!r}" if hint else ""
            raise ValidationError(
                f"unknown experiment {self.experiment!r}{extra}"
            )

    def serialize(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def load_config(path) -> ExperimentConfig:
    p = Path(path)
    try:
        data = json.loads(p.read_text())
    except FileNotFoundError:
        raise ValidationError(f"config file {p} does not exist") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config file {p} is not valid JSON: {exc}") from None
    return ExperimentConfig.from_dict(data)


def parse_config(text: str) -> ExperimentConfig:
    return ExperimentConfig.from_dict(json.loads(text))

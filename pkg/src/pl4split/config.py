"""Run configuration: tolerances, refinement parameters, seeds.

One Config object travels through the whole pipeline so that a fixed
input file plus a fixed Config gives byte-identical reports.
"""

import dataclasses
import json
import os


@dataclasses.dataclass
class Config:
    # matrix-level tolerances (unit-scale matrices)
    tol_orthogonal: float = 1e-9
    # cone angle comparison against 2*pi, absolute
    tol_angle: float = 1e-7
    # surface vertex defect threshold for "singular"
    tol_defect: float = 1e-6
    # eigenvalue separation, relative to the Frobenius norm
    eigen_separation: float = 1e-6
    # leaf tracing snap tolerance, relative to the local edge scale
    tol_snap: float = 1e-7
    # leaf tracing budget: this many states per simplex before giving up
    trace_budget_multiplier: int = 64
    # refined-graph geodesics on surfaces
    surface_subdivision: int = 4
    surface_unfold_depth: int = 8
    tol_surface_distance: float = 1e-3
    # refined-graph geodesics in the 4-complex
    ambient_subdivision: int = 3
    ambient_unfold_depth: int = 2
    tol_distance: float = 3e-2
    # volume conservation, relative
    tol_volume: float = 1e-6
    seed: int = 0

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def load_config(path=None, overrides=None):
    """Resolve a Config: explicit path, else $PL4_CONFIG, else defaults.

    overrides maps field names to values and wins over the file.
    """
    if path is None:
        path = os.environ.get("PL4_CONFIG")
    cfg = Config.from_file(path) if path else Config()
    if overrides:
        for key, value in overrides.items():
            if not hasattr(cfg, key):
                raise ValueError(f"unknown config key: {key}")
            setattr(cfg, key, value)
    return cfg

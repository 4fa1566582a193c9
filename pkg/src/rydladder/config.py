"""Run configuration: defaults, JSON round-trip, CLI override resolution.

Every command resolves one RunConfig and writes it next to its outputs as
``config.resolved.json`` so any result can be rerun from its own directory.
"""

import json
from dataclasses import asdict, dataclass, fields

from .errors import DataFormatError, ParameterError
from .infoflow import (DEFAULT_EPS_GAIN, DEFAULT_EPS_SMALL, DEFAULT_GRID_LO,
                       DEFAULT_GRID_POINTS)
from .lattice import C6_DEFAULT


@dataclass
class RunConfig:
    # system
    n_rungs: int = 6
    a_um: float = 4.1
    rb_over_a: float = 2.35
    delta_over_omega: float = 3.5
    c6: float = C6_DEFAULT
    aspect_ratio: float = 2.0
    # partitions (None = derived defaults: half cut / four contiguous blocks)
    partition: str | None = None
    partition4: str | None = None
    # filtration estimator
    eps_small: float = DEFAULT_EPS_SMALL
    eps_gain: float = DEFAULT_EPS_GAIN
    grid_points: int = DEFAULT_GRID_POINTS
    grid_lo: float = DEFAULT_GRID_LO
    # density histogram and fits
    log10_lo: float = -26.0
    log10_hi: float = -1.0
    n_bins: int = 50
    # readout noise
    p01: float = 0.01
    p10: float = 0.08
    invert_post_sequence: bool = True
    # dynamics
    schedule: str = "ramp4us"
    dt_us: float = 0.02
    checkpoint_every: int = 25
    ramp_time_us: float = 0.05
    # sampling
    n_shots: int = 4405
    seed: int = 1234
    # solver
    tol: float = 1e-10
    # output
    out_dir: str = "."

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise DataFormatError(f"{path}: not valid JSON: {exc}") from exc
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ParameterError(f"{path}: unknown config keys {sorted(unknown)}")
        return cls(**raw)

    def override(self, **kwargs):
        """New config with the non-None entries of kwargs applied."""
        data = asdict(self)
        for key, value in kwargs.items():
            if value is not None:
                if key not in data:
                    raise ParameterError(f"unknown config key {key!r}")
                data[key] = value
        return RunConfig(**data)

    def dump(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(asdict(self), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def header_params(self):
        """Flat key/value view embedded in every output file header.

        out_dir is omitted so byte-identical runs into different directories
        produce byte-identical files (the resolved config records it).
        """
        data = asdict(self)
        data.pop("out_dir")
        return data

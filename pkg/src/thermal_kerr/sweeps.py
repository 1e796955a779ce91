"""Grid drivers and CSV/JSON emission for the figure data."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import closed_form
from .model import (
    DegeneratePostselectionError,
    InteractionConfig,
    InvalidParameterError,
    ThermalPointer,
)

__all__ = [
    "WEAK_PHI0",
    "QUOTED_Z",
    "SweepResult",
    "sweep_z",
    "sweep_theta",
    "wigner_grid",
    "reproduce_table",
    "dense_theta_grid",
    "theta_star",
    "format_number",
]

WEAK_PHI0 = 2.0 * math.pi * 1e-5
QUOTED_Z = (0.001, 0.5, 0.99999)


def format_number(v: float | None) -> str:
    return "" if v is None else format(float(v), ".17g")


@dataclass(frozen=True)
class SweepResult:
    """One axis plus named columns; ``None`` marks a degenerate cell."""

    axis_name: str
    axis_values: tuple
    columns: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "axis_values", tuple(float(v) for v in self.axis_values))
        cols = {}
        for name, values in self.columns.items():
            values = tuple(None if v is None else float(v) for v in values)
            if len(values) != len(self.axis_values):
                raise ValueError(f"column {name!r} has {len(values)} rows, axis has {len(self.axis_values)}")
            cols[name] = values
        object.__setattr__(self, "columns", cols)

    def __len__(self):
        return len(self.axis_values)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        names = list(self.columns)
        writer.writerow([self.axis_name] + names)
        for i, x in enumerate(self.axis_values):
            writer.writerow([format_number(x)] + [format_number(self.columns[c][i]) for c in names])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "axis": {"name": self.axis_name, "values": list(self.axis_values)},
            "columns": {k: list(v) for k, v in self.columns.items()},
        }
        return json.dumps(doc, allow_nan=False) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise InvalidParameterError(f"unknown format {fmt!r}")


def _all_empty(result: SweepResult, conditional: list[str]) -> bool:
    return all(v is None for c in conditional for v in result.columns[c])


def _conditional(pointer, cfg):
    """(n_bar_f, R), or Nones where the postselected state is undefined."""
    try:
        return closed_form.mean_photon_final(pointer, cfg)
    except (DegeneratePostselectionError, InvalidParameterError):
        return None, None


def sweep_z(phi0: float, theta: float, z_grid) -> SweepResult:
    z_grid = list(z_grid)
    if not z_grid:
        raise InvalidParameterError("z grid is empty")
    cfg = InteractionConfig(phi0, theta)
    cols = {"P": [], "n_bar": [], "n_bar_f": [], "R": []}
    for z in z_grid:
        pointer = ThermalPointer(z)
        nf, r = _conditional(pointer, cfg)
        cols["P"].append(closed_form.postselect_probability(pointer, cfg))
        cols["n_bar"].append(pointer.n_bar)
        cols["n_bar_f"].append(nf)
        cols["R"].append(r)
    result = SweepResult("z", z_grid, cols)
    if _all_empty(result, ["n_bar_f", "R"]):
        raise DegeneratePostselectionError("every grid cell has degenerate postselection")
    return result


def sweep_theta(z: float, phi0: float, theta_grid) -> SweepResult:
    theta_grid = list(theta_grid)
    if not theta_grid:
        raise InvalidParameterError("theta grid is empty")
    pointer = ThermalPointer(z)
    cols = {"P": [], "n_bar_f": [], "R": []}
    for theta in theta_grid:
        cfg = InteractionConfig(phi0, theta)
        nf, r = _conditional(pointer, cfg)
        cols["P"].append(closed_form.postselect_probability(pointer, cfg))
        cols["n_bar_f"].append(nf)
        cols["R"].append(r)
    result = SweepResult("theta", theta_grid, cols)
    if _all_empty(result, ["n_bar_f", "R"]):
        raise DegeneratePostselectionError("every grid cell has degenerate postselection")
    return result


def wigner_grid(z: float, phi0: float, theta: float, window: float, points: int, p: float = 0.0) -> SweepResult:
    """Slice ``W(x, p)`` for ``x`` on ``points`` equally spaced values in ``[-window, window]``."""
    if points < 1 or not (window > 0):
        raise InvalidParameterError("need points >= 1 and window > 0")
    x = np.linspace(-window, window, int(points))
    w = closed_form.wigner_closed(ThermalPointer(z), InteractionConfig(phi0, theta), x, p)
    return SweepResult("x", x, {"W": np.atleast_1d(w)})


def reproduce_table() -> SweepResult:
    """Dark-port probability, postselected mean and ratio at the three quoted temperatures."""
    full = sweep_z(WEAK_PHI0, 0.0, QUOTED_Z)
    return SweepResult("z", full.axis_values, {k: full.columns[k] for k in ("P", "n_bar_f", "R")})


def dense_theta_grid(linear: int = 4001, log_points: int = 2001, smallest: float = 1e-9) -> np.ndarray:
    """Uniform grid on (-pi, pi] merged with log-spaced points on both sides of 0.

    The log part resolves structure on the scale of ``phi0`` near the dark
    point, which a uniform grid of any practical size would step over.
    """
    lin = np.linspace(-math.pi, math.pi, linear)[1:]
    pos = np.logspace(math.log10(smallest), math.log10(math.pi), log_points)
    return np.unique(np.concatenate([lin, pos, -pos]))


def theta_star(z: float, phi0: float = WEAK_PHI0, grid=None) -> tuple[float, float]:
    """Phase-shifter angle maximising the amplification ratio, and that ratio."""
    grid = dense_theta_grid() if grid is None else np.asarray(grid, dtype=float)
    pointer = ThermalPointer(z)
    best = (math.nan, -math.inf)
    for theta in grid:
        _, r = _conditional(pointer, InteractionConfig(phi0, float(theta)))
        if r is not None and r > best[1]:
            best = (float(theta), r)
    if best[1] == -math.inf:
        raise DegeneratePostselectionError("amplification ratio undefined on the whole grid")
    return best

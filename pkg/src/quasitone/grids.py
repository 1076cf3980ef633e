"""Phase-space discretization: grids, sampled fields, coverage, CSV I/O.

A grid is a pair of strictly increasing edge arrays; cells are sampled at
their centers. Two constructions are provided: equidistant edges, and
edges at equal-probability quantiles of a truncated Gaussian fitted to a
moment set, which concentrates cells where the state lives.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import CoverageError, DegenerateMoments, InvalidBounds, IoError
from .states import StateSpec, evaluate, state_centroid
from .textfmt import fmt17, json_value

KIND_REGULAR = "regular"
KIND_GAUSSIAN = "gaussian"

# Minimum share of a state's absolute mass a grid must capture before the
# command line front end agrees to render from it.
COVERAGE_MIN = 0.99

# Reference window for the coverage denominator: a half-width 10 square
# around the state centroid at 512 cells per axis captures all but a
# negligible sliver of every state this package evaluates.
_REF_HALF = 10.0
_REF_CELLS = 512


@dataclass(frozen=True, eq=False)
class GridSpec:
    """Cell edges of a rectangular phase-space mesh."""

    kind: str
    r_edges: np.ndarray
    p_edges: np.ndarray

    def __post_init__(self):
        if self.kind not in (KIND_REGULAR, KIND_GAUSSIAN):
            raise ValueError(f"unknown grid kind: {self.kind!r}")
        for name in ("r_edges", "p_edges"):
            e = np.asarray(getattr(self, name), dtype=float)
            if e.ndim != 1 or e.size < 2:
                raise InvalidBounds(f"{name} needs at least two edge values")
            if not np.all(np.isfinite(e)):
                raise InvalidBounds(f"{name} contains non-finite values")
            if not np.all(np.diff(e) > 0):
                raise InvalidBounds(f"{name} must increase strictly")
            object.__setattr__(self, name, e)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.r_edges.size - 1, self.p_edges.size - 1)

    @property
    def r_centers(self) -> np.ndarray:
        return 0.5 * (self.r_edges[:-1] + self.r_edges[1:])

    @property
    def p_centers(self) -> np.ndarray:
        return 0.5 * (self.p_edges[:-1] + self.p_edges[1:])

    @property
    def cell_areas(self) -> np.ndarray:
        """Cell area matrix, shape (n_r, n_p)."""
        return np.outer(np.diff(self.r_edges), np.diff(self.p_edges))

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        return (
            float(self.r_edges[0]),
            float(self.r_edges[-1]),
            float(self.p_edges[0]),
            float(self.p_edges[-1]),
        )


@dataclass(frozen=True, eq=False)
class WignerField:
    """Wigner values sampled at the cell centers of a grid."""

    grid: GridSpec
    values: np.ndarray
    state: StateSpec | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} does not match grid {self.grid.shape}")
        object.__setattr__(self, "values", v)

    @property
    def signed_mass(self) -> float:
        return float(np.sum(self.values * self.grid.cell_areas))

    @property
    def abs_mass(self) -> float:
        return float(np.sum(np.abs(self.values) * self.grid.cell_areas))


def build_regular(r_min, r_max, p_min, p_max, n_r, n_p) -> GridSpec:
    """Equidistant grid with n_r x n_p cells on [r_min,r_max]x[p_min,p_max]."""
    for lo, hi, n, axis in ((r_min, r_max, n_r, "r"), (p_min, p_max, n_p, "p")):
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise InvalidBounds(f"{axis} bounds must be finite")
        if not hi > lo:
            raise InvalidBounds(f"{axis} bounds reversed or empty: [{lo}, {hi}]")
        if int(n) != n or n < 1:
            raise InvalidBounds(f"{axis} cell count must be a positive integer, got {n!r}")
    return GridSpec(
        KIND_REGULAR,
        np.linspace(r_min, r_max, int(n_r) + 1),
        np.linspace(p_min, p_max, int(n_p) + 1),
    )


def _gaussian_edges(mu, sigma, n, span_sigmas):
    """Equal-probability quantile edges of N(mu, sigma^2) truncated at +-span."""
    lo = ndtr(-span_sigmas)
    hi = ndtr(span_sigmas)
    q = lo + (hi - lo) * np.arange(n + 1) / n
    edges = mu + sigma * ndtri(q)
    # the end quantiles are the truncation points by construction
    edges[0] = mu - sigma * span_sigmas
    edges[-1] = mu + sigma * span_sigmas
    return edges


def build_gaussian(moments, n_r, n_p, span_sigmas=3.0) -> GridSpec:
    """Grid whose cells hold equal Gaussian probability under the moments.

    Edges per axis are inverse-CDF quantiles of a Gaussian with the moment
    set's center and spread, truncated at +-span_sigmas. Cells are
    narrowest at the center and the outer edges land exactly on the
    truncation points.
    """
    if int(n_r) != n_r or n_r < 1 or int(n_p) != n_p or n_p < 1:
        raise InvalidBounds("cell counts must be positive integers")
    if not (np.isfinite(span_sigmas) and span_sigmas > 0):
        raise InvalidBounds(f"span_sigmas must be positive and finite, got {span_sigmas!r}")
    for name, sigma in (("sigma_r", moments.sigma_r), ("sigma_p", moments.sigma_p)):
        if not (np.isfinite(sigma) and sigma > 0):
            raise DegenerateMoments(f"{name} = {sigma!r} cannot shape a grid")
    return GridSpec(
        KIND_GAUSSIAN,
        _gaussian_edges(moments.r0, moments.sigma_r, int(n_r), span_sigmas),
        _gaussian_edges(moments.p0, moments.sigma_p, int(n_p), span_sigmas),
    )


def sample_field(state: StateSpec, grid: GridSpec) -> WignerField:
    """Evaluate the state's Wigner function at every cell center."""
    rr, pp = np.meshgrid(grid.r_centers, grid.p_centers, indexing="ij")
    values = np.asarray(evaluate(state, rr, pp), dtype=float)
    return WignerField(grid, values, state)


def default_grid(state: StateSpec, n=64, half_width=5.0) -> GridSpec:
    """Regular n x n grid centered on the state's analytic centroid."""
    r0, p0 = state_centroid(state)
    return build_regular(r0 - half_width, r0 + half_width, p0 - half_width, p0 + half_width, n, n)


@functools.lru_cache(maxsize=16)
def _reference_abs_mass(state: StateSpec) -> float:
    r0, p0 = state_centroid(state)
    ref = build_regular(
        r0 - _REF_HALF, r0 + _REF_HALF, p0 - _REF_HALF, p0 + _REF_HALF, _REF_CELLS, _REF_CELLS
    )
    return sample_field(state, ref).abs_mass


def coverage(field: WignerField) -> float:
    """Share of the state's absolute mass captured by the field's grid.

    Both numerator and denominator are cell-center Riemann sums of |W|;
    the denominator comes from a wide fixed reference window around the
    state centroid. Clamped to [0, 1].
    """
    if field.state is None:
        raise ValueError("field has no state attached; coverage needs the source state")
    ref = _reference_abs_mass(field.state)
    if ref <= 0:
        return 0.0
    return float(min(1.0, field.abs_mass / ref))


def require_coverage(field: WignerField, threshold=COVERAGE_MIN) -> float:
    """Return coverage, raising CoverageError below the threshold."""
    cov = coverage(field)
    if cov < threshold:
        raise CoverageError(f"grid captures {cov:.4f} of the state's absolute mass; need >= {threshold}")
    return cov


# === CSV + sidecar I/O ===


def _sidecar_path(path) -> str:
    return str(path) + ".json"


def write_field(field: WignerField, path) -> None:
    """Write cell centers and values as CSV plus a JSON sidecar.

    CSV columns are r, p, value in row-major r-then-p order with 17
    significant digits, enough to reproduce the float64 bits exactly. The
    sidecar records the grid kind, both edge arrays, and the source state.
    """
    grid = field.grid
    rc, pc = grid.r_centers, grid.p_centers
    lines = ["r,p,value"]
    for i in range(rc.size):
        for j in range(pc.size):
            lines.append(f"{fmt17(rc[i])},{fmt17(pc[j])},{fmt17(field.values[i, j])}")
    sidecar = {
        "kind": grid.kind,
        "r_edges": [float(e) for e in grid.r_edges],
        "p_edges": [float(e) for e in grid.p_edges],
        "state": field.state.describe() if field.state is not None else None,
    }
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
        with open(_sidecar_path(path), "w", encoding="utf-8") as fh:
            fh.write(json_value(sidecar) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write field: {exc}") from exc


def _state_from_sidecar(info):
    from .states import CatState, CoherentState, FockState

    if info is None:
        return None
    kind = info.get("kind")
    if kind == "fock":
        return FockState(info["m"])
    if kind == "cat":
        da = complex(*info["delta_alpha"])
        al = complex(*info.get("alpha", [0.0, 0.0]))
        return CatState(da, al)
    if kind == "coherent":
        return CoherentState(complex(*info["alpha"]))
    return None  # sampled wavefunctions are not reconstructible from metadata


def read_field(path) -> WignerField:
    """Read a field written by write_field; bit-exact round trip."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().strip().split("\n")
        with open(_sidecar_path(path), "r", encoding="utf-8") as fh:
            sidecar = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read field: {exc}") from exc
    if not lines or lines[0] != "r,p,value":
        raise ValueError(f"{path}: expected header 'r,p,value'")
    grid = GridSpec(
        sidecar["kind"],
        np.array(sidecar["r_edges"], dtype=float),
        np.array(sidecar["p_edges"], dtype=float),
    )
    n_r, n_p = grid.shape
    if len(lines) - 1 != n_r * n_p:
        raise ValueError(f"{path}: {len(lines) - 1} rows for a {n_r}x{n_p} grid")
    values = np.empty((n_r, n_p), dtype=float)
    for k, line in enumerate(lines[1:]):
        parts = line.split(",")
        if len(parts) != 3:
            raise ValueError(f"{path}: malformed row {k + 2}")
        values[k // n_p, k % n_p] = float(parts[2])
    return WignerField(grid, values, _state_from_sidecar(sidecar.get("state")))

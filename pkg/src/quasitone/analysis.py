"""Statistics of sampled Wigner fields.

Weighted moments treat each cell as a point mass value * area at the cell
center and keep the sign, so interference fringes pull on the statistics
exactly as they pull on the distribution. Sums run in fixed row-major
order through numpy's pairwise accumulation, which makes every figure
reproducible bit for bit on repeated runs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields

import numpy as np

from .errors import DegenerateMoments, DegenerateRange, IoError, MassTooLow
from .grids import WignerField
from .textfmt import json_value

# Signed mass below this is too cancelled to normalize reliably.
MASS_FLOOR = 0.5

# Gaussian reference value for the raw kurtosis reported here.
GAUSSIAN_KURTOSIS = 3.0


@dataclass(frozen=True)
class MomentSet:
    """Signed-weight statistics of one field, both axes."""

    r0: float
    p0: float
    sigma_r: float
    sigma_p: float
    skew_r: float
    skew_p: float
    kurt_r: float
    kurt_p: float
    negativity: float


@dataclass(frozen=True)
class FieldExtremes:
    """Most negative and most positive samples with their cell centers."""

    min_value: float
    min_point: tuple[float, float]
    max_value: float
    max_point: tuple[float, float]


@dataclass(frozen=True, eq=False)
class ValueSegmentation:
    """Four equal-width value sections between field min and max."""

    boundaries: np.ndarray  # five ascending edges over the value range
    section_abs_mass: np.ndarray  # |value| * area per section, length 4
    section_index: np.ndarray  # per-cell section id, 0..3


def _axis_stats(weights, coords, total):
    """Center, spread, skewness, and kurtosis along one axis."""
    mean = float(np.sum(weights * coords) / total)
    d = coords - mean
    m2 = float(np.sum(weights * d**2) / total)
    if not np.isfinite(m2) or m2 <= 0:
        raise DegenerateMoments(f"second central moment {m2!r} is not positive")
    m3 = float(np.sum(weights * d**3) / total)
    m4 = float(np.sum(weights * d**4) / total)
    sigma = float(np.sqrt(m2))
    return mean, sigma, m3 / m2**1.5, m4 / m2**2


def compute_moments(field: WignerField) -> MomentSet:
    """Signed-weight moments of the field plus its negativity volume.

    Weights are value * cell_area. The total signed mass must exceed 0.5;
    a well-covered physical state sums to about 1, and anything far below
    that means the grid missed the state or cancellation won.

    Spread is the square root of the second central moment; skewness is
    the standardized third; kurtosis is the raw standardized fourth, so a
    Gaussian scores 3.
    """
    weights = field.values * field.grid.cell_areas
    total = float(np.sum(weights))
    if not np.isfinite(total) or total <= MASS_FLOOR:
        raise MassTooLow(f"signed mass {total:.4f} is at or below {MASS_FLOOR}")
    rr, pp = np.meshgrid(field.grid.r_centers, field.grid.p_centers, indexing="ij")
    r0, sigma_r, skew_r, kurt_r = _axis_stats(weights, rr, total)
    p0, sigma_p, skew_p, kurt_p = _axis_stats(weights, pp, total)
    return MomentSet(
        r0=r0,
        p0=p0,
        sigma_r=sigma_r,
        sigma_p=sigma_p,
        skew_r=skew_r,
        skew_p=skew_p,
        kurt_r=kurt_r,
        kurt_p=kurt_p,
        negativity=negativity_volume(field),
    )


def negativity_volume(field: WignerField) -> float:
    """Absolute mass of the negative part: sum of max(0, -value) * area.

    Equals (integral |W| - integral W) / 2 on the sampled mesh and is zero
    for any nonnegative distribution.
    """
    return float(np.sum(np.maximum(0.0, -field.values) * field.grid.cell_areas))


def extremes(field: WignerField) -> FieldExtremes:
    """Global min and max samples; ties resolve to the lowest (r, p).

    The row-major scan order makes the first occurrence the winner, and
    rows ascend in r while columns ascend in p, so the first occurrence is
    lexicographically smallest.
    """
    v = field.values
    imin = int(np.argmin(v))
    imax = int(np.argmax(v))
    n_p = v.shape[1]
    rc, pc = field.grid.r_centers, field.grid.p_centers

    def point(flat):
        return (float(rc[flat // n_p]), float(pc[flat % n_p]))

    return FieldExtremes(
        min_value=float(v.flat[imin]),
        min_point=point(imin),
        max_value=float(v.flat[imax]),
        max_point=point(imax),
    )


def segment_four(field: WignerField) -> ValueSegmentation:
    """Split the value range into four equal-width sections.

    Boundaries sit at min + k (max - min) / 4. Sections are half-open
    below, and only the last one includes its upper edge, so every cell
    lands in exactly one section and the per-section absolute masses add
    up to the field's total absolute mass.
    """
    v = field.values
    vmin = float(np.min(v))
    vmax = float(np.max(v))
    if vmax <= vmin:
        raise DegenerateRange(f"value range collapsed at {vmin!r}")
    boundaries = vmin + (vmax - vmin) * np.arange(5) / 4.0
    index = np.digitize(v, boundaries[1:4], right=False)
    areas = field.grid.cell_areas
    masses = np.array(
        [float(np.sum(np.abs(v) * areas * (index == k))) for k in range(4)]
    )
    return ValueSegmentation(boundaries=boundaries, section_abs_mass=masses, section_index=index)


# === JSON export ===


def moments_to_json(moments: MomentSet) -> str:
    """Render a moment set as JSON with 17 significant digits per value."""
    payload = {f.name: getattr(moments, f.name) for f in fields(MomentSet)}
    return json_value(payload) + "\n"


def write_moments(moments: MomentSet, path) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(moments_to_json(moments))
    except OSError as exc:
        raise IoError(f"cannot write moments: {exc}") from exc


def read_moments(path) -> MomentSet:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read moments: {exc}") from exc
    return MomentSet(**{f.name: float(data[f.name]) for f in fields(MomentSet)})

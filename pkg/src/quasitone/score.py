"""Pitch events: quantized, tagged, panned transcriptions of partial banks.

An event is what a score needs and a synthesizer does not: a lattice pitch
instead of a free frequency, a playing technique instead of a sign bit,
and channel gains instead of a cell coordinate. Event lists serialize to
deterministic JSON, byte-identical across runs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .analysis import compute_moments
from .errors import IoError
from .grids import WignerField
from .sonify import (
    MapConfig,
    PartialBank,
    quantize_quarter_tone,
    quarter_tone_index,
    spatial_gains,
    technique_tag,
)


@dataclass(frozen=True)
class PitchEvent:
    """One note: onset and duration in seconds, pitch on the 24-step
    lattice, dynamic in [0, 1], playing technique, channel gains."""

    onset: float
    duration: float
    pitch_index: int
    freq_hz: float
    dynamic: float
    technique: str
    gains: tuple[float, ...]

    def __post_init__(self):
        if self.onset < 0 or self.duration <= 0:
            raise ValueError("onset must be >= 0 and duration positive")
        if not (np.isfinite(self.freq_hz) and self.freq_hz > 0):
            raise ValueError(f"freq_hz must be positive and finite, got {self.freq_hz!r}")
        if not (0.0 <= self.dynamic <= 1.0):
            raise ValueError(f"dynamic must lie in [0, 1], got {self.dynamic!r}")


def bank_to_events(
    bank: PartialBank,
    field: WignerField,
    cfg: MapConfig,
    channels=2,
    arpeggiate=False,
) -> tuple[PitchEvent, ...]:
    """Transcribe a bank against the field it came from.

    Frequencies snap to the quarter-tone lattice around cfg.ref_pitch.
    Per-cell partials keep their own technique (negative cells get the
    configured negative-region bowing) and pan from their cell center;
    partials without a source cell share the field's negativity flag and
    pan from the field centroid. Events are sorted by onset, then pitch.

    arpeggiate staggers per-cell events by their p index: cells in the
    same p column share an onset and columns step across the bank
    duration, each event keeping the full duration.
    """
    bounds = field.grid.bounds
    p_centers = field.grid.p_centers
    step = bank.duration / p_centers.size if arpeggiate else 0.0
    centroid = None
    events = []
    for partial in bank.partials:
        freq_q = quantize_quarter_tone(partial.freq, cfg.ref_pitch)
        idx = quarter_tone_index(partial.freq, cfg.ref_pitch)
        if partial.source_r is not None:
            negative = (partial.source_value or 0.0) < 0
            gains = spatial_gains(partial.source_r, partial.source_p, bounds, channels)
            j_p = int(np.searchsorted(p_centers, partial.source_p))
            onset = step * min(j_p, p_centers.size - 1)
        else:
            negative = bank.negative
            if centroid is None:
                m = compute_moments(field)
                centroid = (m.r0, m.p0)
            gains = spatial_gains(centroid[0], centroid[1], bounds, channels)
            onset = 0.0
        events.append(
            PitchEvent(
                onset=float(onset),
                duration=float(bank.duration),
                pitch_index=int(idx),
                freq_hz=float(freq_q),
                dynamic=float(partial.amp),
                technique=technique_tag(negative, cfg),
                gains=tuple(float(g) for g in gains),
            )
        )
    events.sort(key=lambda e: (e.onset, e.pitch_index, -e.dynamic, e.gains))
    return tuple(events)


def _event_payload(event: PitchEvent) -> dict:
    return {
        "onset": event.onset,
        "duration": event.duration,
        "pitch_index": event.pitch_index,
        "freq_hz": event.freq_hz,
        "dynamic": event.dynamic,
        "technique": event.technique,
        "gains": list(event.gains),
    }


def score_to_json(events) -> str:
    """Deterministic JSON text for an event list, 17 digits per float."""
    from .textfmt import json_value

    return json_value([_event_payload(e) for e in events]) + "\n"


def write_score(events, path) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(score_to_json(events))
    except OSError as exc:
        raise IoError(f"cannot write score: {exc}") from exc


def read_score(path) -> tuple[PitchEvent, ...]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read score: {exc}") from exc
    return tuple(
        PitchEvent(
            onset=float(e["onset"]),
            duration=float(e["duration"]),
            pitch_index=int(e["pitch_index"]),
            freq_hz=float(e["freq_hz"]),
            dynamic=float(e["dynamic"]),
            technique=str(e["technique"]),
            gains=tuple(float(g) for g in e["gains"]),
        )
        for e in data
    )

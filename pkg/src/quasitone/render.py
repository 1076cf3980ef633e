"""Audio rendering: additive synthesis, the long sweep, sonograms, WAV I/O.

Everything here is deterministic. Partials are summed in bank order with
float64 accumulation and only cast to float32 at the very end, so the same
bank renders to the same bytes on every run.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, replace

import numpy as np

from .analysis import compute_moments
from .errors import BufferTooShort, IoError, NyquistViolation, UnsupportedFormat
from .grids import GridSpec, default_grid, sample_field
from .sonify import TAU, WAVE_SINE, MapConfig, PartialBank, method4_moments, spatial_gains
from .states import EPS_SHIFT, CatState, FockState

DEFAULT_SAMPLE_RATE = 48000

# Master peak after normalization: -1 dBFS.
TARGET_PEAK = 10.0 ** (-1.0 / 20.0)

FADE_SECONDS = 0.010

DB_FLOOR = -120.0

# Spatial margin around the trajectory's endpoint centroids when panning a
# sweep; matches the half width of the default analysis grid.
_PAN_HALF_WIDTH = 5.0


@dataclass(frozen=True, eq=False)
class AudioBuffer:
    """Float32 audio, shape (n_samples, n_channels), plus its sample rate."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.float32)
        if s.ndim == 1:
            s = s[:, None]
        if s.ndim != 2 or s.shape[0] == 0 or s.shape[1] == 0:
            raise ValueError(f"samples must be a non-empty (n, channels) array, got {s.shape}")
        if int(self.sample_rate) <= 0:
            raise ValueError(f"sample rate must be positive, got {self.sample_rate!r}")
        object.__setattr__(self, "samples", np.ascontiguousarray(s))
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    @property
    def n_channels(self) -> int:
        return self.samples.shape[1]

    @property
    def duration(self) -> float:
        return self.samples.shape[0] / self.sample_rate


# === additive synthesis ===


def _partial_wave(partial, t, sample_rate):
    """Time series of one unit partial; amp applied by the caller."""
    theta = 2.0 * math.pi * partial.freq * t + partial.phase
    if partial.waveform == WAVE_SINE:
        return np.sin(theta)
    # band-limited triangle: odd harmonics with alternating sign, 1/j^2
    # rolloff, truncated strictly below the Nyquist frequency
    wave = np.zeros_like(t)
    j = 1
    sign = 1.0
    while partial.freq * j < 0.5 * sample_rate:
        wave += sign * np.sin(j * theta) / j**2
        sign = -sign
        j += 2
    return (8.0 / math.pi**2) * wave


def _accumulate(partials, gains, out, sample_rate):
    """Sum partials into out (n, channels), in order, float64."""
    n = out.shape[0]
    t = np.arange(n, dtype=float) / sample_rate
    for k, partial in enumerate(partials):
        if partial.freq >= 0.5 * sample_rate:
            raise NyquistViolation(
                f"partial at {partial.freq:.1f} Hz needs a rate above {2 * partial.freq:.0f} Hz"
            )
        wave = partial.amp * _partial_wave(partial, t, sample_rate)
        for c in range(out.shape[1]):
            g = gains[k, c]
            if g != 0.0:
                out[:, c] += g * wave


def _fade_window(n, sample_rate):
    """Unity window with 10 ms raised-cosine ramps at both ends."""
    w = np.ones(n, dtype=float)
    L = min(int(round(FADE_SECONDS * sample_rate)), n // 2)
    if L >= 2:
        ramp = 0.5 * (1.0 - np.cos(math.pi * np.arange(L) / (L - 1)))
        w[:L] *= ramp
        w[-L:] *= ramp[::-1]
    return w


def _normalized_f32(out):
    peak = float(np.max(np.abs(out))) if out.size else 0.0
    if peak > 0.0:
        out = out * (TARGET_PEAK / peak)
    return out.astype(np.float32)


def synth(bank: PartialBank, sample_rate=DEFAULT_SAMPLE_RATE, gains=None) -> AudioBuffer:
    """Render a partial bank to audio.

    gains is an optional (n_partials, n_channels) matrix of per-partial
    channel gains; omitted, the render is mono at unit gain. The mix gets
    10 ms raised-cosine ramps at both ends and a master normalization to
    peak 0.891 (-1 dBFS). Raises NyquistViolation if any partial reaches
    half the sample rate.
    """
    n = int(round(bank.duration * sample_rate))
    if n < 1:
        raise ValueError("bank too short to render a single sample")
    n_partials = len(bank.partials)
    if gains is None:
        gains = np.ones((n_partials, 1), dtype=float)
    else:
        gains = np.asarray(gains, dtype=float)
        if gains.shape[0] != n_partials or gains.ndim != 2:
            raise ValueError(f"gains must be (n_partials, channels), got {gains.shape}")
    out = np.zeros((n, gains.shape[1]), dtype=float)
    _accumulate(bank.partials, gains, out, sample_rate)
    out *= _fade_window(n, sample_rate)[:, None]
    return AudioBuffer(_normalized_f32(out), sample_rate)


# === the long sweep ===


@dataclass(frozen=True)
class SweepTrajectory:
    """Piecewise-linear path of the superposition shift over time.

    Each segment is (start, end, seconds) with complex endpoints. Times
    beyond the path clamp to the nearest endpoint. Shift magnitudes at or
    below the degeneracy guard stand for the m=1 number state.
    """

    segments: tuple[tuple[complex, complex, float], ...]

    def __post_init__(self):
        if not self.segments:
            raise ValueError("trajectory needs at least one segment")
        cleaned = []
        for seg in self.segments:
            a, b, secs = seg
            secs = float(secs)
            if not (np.isfinite(secs) and secs > 0):
                raise ValueError(f"segment duration must be positive, got {secs!r}")
            cleaned.append((complex(a), complex(b), secs))
        object.__setattr__(self, "segments", tuple(cleaned))

    @property
    def total_seconds(self) -> float:
        return sum(seg[2] for seg in self.segments)

    def delta_alpha_at(self, t: float) -> complex:
        if t <= 0:
            return self.segments[0][0]
        for a, b, secs in self.segments:
            if t <= secs:
                return a + (b - a) * (t / secs)
            t -= secs
        return self.segments[-1][1]


def default_trajectory() -> SweepTrajectory:
    """Number state into a two-lobe superposition drifting out to -3.

    Three equal 91 s legs, 273 s in all: 0 to -1, -1 to -2, -2 to -3.
    """
    return SweepTrajectory(((0j, -1 + 0j, 91.0), (-1 + 0j, -2 + 0j, 91.0), (-2 + 0j, -3 + 0j, 91.0)))


def _sweep_cfg() -> MapConfig:
    # The sweep follows the envelope width, so its center frequency tracks
    # sigma_r; anchoring on r0 would push the low envelope edge below zero
    # for every state on the default path.
    return MapConfig(f0_mode="sigma_r")


def render_sweep(
    trajectory: SweepTrajectory | None = None,
    cfg: MapConfig | None = None,
    sample_rate=DEFAULT_SAMPLE_RATE,
    frame_seconds=0.25,
    channels=1,
    grid: GridSpec | None = None,
) -> AudioBuffer:
    """Render a trajectory as overlapped envelope-bank frames.

    Every frame_seconds/2 the shift is advanced, the state sampled on its
    default grid (or the given fixed grid), its moments taken, and an
    envelope bank rendered for one frame. Frames carry a Hann window and
    overlap 50 percent, which sums to unit gain; oscillator phases carry
    over between frames so the crossfade stays beat-free. The master
    normalization runs once over the whole piece. With channels 2 or 4 each
    frame is panned equal-power from its centroid position within a fixed
    box around the whole trajectory.

    Defaults reproduce the 273 s path; cfg defaults to the sigma_r-anchored
    envelope so every partial stays inside the audible band end to end.
    """
    trajectory = trajectory or default_trajectory()
    cfg = cfg or _sweep_cfg()
    if frame_seconds <= 0:
        raise ValueError(f"frame_seconds must be positive, got {frame_seconds!r}")
    if channels not in (1, 2, 4):
        raise ValueError(f"channels must be 1, 2, or 4, got {channels!r}")
    n_total = int(round(trajectory.total_seconds * sample_rate))
    n_frame = int(round(frame_seconds * sample_rate))
    if n_frame < 4 or n_total < n_frame:
        raise ValueError("trajectory shorter than a single frame")
    hop = n_frame // 2
    hop_seconds = hop / sample_rate
    window = 0.5 - 0.5 * np.cos(2.0 * math.pi * np.arange(n_frame) / n_frame)
    out = np.zeros((n_total, channels), dtype=float)
    if grid is not None:
        pan_bounds = grid.bounds
    else:
        ends = [z for a, b, _ in trajectory.segments for z in (a, b)]
        pan_bounds = (
            min(z.real for z in ends) - _PAN_HALF_WIDTH,
            max(z.real for z in ends) + _PAN_HALF_WIDTH,
            min(z.imag for z in ends) - _PAN_HALF_WIDTH,
            max(z.imag for z in ends) + _PAN_HALF_WIDTH,
        )
    # oscillator phases carried across frames: partial k of the next frame
    # picks up where partial k of this frame stands at the overlap start, so
    # the 50% crossfade blends nearly identical waveforms instead of beating
    phases = np.zeros(cfg.n_osc, dtype=float)
    start = 0
    while start < n_total:
        t_frame = start / sample_rate
        shift = trajectory.delta_alpha_at(t_frame)
        state = FockState(1) if abs(shift) <= EPS_SHIFT else CatState(shift)
        field = sample_field(state, grid if grid is not None else default_grid(state))
        moments = compute_moments(field)
        bank = method4_moments(moments, cfg, duration=frame_seconds)
        partials = tuple(
            replace(p, phase=(p.phase + phases[k]) % TAU)
            for k, p in enumerate(bank.partials)
        )
        if channels == 1:
            frame_gains = np.ones((len(partials), 1), dtype=float)
        else:
            g = spatial_gains(moments.r0, moments.p0, pan_bounds, channels)
            frame_gains = np.tile(np.asarray(g, dtype=float), (len(partials), 1))
        frame = np.zeros((n_frame, channels), dtype=float)
        _accumulate(partials, frame_gains, frame, sample_rate)
        frame *= window[:, None]
        stop = min(start + n_frame, n_total)
        out[start:stop] += frame[: stop - start]
        for k, p in enumerate(partials):
            phases[k] = (p.phase + TAU * p.freq * hop_seconds) % TAU
        start += hop
    return AudioBuffer(_normalized_f32(out), sample_rate)


# === sonogram ===


@dataclass(frozen=True, eq=False)
class Sonogram:
    """Short-time magnitude spectrum in dB: times by frequencies."""

    times: np.ndarray
    freqs: np.ndarray
    magnitude_db: np.ndarray

    def __post_init__(self):
        if self.magnitude_db.shape != (self.times.size, self.freqs.size):
            raise ValueError("magnitude matrix must be (n_times, n_freqs)")


def stft_sonogram(buffer: AudioBuffer, window=2048, hop=512) -> Sonogram:
    """Hann-windowed short-time spectrum of the buffer, channels averaged.

    Magnitudes are scaled so a full-scale sine reads near 0 dB, then
    floored at -120 dB. Raises BufferTooShort when the audio is shorter
    than one window.
    """
    if window < 8 or hop < 1:
        raise ValueError("window must be >= 8 samples and hop >= 1")
    mono = np.mean(np.asarray(buffer.samples, dtype=float), axis=1)
    if mono.size < window:
        raise BufferTooShort(f"{mono.size} samples but the window needs {window}")
    w = np.hanning(window)
    scale = 2.0 / float(np.sum(w))
    n_frames = 1 + (mono.size - window) // hop
    mags = np.empty((n_frames, window // 2 + 1), dtype=float)
    for k in range(n_frames):
        seg = mono[k * hop : k * hop + window] * w
        mags[k] = np.abs(np.fft.rfft(seg)) * scale
    floor_linear = 10.0 ** (DB_FLOOR / 20.0)
    db = 20.0 * np.log10(np.maximum(mags, floor_linear))
    times = (np.arange(n_frames) * hop + window / 2.0) / buffer.sample_rate
    freqs = np.fft.rfftfreq(window, 1.0 / buffer.sample_rate)
    return Sonogram(times=times, freqs=freqs, magnitude_db=db)


def write_sonogram_csv(sono: Sonogram, path) -> None:
    """CSV with the frequency axis across the first row and times down the
    first column; the corner cell is empty."""
    lines = ["," + ",".join(format(f, ".9g") for f in sono.freqs)]
    for i in range(sono.times.size):
        row = ",".join(format(v, ".9g") for v in sono.magnitude_db[i])
        lines.append(format(sono.times[i], ".9g") + "," + row)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write sonogram: {exc}") from exc


# === WAV I/O ===


def write_wav(buffer: AudioBuffer, path) -> None:
    """Write 32-bit float WAV: 44-byte header plus interleaved samples."""
    data = np.ascontiguousarray(buffer.samples, dtype="<f4").tobytes()
    n_ch = buffer.n_channels
    sr = buffer.sample_rate
    block = 4 * n_ch
    header = b"RIFF" + struct.pack("<I", 36 + len(data)) + b"WAVE"
    header += b"fmt " + struct.pack("<IHHIIHH", 16, 3, n_ch, sr, sr * block, block, 32)
    header += b"data" + struct.pack("<I", len(data))
    try:
        with open(path, "wb") as fh:
            fh.write(header + data)
    except OSError as exc:
        raise IoError(f"cannot write wav: {exc}") from exc


def read_wav(path) -> AudioBuffer:
    """Read a 32-bit float WAV written by write_wav (or anything like it).

    Rejects every other encoding with UnsupportedFormat, including
    truncated files and integer PCM.
    """
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read wav: {exc}") from exc
    if len(blob) < 12 or blob[:4] != b"RIFF" or blob[8:12] != b"WAVE":
        raise UnsupportedFormat(f"{path}: not a RIFF/WAVE file")
    pos = 12
    fmt = None
    data = None
    while pos + 8 <= len(blob):
        cid = blob[pos : pos + 4]
        (size,) = struct.unpack("<I", blob[pos + 4 : pos + 8])
        body = blob[pos + 8 : pos + 8 + size]
        if len(body) < size:
            raise UnsupportedFormat(f"{path}: truncated {cid!r} chunk")
        if cid == b"fmt ":
            fmt = body
        elif cid == b"data":
            data = body
        pos += 8 + size + (size & 1)
    if fmt is None or data is None:
        raise UnsupportedFormat(f"{path}: missing fmt or data chunk")
    if len(fmt) < 16:
        raise UnsupportedFormat(f"{path}: fmt chunk too small")
    audio_format, n_ch, sr, _, _, bits = struct.unpack("<HHIIHH", fmt[:16])
    if audio_format != 3 or bits != 32:
        raise UnsupportedFormat(
            f"{path}: need IEEE float 32 (format 3), got format {audio_format} at {bits} bits"
        )
    if n_ch < 1 or len(data) % (4 * n_ch):
        raise UnsupportedFormat(f"{path}: data size does not divide into {n_ch}-channel frames")
    samples = np.frombuffer(data, dtype="<f4").reshape(-1, n_ch)
    return AudioBuffer(samples.copy(), sr)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import quantize_brute
from quasitone import (
    DegenerateMoments,
    DegenerateRange,
    EmptyField,
    FockState,
    MAX_PARTIALS,
    MapConfig,
    OutOfBounds,
    WignerField,
    build_regular,
    compute_moments,
    load_map_config,
    method1_grid,
    method2_extremes,
    method3_sections,
    method4_moments,
    quantize_quarter_tone,
    quarter_tone_index,
    sample_field,
    spatial_gains,
    technique_tag,
)


class TestMapConfig:
    def test_defaults(self, cfg):
        assert cfg.f_lo == 55.0
        assert cfg.f_hi == 7040.0
        assert cfg.n_osc == 21

    def test_validation(self):
        with pytest.raises(ValueError):
            MapConfig(f_lo=100.0, f_hi=50.0)
        with pytest.raises(ValueError):
            MapConfig(q_slope=0.0)
        with pytest.raises(ValueError):
            MapConfig(n_osc=2)
        with pytest.raises(ValueError):
            MapConfig(n_osc=0)
        assert MapConfig(n_osc=1).n_osc == 1
        with pytest.raises(ValueError):
            MapConfig(negative_technique="vibrato")
        with pytest.raises(ValueError):
            MapConfig(waveform="square")
        with pytest.raises(ValueError):
            MapConfig(freq_axis="q")

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "map.cfg"
        path.write_text(
            "# comment line\n"
            "f_lo = 110\n"
            "n_osc=33\n"
            "negative_technique = ricochet\n"
            "\n"
        )
        c = load_map_config(path)
        assert c.f_lo == 110.0
        assert c.n_osc == 33
        assert c.negative_technique == "ricochet"
        assert c.f_hi == 7040.0

    def test_load_with_base(self, tmp_path):
        path = tmp_path / "map.cfg"
        path.write_text("f0_base=440\n")
        base = MapConfig(n_osc=11)
        c = load_map_config(path, base=base)
        assert c.f0_base == 440.0
        assert c.n_osc == 11

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "map.cfg"
        path.write_text("volume=11\n")
        with pytest.raises(ValueError):
            load_map_config(path)


class TestMethod1:
    def test_exact_cell_count(self, fock1_30_field, cfg):
        bank = method1_grid(fock1_30_field, cfg)
        assert len(bank.partials) == 900
        assert bank.method == "I"
        assert bank.negative

    def test_top_selection_on_large_grid(self, cfg):
        f = sample_field(FockState(1), build_regular(-5, 5, -5, 5, 64, 64))
        bank = method1_grid(f, cfg)
        assert len(bank.partials) == MAX_PARTIALS
        kept = min(abs(p.source_value) for p in bank.partials)
        dropped = sorted(np.abs(f.values).ravel())[::-1][MAX_PARTIALS:]
        assert kept >= max(dropped) - 1e-15

    def test_frequencies_span_band(self, fock1_30_field, cfg):
        bank = method1_grid(fock1_30_field, cfg)
        freqs = [p.freq for p in bank.partials]
        assert min(freqs) == pytest.approx(cfg.f_lo, rel=1e-12)
        assert max(freqs) == pytest.approx(cfg.f_hi, rel=1e-12)

    def test_amplitude_normalized(self, fock1_30_field, cfg):
        bank = method1_grid(fock1_30_field, cfg)
        amps = [p.amp for p in bank.partials]
        assert max(amps) == pytest.approx(1.0, rel=1e-12)
        assert min(amps) >= 0.0

    def test_negative_cells_phase_flipped(self, fock1_30_field, cfg):
        bank = method1_grid(fock1_30_field, cfg)
        for p in bank.partials:
            if p.source_value < 0 and p.amp > 1e-6:
                base = p.phase - math.pi
                assert base >= -1e-12 or p.phase >= math.pi - 1e-12
                break
        else:
            pytest.fail("no negative-sourced partial found")

    def test_axis_swap(self, fock1_30_field):
        c_r = MapConfig(freq_axis="r")
        c_p = MapConfig(freq_axis="p")
        b_r = method1_grid(fock1_30_field, c_r)
        b_p = method1_grid(fock1_30_field, c_p)
        # the field is symmetric so the multisets of frequencies agree,
        # but cell-to-frequency assignment differs
        same = all(
            a.freq == b.freq and a.source_r == b.source_r for a, b in zip(b_r.partials, b_p.partials)
        )
        assert not same

    def test_zero_field_rejected(self, cfg):
        g = build_regular(-1, 1, -1, 1, 4, 4)
        with pytest.raises(EmptyField):
            method1_grid(WignerField(g, np.zeros((4, 4))), cfg)


class TestMethod2:
    def test_two_partials_affine(self, fock1_field, cfg):
        bank = method2_extremes(fock1_field, cfg)
        assert len(bank.partials) == 2
        lo, hi = bank.partials
        span = 4.0 / math.pi
        vmin = float(fock1_field.values.min())
        vmax = float(fock1_field.values.max())
        want_lo = cfg.f_lo + (vmin + 2.0 / math.pi) / span * (cfg.f_hi - cfg.f_lo)
        want_hi = cfg.f_lo + (vmax + 2.0 / math.pi) / span * (cfg.f_hi - cfg.f_lo)
        assert lo.freq == pytest.approx(want_lo, rel=1e-12)
        assert hi.freq == pytest.approx(want_hi, rel=1e-12)

    def test_amps_scaled_by_magnitude(self, fock1_field, cfg):
        bank = method2_extremes(fock1_field, cfg)
        amps = sorted(p.amp for p in bank.partials)
        assert amps[1] == pytest.approx(1.0)
        assert 0.0 < amps[0] < 1.0

    def test_constant_field_rejected(self, cfg):
        g = build_regular(-1, 1, -1, 1, 4, 4)
        with pytest.raises(DegenerateRange):
            method2_extremes(WignerField(g, np.full((4, 4), 0.1)), cfg)


class TestMethod3:
    def test_four_geometric_frequencies(self, fock1_field, cfg):
        bank = method3_sections(fock1_field, cfg)
        assert len(bank.partials) == 4
        ratio = cfg.f_hi / cfg.f_lo
        for k, p in enumerate(bank.partials):
            assert p.freq == pytest.approx(cfg.f_lo * ratio ** (k / 3.0), rel=1e-12)

    def test_amps_are_normalized_section_masses(self, fock1_field, cfg):
        bank = method3_sections(fock1_field, cfg)
        amps = [p.amp for p in bank.partials]
        assert max(amps) == pytest.approx(1.0, rel=1e-12)
        assert all(a >= 0 for a in amps)


class TestMethod4:
    def test_count_and_symmetry(self, fock1_field, cfg):
        m = compute_moments(fock1_field)
        bank = method4_moments(m, cfg, 4.0)
        assert len(bank.partials) == cfg.n_osc
        amps = [p.amp for p in bank.partials]
        for k in range(len(amps)):
            assert amps[k] == pytest.approx(amps[-1 - k], abs=1e-12)
        assert int(np.argmax(amps)) == len(amps) // 2

    def test_single_oscillator_bank(self, fock0_field):
        cfg = MapConfig(n_osc=1)
        m = compute_moments(fock0_field)
        bank = method4_moments(m, cfg, 4.0)
        assert len(bank.partials) == 1
        only = bank.partials[0]
        assert only.amp == 1.0
        assert only.freq == pytest.approx(cfg.f0_base + cfg.f0_slope * m.r0, abs=1e-9)

    def test_frequencies_clipped_to_band(self, fock1_field, cfg):
        m = compute_moments(fock1_field)
        bank = method4_moments(m, cfg, 4.0)
        for p in bank.partials:
            assert cfg.f_lo <= p.freq <= cfg.f_hi

    def test_width_scales_with_sigma(self, cfg):
        class M:
            r0 = 0.0
            p0 = 0.0
            sigma_r = 0.5
            sigma_p = 0.5
            negativity = 0.0

        bank = method4_moments(M(), MapConfig(f0_base=3000.0, f0_slope=0.0), 1.0)
        freqs = [p.freq for p in bank.partials]
        # ideal spacing: 6 sigma_f over 20 gaps, sigma_f = q_slope * sigma_r = 40
        assert freqs[1] - freqs[0] == pytest.approx(6.0 * 40.0 / 20.0, rel=1e-9)

    def test_sigma_r_anchor_mode(self, fock1_field):
        m = compute_moments(fock1_field)
        c = MapConfig(f0_mode="sigma_r")
        bank = method4_moments(m, c, 1.0)
        center = bank.partials[len(bank.partials) // 2]
        assert center.freq == pytest.approx(c.f0_base + c.f0_slope * m.sigma_r, rel=1e-9)

    def test_degenerate_sigma_rejected(self, cfg):
        class M:
            r0 = 0.0
            p0 = 0.0
            sigma_r = 0.0
            sigma_p = 1.0
            negativity = 0.0

        with pytest.raises(DegenerateMoments):
            method4_moments(M(), cfg, 1.0)


class TestQuantization:
    def test_matches_brute_force(self):
        rng = np.random.default_rng(7)
        freqs = rng.uniform(55.0, 7040.0, size=2000)
        got = quantize_quarter_tone(freqs)
        for f, g in zip(freqs, got):
            assert g == pytest.approx(quantize_brute(float(f)), rel=1e-12)

    def test_idempotent_exactly(self):
        rng = np.random.default_rng(11)
        freqs = rng.uniform(55.0, 7040.0, size=5000)
        once = quantize_quarter_tone(freqs)
        twice = quantize_quarter_tone(once)
        assert np.array_equal(once, twice)

    def test_lattice_points_fixed(self):
        assert quantize_quarter_tone(440.0) == pytest.approx(440.0, rel=1e-15)
        idx = quarter_tone_index(440.0)
        assert idx == 0
        assert quarter_tone_index(880.0) == 24

    def test_midpoint_rounds_up(self):
        f = 440.0 * 2.0 ** (0.5 / 24.0)
        assert quarter_tone_index(f) == 1

    @settings(max_examples=80, deadline=None)
    @given(f=st.floats(min_value=20.0, max_value=20000.0))
    def test_ratio_error_bounded(self, f):
        q = float(quantize_quarter_tone(f))
        assert abs(math.log2(q / f)) <= 1.0 / 48.0 + 1e-12


class TestSpatialGains:
    bounds = (-5.0, 5.0, -5.0, 5.0)

    def test_stereo_endpoints(self):
        left = spatial_gains(-5.0, 0.0, self.bounds, channels=2)
        right = spatial_gains(5.0, 0.0, self.bounds, channels=2)
        assert left == pytest.approx([1.0, 0.0], abs=1e-15)
        assert right == pytest.approx([0.0, 1.0], abs=1e-15)

    def test_center_equal_power(self):
        g = spatial_gains(0.0, 0.0, self.bounds, channels=2)
        assert g[0] == pytest.approx(g[1])
        assert float(np.sum(np.square(g))) == pytest.approx(1.0, abs=1e-15)

    def test_mono(self):
        g = spatial_gains(1.0, 1.0, self.bounds, channels=1)
        assert list(g) == [1.0]

    def test_out_of_bounds(self):
        with pytest.raises(OutOfBounds):
            spatial_gains(6.0, 0.0, self.bounds)

    @settings(max_examples=100, deadline=None)
    @given(
        r=st.floats(min_value=-5.0, max_value=5.0),
        p=st.floats(min_value=-5.0, max_value=5.0),
        channels=st.sampled_from([2, 4]),
    )
    def test_unit_energy(self, r, p, channels):
        g = spatial_gains(r, p, self.bounds, channels=channels)
        assert len(g) == channels
        assert float(np.sum(np.square(g))) == pytest.approx(1.0, abs=1e-12)


class TestTechniqueTag:
    def test_positive_is_ordinario(self, cfg):
        assert technique_tag(False, cfg) == "ordinario"

    def test_negative_uses_config(self, cfg):
        assert technique_tag(True, cfg) == "sul_ponticello"
        assert technique_tag(True, MapConfig(negative_technique="ricochet")) == "ricochet"

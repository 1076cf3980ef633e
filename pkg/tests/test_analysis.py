import math

import numpy as np
import pytest

from quasitone import (
    CatState,
    DegenerateMoments,
    DegenerateRange,
    FockState,
    GAUSSIAN_KURTOSIS,
    MassTooLow,
    WignerField,
    build_regular,
    compute_moments,
    extremes,
    moments_to_json,
    negativity_volume,
    read_moments,
    sample_field,
    segment_four,
    write_moments,
)


class TestMoments:
    def test_ground_state(self, fock0_field):
        m = compute_moments(fock0_field)
        assert m.r0 == pytest.approx(0.0, abs=1e-9)
        assert m.p0 == pytest.approx(0.0, abs=1e-9)
        assert m.sigma_r == pytest.approx(math.sqrt(0.5), abs=1e-3)
        assert m.sigma_p == pytest.approx(math.sqrt(0.5), abs=1e-3)
        assert m.skew_r == pytest.approx(0.0, abs=1e-9)
        assert m.kurt_r == pytest.approx(GAUSSIAN_KURTOSIS, abs=5e-3)
        assert m.negativity == pytest.approx(0.0, abs=1e-9)

    def test_first_excited(self, fock1_field):
        m = compute_moments(fock1_field)
        assert m.sigma_r == pytest.approx(math.sqrt(1.5), abs=1e-3)
        # closed-form negative volume: 2 e^{-1/2} - 1
        assert m.negativity == pytest.approx(2.0 * math.exp(-0.5) - 1.0, abs=1e-3)

    def test_cat_lobe_centroid_and_width(self, cat1_field):
        m = compute_moments(cat1_field)
        assert m.r0 == pytest.approx(-1.0, abs=1e-6)
        assert m.p0 == pytest.approx(0.0, abs=1e-9)
        # frozen from independent quadrature of the closed form at shift -1
        assert m.sigma_r == pytest.approx(0.735519, abs=1e-4)

    def test_mass_floor(self):
        g = build_regular(-1, 1, -1, 1, 8, 8)
        f = WignerField(g, np.zeros((8, 8)))
        with pytest.raises(MassTooLow):
            compute_moments(f)

    def test_degenerate_spread(self):
        g = build_regular(-1, 1, -1, 1, 8, 8)
        v = np.zeros((8, 8))
        v[4, 4] = 1.0 / g.cell_areas[4, 4]
        with pytest.raises(DegenerateMoments):
            compute_moments(WignerField(g, v))


class TestNegativity:
    def test_positive_field_zero(self, fock0_field):
        assert negativity_volume(fock0_field) == pytest.approx(0.0, abs=1e-12)

    def test_matches_moments_field(self, fock1_field):
        m = compute_moments(fock1_field)
        assert negativity_volume(fock1_field) == pytest.approx(m.negativity, rel=1e-12)


class TestExtremes:
    def test_first_excited_on_odd_grid(self):
        # odd cell count puts a cell center exactly on the origin
        f = sample_field(FockState(1), build_regular(-5, 5, -5, 5, 31, 31))
        ex = extremes(f)
        assert ex.min_value == pytest.approx(-1.0 / math.pi, rel=1e-12)
        assert ex.min_point == (0.0, 0.0)
        # ring maximum of the closed form is 2 e^{-3/2} / pi
        assert ex.max_value == pytest.approx(2.0 * math.exp(-1.5) / math.pi, rel=0.05)

    def test_first_occurrence_is_lowest_indices(self):
        g = build_regular(0, 2, 0, 2, 2, 2)
        v = np.array([[1.0, 5.0], [5.0, 1.0]])
        ex = extremes(WignerField(g, v))
        assert ex.max_point == (g.r_centers[0], g.p_centers[1])
        assert ex.min_point == (g.r_centers[0], g.p_centers[0])


class TestSegmentation:
    def test_boundaries_affine(self, fock1_field):
        seg = segment_four(fock1_field)
        vmin = float(fock1_field.values.min())
        vmax = float(fock1_field.values.max())
        want = vmin + (vmax - vmin) * np.arange(5) / 4.0
        assert np.allclose(seg.boundaries, want, rtol=1e-14)

    def test_section_masses_sum_to_abs_mass(self, fock1_field):
        seg = segment_four(fock1_field)
        assert seg.section_abs_mass.sum() == pytest.approx(fock1_field.abs_mass, rel=1e-12)

    def test_known_assignment(self):
        g = build_regular(0, 4, 0, 1, 4, 1)
        v = np.array([[0.0], [1.0], [2.0], [4.0]])
        seg = segment_four(WignerField(g, v))
        # quartiles of [0,4]: [0,1) [1,2) [2,3) [3,4]
        assert list(seg.section_index[:, 0]) == [0, 1, 2, 3]

    def test_constant_field_rejected(self):
        g = build_regular(0, 1, 0, 1, 4, 4)
        with pytest.raises(DegenerateRange):
            segment_four(WignerField(g, np.full((4, 4), 0.7)))


class TestMomentsIo:
    def test_json_round_trip(self, tmp_path, cat1_field):
        m = compute_moments(cat1_field)
        path = tmp_path / "moments.json"
        write_moments(m, path)
        back = read_moments(path)
        assert back == m

    def test_json_has_all_nine_stats(self, fock0_field):
        import json

        m = compute_moments(fock0_field)
        data = json.loads(moments_to_json(m))
        assert sorted(data) == sorted(
            ["r0", "p0", "sigma_r", "sigma_p", "skew_r", "skew_p", "kurt_r", "kurt_p", "negativity"]
        )

    def test_json_byte_stable(self, fock0_field):
        m = compute_moments(fock0_field)
        assert moments_to_json(m) == moments_to_json(m)

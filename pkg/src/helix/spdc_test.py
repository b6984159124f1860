#!/usr/bin/env python3

import math

import numpy as np
import pytest

from helix.exceptions import ConfigError, EmptySpectrumError
from helix.fieldgrid import lg_amplitude, oracle_integrate
from helix.models.crystal import BConvention, CrystalParams, SchmidtParams
from helix.models.grid import Grid, LgParams
from helix.models.pump import PumpSpec, ShiftReference
from helix.models.spectrum import JointSpectrum
from helix.spdc import (
    analytic_schmidt_gaussian,
    azimuthal_schmidt,
    b_parameter,
    band_schmidt,
    calibrate_b_convention,
    conditional_spectrum,
    joint_spectrum,
    overlap_coefficient,
    schmidt_number,
    schmidt_sweep,
    sweep_point,
)
from helix.vortex import pump_at_crystal, shifted_vortex_amplitude

W = 60e-6
RANGE = (-6, 6)
# 离带泄漏随 (h/w)^4 下降，n=256 时约 1.3e-6，守恒相关的检查用默认配置的 512 网格
SHIPPED_GRID = Grid.for_modes([W], l_max=12, n=512)
SHIPPED_RANGE = (-10, 12)


def _band_joint(entries: dict[tuple[int, int], complex], ls_range=(0, 6), li_range=(0, 6)) -> JointSpectrum:
    amps = np.zeros((ls_range[1] - ls_range[0] + 1, li_range[1] - li_range[0] + 1), dtype=complex)
    for (l_s, l_i), value in entries.items():
        amps[l_s - ls_range[0], l_i - li_range[0]] = value
    return JointSpectrum.from_amplitudes(ls_range, li_range, amps)


class TestOverlapCoefficient:
    def test_gaussian_ratio(self, crystal: CrystalParams, spdc_grid: Grid):
        """等腰斑时 |C(1,-1)|²/|C(0,0)|² = (2/3)² = 4/9"""
        pump = pump_at_crystal(PumpSpec(m=0, w=W), W, spdc_grid)
        ratio = abs(overlap_coefficient(pump, 1, -1, crystal)) ** 2 / abs(overlap_coefficient(pump, 0, 0, crystal)) ** 2
        assert ratio == pytest.approx(4 / 9, rel=1e-6)

        spec = PumpSpec(m=0, w=W)

        def integrand(l_s: int, l_i: int):
            signal = LgParams(l=l_s, w=crystal.w_s)
            idler = LgParams(l=l_i, w=crystal.w_i)
            return lambda x, y: (
                shifted_vortex_amplitude(spec, x, y)
                * np.conj(lg_amplitude(signal, x, y))
                * np.conj(lg_amplitude(idler, x, y))
            )

        oracle = (
            abs(oracle_integrate(integrand(1, -1), spdc_grid, 4)) ** 2
            / abs(oracle_integrate(integrand(0, 0), spdc_grid, 4)) ** 2
        )
        assert ratio == pytest.approx(oracle, rel=1e-3)

    def test_gaussian_mirror_symmetry(self, crystal: CrystalParams, spdc_grid: Grid):
        pump = pump_at_crystal(PumpSpec(m=0, w=W), W, spdc_grid)
        for l in range(1, 4):
            assert abs(overlap_coefficient(pump, l, -l, crystal)) == pytest.approx(
                abs(overlap_coefficient(pump, -l, l, crystal)), rel=1e-12
            )

    def test_shifted_pump_oracle(self, crystal: CrystalParams, spdc_grid: Grid):
        """相位奇点处被积函数不光滑，中点和的误差按 h² 收敛，按最大元素衡量"""
        spec = PumpSpec(m=2, shift_ratio=0.5, w=W, shift_reference=ShiftReference.FWHM)
        pump = pump_at_crystal(spec, W, spdc_grid)
        scale = math.sqrt(oracle_integrate(lambda x, y: np.abs(shifted_vortex_amplitude(spec, x, y)) ** 2, spdc_grid, 4).real)
        values = []
        oracles = []
        for l_s, l_i in ((1, 1), (2, 0), (0, 0), (3, -1), (0, 2)):
            signal = LgParams(l=l_s, w=crystal.w_s)
            idler = LgParams(l=l_i, w=crystal.w_i)
            oracle = oracle_integrate(
                lambda x, y, s=signal, i=idler: (
                    shifted_vortex_amplitude(spec, x, y) * np.conj(lg_amplitude(s, x, y) * lg_amplitude(i, x, y))
                ),
                spdc_grid,
                4,
            )
            values.append(overlap_coefficient(pump, l_s, l_i, crystal))
            oracles.append(oracle / scale)
        largest = max(abs(value) for value in oracles)
        for value, oracle in zip(values, oracles, strict=True):
            assert abs(value - oracle) <= 2e-2 * largest


class TestJointSpectrum:
    def test_centered_pump_conserves_oam(self, crystal: CrystalParams):
        pump = pump_at_crystal(PumpSpec(m=6, w=W), W, SHIPPED_GRID)
        joint = joint_spectrum(pump, RANGE, RANGE, crystal)
        off_band = joint.probs[joint.band_matrix != 6].sum()
        assert off_band < 1e-6
        assert joint.probs.sum() == pytest.approx(1.0, abs=1e-9)

    def test_gaussian_symmetry(self, crystal: CrystalParams, spdc_grid: Grid):
        pump = pump_at_crystal(PumpSpec(m=0, w=W), W, spdc_grid)
        joint = joint_spectrum(pump, RANGE, RANGE, crystal)
        probs = joint.probs
        assert np.allclose(probs, probs[::-1, ::-1], rtol=1e-9, atol=1e-15)
        assert np.allclose(probs, probs.T, rtol=1e-9, atol=1e-15)

        diagonal = [joint.probs[l - RANGE[0], -l - RANGE[0]] for l in range(0, 7)]
        assert all(later <= earlier for earlier, later in zip(diagonal, diagonal[1:], strict=False))

    def test_conjugate_consistency(self, crystal: CrystalParams, spdc_grid: Grid):
        pump = pump_at_crystal(PumpSpec(m=2, shift_ratio=0.5, w=W), W, spdc_grid)
        joint = joint_spectrum(pump, RANGE, RANGE, crystal)
        conjugated = JointSpectrum.from_amplitudes(RANGE, RANGE, np.conj(joint.amps))
        assert np.array_equal(joint.probs, conjugated.probs)

    def test_thread_count_does_not_change_result(self, crystal: CrystalParams, spdc_grid: Grid):
        pump = pump_at_crystal(PumpSpec(m=4, shift_ratio=0.75, w=W), W, spdc_grid)
        serial = joint_spectrum(pump, RANGE, RANGE, crystal)
        parallel = joint_spectrum(pump, RANGE, RANGE, crystal, threads=4)
        assert np.array_equal(serial.amps, parallel.amps)

    def test_asymmetric_pump_widens_bands(self, crystal: CrystalParams):
        def band_count(shift: float) -> int:
            spec = PumpSpec(m=6, shift_ratio=shift, w=W, shift_reference=ShiftReference.FWHM)
            pump = pump_at_crystal(spec, W, SHIPPED_GRID)
            joint = joint_spectrum(pump, SHIPPED_RANGE, SHIPPED_RANGE, crystal)
            return sum(1 for weight in joint.band_weights().values() if weight >= 1e-3)

        counts = [band_count(shift) for shift in (0.0, 0.75, 1.25)]
        assert counts[0] == 1
        assert counts[0] < counts[1] < counts[2]

    def test_amplitude_out_of_range(self):
        joint = _band_joint({(2, 0): 1.0})
        assert joint.amplitude(2, 0) == 1.0
        with pytest.raises(ConfigError):
            _ = joint.amplitude(7, 0)


class TestConditionalSpectrum:
    def test_pure_band(self, crystal: CrystalParams):
        pump = pump_at_crystal(PumpSpec(m=6, w=W), W, SHIPPED_GRID)
        joint = joint_spectrum(pump, RANGE, RANGE, crystal)
        conditional = conditional_spectrum(joint, 3)
        assert conditional.weights.sum() == pytest.approx(1.0, abs=1e-9)
        assert conditional.weight(3) >= 1 - 1e-6

    def test_shifted_pump_spreads(self, crystal: CrystalParams, spdc_grid: Grid):
        spec = PumpSpec(m=6, shift_ratio=1.25, w=W, shift_reference=ShiftReference.FWHM)
        joint = joint_spectrum(pump_at_crystal(spec, W, spdc_grid), RANGE, RANGE, crystal)
        conditional = conditional_spectrum(joint, 3)
        assert sum(1 for _, weight in conditional.items() if weight >= 1e-2) > 1

    def test_out_of_range(self):
        with pytest.raises(ConfigError):
            _ = conditional_spectrum(_band_joint({(2, 0): 1.0}), 9)

    def test_empty_row(self):
        with pytest.raises(EmptySpectrumError):
            _ = conditional_spectrum(_band_joint({(2, 0): 1.0}), 1)


class TestSchmidtNumber:
    def test_product_state(self):
        amps = np.outer([1.0, 2.0, 0.5j], [0.3, 1.0, -1.0, 2.0])
        assert schmidt_number(amps) == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("d", range(2, 8))
    def test_uniform_anti_diagonal(self, d: int):
        amps = np.fliplr(np.eye(d)) / math.sqrt(d)
        assert schmidt_number(amps) == pytest.approx(d, abs=1e-9)

    def test_bell_band(self):
        joint = _band_joint({(2, 0): 1 / math.sqrt(2), (0, 2): 1 / math.sqrt(2)})
        assert azimuthal_schmidt(joint) == pytest.approx(2.0, abs=1e-9)

    def test_zero_matrix(self):
        with pytest.raises(EmptySpectrumError):
            _ = schmidt_number(np.zeros((3, 3)))


class TestBandSchmidt:
    def test_uniform_band(self):
        joint = _band_joint({(0, 2): 1.0, (1, 1): 1.0, (2, 0): 1.0})
        band = band_schmidt(joint, 2)
        assert band.k == pytest.approx(3.0, abs=1e-12)
        assert band.weight == pytest.approx(1.0)

    def test_single_band_matches_total(self):
        joint = _band_joint({(0, 4): 0.3, (1, 3): 1.0, (2, 2): 0.7j, (4, 0): -0.2})
        assert band_schmidt(joint, 4).k == pytest.approx(azimuthal_schmidt(joint), abs=1e-9)

    def test_weights(self):
        joint = _band_joint({(0, 2): 1.0, (1, 1): 1.0, (3, 3): math.sqrt(2)})
        assert band_schmidt(joint, 2).weight == pytest.approx(0.5)
        assert band_schmidt(joint, 6).weight == pytest.approx(0.5)
        assert band_schmidt(joint, 6).k == pytest.approx(1.0)

    def test_empty_band(self):
        joint = _band_joint({(2, 0): 1.0})
        with pytest.raises(EmptySpectrumError):
            _ = band_schmidt(joint, 20)
        with pytest.raises(EmptySpectrumError):
            _ = band_schmidt(joint, 5)

    def test_centered_pump_single_band(self, crystal: CrystalParams):
        pump = pump_at_crystal(PumpSpec(m=6, w=W), W, SHIPPED_GRID)
        joint = joint_spectrum(pump, RANGE, RANGE, crystal)
        band = band_schmidt(joint, 6)
        assert band.weight >= 1 - 1e-6
        assert band.k == pytest.approx(azimuthal_schmidt(joint), rel=1e-4)


class TestAnalyticSchmidt:
    def test_calibrated_convention(self, crystal: CrystalParams):
        analytic = analytic_schmidt_gaussian(crystal, SchmidtParams())
        assert analytic.convention == BConvention.L_OVER_4NKP
        assert analytic.k == pytest.approx(2.82, abs=0.05)

    def test_other_conventions(self, crystal: CrystalParams):
        values = {
            convention: analytic_schmidt_gaussian(crystal, SchmidtParams(b_convention=convention)).k
            for convention in BConvention
        }
        assert values[BConvention.L_OVER_KP] == pytest.approx(1.731, abs=1e-3)
        assert values[BConvention.L_OVER_2KP] == pytest.approx(1.677, abs=1e-3)
        assert values[BConvention.L_LAMBDA_OVER_2PI] == pytest.approx(values[BConvention.L_OVER_KP], rel=1e-12)

    def test_minimum_at_matched_waist(self, crystal: CrystalParams):
        sp = SchmidtParams()
        b = b_parameter(crystal, sp.b_convention)
        matched = crystal.model_copy(update={"w_p": 2 * sp.alpha * b})
        assert analytic_schmidt_gaussian(matched, sp).k == pytest.approx(sp.beta, abs=1e-9)
        for factor in (0.5, 0.9, 1.1, 3.0):
            other = crystal.model_copy(update={"w_p": 2 * sp.alpha * b * factor})
            assert analytic_schmidt_gaussian(other, sp).k > sp.beta

    def test_scale_invariance(self, crystal: CrystalParams):
        sp = SchmidtParams()
        # 晶体长度变为 4 倍时 b 翻倍
        scaled = crystal.model_copy(update={"length": 4 * crystal.length, "w_p": 2 * crystal.w_p})
        assert analytic_schmidt_gaussian(scaled, sp).k == pytest.approx(
            analytic_schmidt_gaussian(crystal, sp).k, rel=1e-9
        )

    def test_calibration(self):
        calibration = calibrate_b_convention(SchmidtParams(b_convention=BConvention.L_OVER_KP))
        assert calibration.selected == BConvention.L_OVER_4NKP
        assert set(calibration.table) == set(BConvention)
        assert abs(calibration.table[calibration.selected] - 2.82) < 0.05
        assert all(
            abs(k - 2.82) >= abs(calibration.table[calibration.selected] - 2.82) for k in calibration.table.values()
        )


class TestSchmidtSweep:
    def test_centered_pump_single_band(self, crystal: CrystalParams):
        rows = schmidt_sweep(6, [0.0], crystal, SHIPPED_GRID, RANGE, RANGE)
        assert len(rows) == 1
        row = rows[0]
        assert [band.l_p for band in row.bands] == [6]
        assert row.k_sum == pytest.approx(row.bands[0].k)
        assert row.k_weighted == pytest.approx(row.bands[0].k, rel=1e-5)
        assert row.k_total >= 1

    def test_shift_curve(self, crystal: CrystalParams):
        """p=0 投影下 SVD 的 K_total 随偏移单调下降，而按带求和的 K_sum 随带数增长"""
        shifts = [0.25 * i for i in range(8)]
        rows = schmidt_sweep(
            6, shifts, crystal, SHIPPED_GRID, SHIPPED_RANGE, SHIPPED_RANGE, ShiftReference.FWHM, threads=2
        )
        assert [row.ratio for row in rows] == shifts

        totals = [row.k_total for row in rows]
        assert all(later < earlier for earlier, later in zip(totals, totals[1:], strict=False))
        assert totals[0] == pytest.approx(5.146, abs=1e-2)
        assert totals[-1] == pytest.approx(2.165, abs=1e-2)

        assert len(rows[0].bands) == 1
        assert len(rows[3].bands) > len(rows[0].bands)
        assert rows[3].k_sum > rows[0].k_sum
        for row in rows:
            assert row.k_total >= 1
            assert all(band.k >= 1 - 1e-12 for band in row.bands)

    def test_sweep_point_aggregations(self):
        joint = _band_joint({(0, 2): 1.0, (1, 1): 1.0, (2, 0): 1.0, (3, 3): math.sqrt(3)})
        row = sweep_point(joint, 0.5)
        assert row.ratio == 0.5
        assert [band.l_p for band in row.bands] == [2, 6]
        assert row.k_sum == pytest.approx(4.0)
        assert row.k_weighted == pytest.approx(0.5 * 3 + 0.5 * 1)
        assert row.k_total == pytest.approx(azimuthal_schmidt(joint))

#!/usr/bin/env python3

from __future__ import annotations

import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from loguru import logger

from helix.consts import BAND_WEIGHT_THRESHOLD, K_CALIBRATION_TARGET
from helix.exceptions import ConfigError, EmptySpectrumError
from helix.fieldgrid import inner_product, lg_mode
from helix.models.crystal import BConvention, CrystalParams, SchmidtParams
from helix.models.grid import Grid, LgParams, ScalarField
from helix.models.pump import PumpSpec, ShiftReference
from helix.models.spectrum import JointSpectrum, OamSpectrum
from helix.oamspec import check_l_range
from helix.vortex import pump_at_crystal


def overlap_coefficient(pump: ScalarField, l_s: int, l_i: int, crystal: CrystalParams) -> complex:
    """薄晶近似下的重叠积分 C = ∫ E_p·conj(LG_{l_s,0})·conj(LG_{l_i,0}) d²r"""
    signal = lg_mode(LgParams(l=l_s, w=crystal.w_s), pump.grid)
    idler = lg_mode(LgParams(l=l_i, w=crystal.w_i), pump.grid)
    return inner_product(ScalarField(pump.grid, signal.amp * idler.amp), pump)


def joint_spectrum(
    pump: ScalarField,
    ls_range: tuple[int, int],
    li_range: tuple[int, int],
    crystal: CrystalParams,
    threads: int = 1,
) -> JointSpectrum:
    ls_min, ls_max = check_l_range(ls_range)
    li_min, li_max = check_l_range(li_range)
    grid = pump.grid
    signals = [lg_mode(LgParams(l=l, w=crystal.w_s), grid) for l in range(ls_min, ls_max + 1)]
    idlers = [lg_mode(LgParams(l=l, w=crystal.w_i), grid) for l in range(li_min, li_max + 1)]

    def fill_row(signal: ScalarField) -> np.ndarray:
        # 每个积分独立求和，结果与求值顺序无关
        return np.array([inner_product(ScalarField(grid, signal.amp * idler.amp), pump) for idler in idlers])

    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        rows = list(executor.map(fill_row, signals))

    joint = JointSpectrum.from_amplitudes((ls_min, ls_max), (li_min, li_max), np.array(rows))
    logger.debug(f"联合谱 {len(signals)}×{len(idlers)} 计算完成，总功率 {joint.total_power:.6g}")
    return joint


def conditional_spectrum(joint: JointSpectrum, l_s_fixed: int) -> OamSpectrum:
    """固定信号光 l_s 时闲频光的 OAM 谱"""
    ls_min, ls_max = joint.ls_range
    if not ls_min <= l_s_fixed <= ls_max:
        raise ConfigError(f"固定的 l_s={l_s_fixed} 超出联合谱范围 [{ls_min}, {ls_max}]")

    row = np.abs(joint.amps[l_s_fixed - ls_min]) ** 2
    total = row.sum()
    if total <= 0:
        raise EmptySpectrumError(f"l_s={l_s_fixed} 处没有符合计数")
    li_min, li_max = joint.li_range
    return OamSpectrum(l_min=li_min, l_max=li_max, weights=row / total)


def schmidt_number(amps: np.ndarray) -> float:
    """由奇异值求 K = 1/Σp_i²"""
    sigma = np.linalg.svd(np.asarray(amps, dtype=complex), compute_uv=False)
    power = sigma**2
    total = power.sum()
    if total <= 0:
        raise EmptySpectrumError("振幅矩阵为零，Schmidt 数无定义")
    p = power / total
    return float(1.0 / np.sum(p**2))


def azimuthal_schmidt(joint: JointSpectrum) -> float:
    return schmidt_number(joint.amps)


@dataclass(frozen=True)
class BandSchmidt:
    l_p: int
    weight: float
    k: float


def band_schmidt(joint: JointSpectrum, l_p: int) -> BandSchmidt:
    """单条反对角带 l_s + l_i = l_p 上的 Schmidt 数与带权重"""
    mask = joint.band_matrix == l_p
    if not mask.any():
        raise EmptySpectrumError(f"OAM 带 l_p={l_p} 与联合谱范围不相交")

    # 单条带的奇异值就是各元素的模
    power = np.abs(joint.amps[mask]) ** 2
    band_power = float(power.sum())
    if band_power <= 0:
        raise EmptySpectrumError(f"OAM 带 l_p={l_p} 上振幅全为零")
    k = band_power**2 / float(np.sum(power**2))
    return BandSchmidt(l_p=l_p, weight=band_power / joint.total_power, k=k)


def b_parameter(crystal: CrystalParams, convention: BConvention) -> float:
    k_p = crystal.k_p
    match convention:
        case BConvention.L_OVER_KP:
            return math.sqrt(crystal.length / k_p)
        case BConvention.L_OVER_2KP:
            return math.sqrt(crystal.length / (2.0 * k_p))
        case BConvention.L_LAMBDA_OVER_2PI:
            return math.sqrt(crystal.length * crystal.lambda_p / (2.0 * math.pi))
        case BConvention.L_OVER_4NKP:
            return math.sqrt(crystal.length / (4.0 * crystal.n_p * k_p))


@dataclass(frozen=True)
class AnalyticSchmidt:
    k: float
    b: float
    convention: BConvention


def analytic_schmidt_gaussian(crystal: CrystalParams, sp: SchmidtParams) -> AnalyticSchmidt:
    """高斯泵浦的解析 Schmidt 数 K = β((w_p² + 4α²b²)/(4w_pαb))²"""
    b = b_parameter(crystal, sp.b_convention)
    w = crystal.w_p
    ratio = (w * w + 4.0 * sp.alpha**2 * b * b) / (4.0 * w * sp.alpha * b)
    return AnalyticSchmidt(k=sp.beta * ratio**2, b=b, convention=sp.b_convention)


@dataclass(frozen=True)
class Calibration:
    selected: BConvention
    table: dict[BConvention, float]
    target: float


def calibrate_b_convention(sp: SchmidtParams, target: float = K_CALIBRATION_TARGET) -> Calibration:
    """在默认实验参数下比较各 b 写法，选出 K 最接近 target 的一个"""
    crystal = CrystalParams()
    table = {
        convention: analytic_schmidt_gaussian(crystal, sp.model_copy(update={"b_convention": convention})).k
        for convention in BConvention
    }
    selected = min(table, key=lambda convention: abs(table[convention] - target))
    return Calibration(selected=selected, table=table, target=target)


@dataclass(frozen=True)
class SweepRow:
    ratio: float
    k_total: float
    k_weighted: float
    k_sum: float
    bands: list[BandSchmidt]


def sweep_point(joint: JointSpectrum, ratio: float) -> SweepRow:
    weights = joint.band_weights()
    bands = [band_schmidt(joint, lp) for lp, weight in weights.items() if weight >= BAND_WEIGHT_THRESHOLD]
    return SweepRow(
        ratio=ratio,
        k_total=azimuthal_schmidt(joint),
        k_weighted=sum(band.weight * band.k for band in bands),
        k_sum=sum(band.k for band in bands),
        bands=bands,
    )


def schmidt_sweep(
    m: int,
    shifts: Sequence[float],
    crystal: CrystalParams,
    grid: Grid,
    ls_range: tuple[int, int],
    li_range: tuple[int, int],
    shift_reference: ShiftReference = ShiftReference.WAIST,
    threads: int = 1,
) -> list[SweepRow]:
    def evaluate(ratio: float) -> SweepRow:
        spec = PumpSpec(
            m=m,
            shift_ratio=ratio,
            w=crystal.w_p,
            lambda_p=crystal.lambda_p,
            shift_reference=shift_reference,
        )
        joint = joint_spectrum(pump_at_crystal(spec, crystal.w_p, grid), ls_range, li_range, crystal)
        row = sweep_point(joint, ratio)
        logger.info(f"x_o/w={ratio:.3f}：K_total={row.k_total:.4f}，有效 OAM 带 {len(row.bands)} 条")
        return row

    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        return list(executor.map(evaluate, shifts))

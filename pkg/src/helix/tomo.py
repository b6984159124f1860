#!/usr/bin/env python3

from __future__ import annotations

import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from loguru import logger

from helix.exceptions import ConfigError, ReconstructionError
from helix.models.crystal import CrystalParams
from helix.models.grid import Grid
from helix.models.pump import PumpSpec, ShiftReference
from helix.models.spectrum import JointSpectrum
from helix.models.tomography import CountRecord, DensityMatrix, ProjectorSetting, QubitBasis
from helix.spdc import joint_spectrum
from helix.vortex import pump_at_crystal

_HALF = 1.0 / math.sqrt(2.0)

# 每一臂的信息完备投影组：|l⟩, |0⟩, (|l⟩+|0⟩)/√2, (|l⟩+i|0⟩)/√2
ARM_STATES: tuple[tuple[str, tuple[complex, complex]], ...] = (
    ("l", (1.0, 0.0)),
    ("0", (0.0, 1.0)),
    ("+", (_HALF, _HALF)),
    ("+i", (_HALF, 1j * _HALF)),
)


def measurement_settings() -> list[ProjectorSetting]:
    return [
        ProjectorSetting(label=f"{signal_label}/{idler_label}", signal=signal, idler=idler)
        for signal_label, signal in ARM_STATES
        for idler_label, idler in ARM_STATES
    ]


def projection_probability(joint: JointSpectrum, setting: ProjectorSetting, basis: QubitBasis) -> float:
    """子空间外的分量不进入投影振幅，但保留在归一化中"""
    total = joint.total_power
    if total <= 0:
        raise ReconstructionError("联合谱为零")

    amplitude = 0j
    for a, l_s in enumerate((basis.l, 0)):
        for b, l_i in enumerate((basis.l, 0)):
            coefficient = np.conj(setting.signal[a]) * np.conj(setting.idler[b])
            amplitude += coefficient * joint.amplitude(l_s, l_i)
    return float(abs(amplitude) ** 2 / total)


def run_tomography(
    joint: JointSpectrum,
    basis: QubitBasis,
    counts: int,
    noise: bool = False,
    rng: np.random.Generator | None = None,
) -> list[CountRecord]:
    if counts <= 0:
        raise ConfigError(f"每个设置的计数规模必须为正，当前为 {counts}")
    if noise and rng is None:
        raise ConfigError("开启泊松噪声时必须传入随机数发生器")

    records = []
    for setting in measurement_settings():
        rate = min(max(projection_probability(joint, setting, basis), 0.0), 1.0)
        if noise:
            assert rng is not None
            observed = int(rng.poisson(counts * rate))
        else:
            observed = round(counts * rate)
        records.append(CountRecord(setting=setting, rate=rate, counts=observed, scale=counts))
    return records


def reconstruct(records: Sequence[CountRecord], basis: QubitBasis) -> DensityMatrix:
    """线性反演后裁剪负本征值，再归一化迹"""
    if len(records) != 16:
        raise ReconstructionError("线性反演需要 16 个测量设置", f"实际为 {len(records)} 个")

    design = np.array([np.conj(record.setting.projector).ravel() for record in records])
    frequencies = np.array([record.frequency for record in records], dtype=complex)
    try:
        solution = np.linalg.solve(design, frequencies)
    except np.linalg.LinAlgError as e:
        raise ReconstructionError("测量设计矩阵奇异", str(e)) from e

    rho = solution.reshape(4, 4)
    rho = (rho + rho.conj().T) / 2
    values, vectors = np.linalg.eigh(rho)
    logger.debug(f"线性反演本征值：{np.round(values, 6)}")
    values = np.clip(values, 0.0, None)
    if values.sum() <= 0:
        raise ReconstructionError("裁剪后密度矩阵为零")

    rho = (vectors * values) @ vectors.conj().T / values.sum()
    return DensityMatrix(rho=(rho + rho.conj().T) / 2, basis=basis)


def fidelity(rho: DensityMatrix, basis: QubitBasis) -> float:
    psi = basis.bell_state
    value = float(np.real(np.conj(psi) @ rho.rho @ psi))
    return min(max(value, 0.0), 1.0)


@dataclass(frozen=True)
class FidelityRow:
    ratio: float
    fidelity: float
    density: DensityMatrix


def fidelity_sweep(
    m: int,
    shifts: Sequence[float],
    crystal: CrystalParams,
    grid: Grid,
    ls_range: tuple[int, int],
    li_range: tuple[int, int],
    basis: QubitBasis,
    counts: int,
    noise: bool = False,
    seed: int = 0,
    shift_reference: ShiftReference = ShiftReference.WAIST,
    threads: int = 1,
) -> list[FidelityRow]:
    # 每个偏移量派生独立子种子，结果与线程数无关
    children = np.random.SeedSequence(seed).spawn(len(shifts))

    def evaluate(index: int) -> FidelityRow:
        ratio = shifts[index]
        spec = PumpSpec(
            m=m,
            shift_ratio=ratio,
            w=crystal.w_p,
            lambda_p=crystal.lambda_p,
            shift_reference=shift_reference,
        )
        joint = joint_spectrum(pump_at_crystal(spec, crystal.w_p, grid), ls_range, li_range, crystal)
        rng = np.random.default_rng(children[index])
        density = reconstruct(run_tomography(joint, basis, counts, noise, rng), basis)
        value = fidelity(density, basis)
        logger.info(f"x_o/w={ratio:.3f}：Bell 态保真度 {value:.6f}")
        return FidelityRow(ratio=ratio, fidelity=value, density=density)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        return list(executor.map(evaluate, range(len(shifts))))

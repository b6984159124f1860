#!/usr/bin/env python3

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

import numpy as np
from loguru import logger

from helix.exceptions import ConfigError
from helix.models.grid import Grid, ScalarField
from helix.models.pump import PumpSpec


def shifted_vortex_amplitude(spec: PumpSpec, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """未归一化的逐点复振幅：高斯包络居中，仅相位奇点偏移到 (x_o, 0)"""
    envelope = np.exp(-(x * x + y * y) / spec.w**2)
    return envelope * np.exp(1j * spec.m * np.arctan2(y, x - spec.offset))


def synthesize_shifted_vortex(spec: PumpSpec, grid: Grid) -> ScalarField:
    grid.check_resolves(spec.w)
    if spec.offset >= grid.extent:
        raise ConfigError(f"相位奇点偏移 {spec.offset:.4g} m 超出网格半宽 {grid.extent:.4g} m")

    x, y = grid.mesh
    logger.debug(f"合成涡旋泵浦：m={spec.m}, x_o/w={spec.shift_ratio}, 偏移 {spec.offset:.4g} m")
    source = partial(shifted_vortex_amplitude, spec)
    return ScalarField(grid, source(x, y), source).normalized()


def pump_at_crystal(spec: PumpSpec, w_p: float, grid: Grid) -> ScalarField:
    """聚焦到晶体处的泵浦：保持归一化偏移不变，仅把包络半径换成 w_p"""
    if w_p <= 0:
        raise ConfigError(f"晶体处泵浦腰斑必须为正数，当前为 {w_p}")
    return synthesize_shifted_vortex(spec.with_waist(w_p), grid)


def expected_mean_oam(spec: PumpSpec) -> float:
    """偏心奇点高斯光束关于光轴的平均 OAM 解析值 m·exp(-2x_o²/w²)"""
    return spec.m * math.exp(-2.0 * (spec.offset / spec.w) ** 2)


def far_field(field: ScalarField) -> ScalarField:
    """中心化离散傅里叶变换，返回空间频率网格（单位 1/m）上的单位功率场

    采样点与频率点都取在单元中心，通过 FFT 前后的相位调制实现精确居中。
    """
    n = field.grid.n
    center = n / 2 - 0.5
    ramp = np.exp(2j * np.pi * center * np.arange(n) / n)
    modulation = np.outer(ramp, ramp)

    spectrum = np.fft.fft2(field.amp * modulation) * modulation
    spectrum *= np.exp(-2j * np.pi * center * center / n) ** 2

    reciprocal = Grid(n=n, extent=n / (4.0 * field.grid.extent))
    return ScalarField(reciprocal, spectrum).normalized()


@dataclass(frozen=True)
class DarkCore:
    centroid: tuple[float, float]
    core: tuple[float, float]

    @property
    def offset(self) -> float:
        return math.hypot(self.core[0] - self.centroid[0], self.core[1] - self.centroid[1])


def locate_dark_core(field: ScalarField) -> DarkCore:
    """光强质心与均方根半径内最暗采样点的位置"""
    x, y = field.grid.mesh
    intensity = field.intensity
    total = float(np.sum(intensity))
    cx = float(np.sum(x * intensity) / total)
    cy = float(np.sum(y * intensity) / total)

    distance2 = (x - cx) ** 2 + (y - cy) ** 2
    rms2 = float(np.sum(distance2 * intensity) / total)
    masked = np.where(distance2 <= rms2, intensity, np.inf)
    iy, ix = np.unravel_index(int(np.argmin(masked)), masked.shape)
    return DarkCore(centroid=(cx, cy), core=(float(x[iy, ix]), float(y[iy, ix])))

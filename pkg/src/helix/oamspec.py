#!/usr/bin/env python3

from __future__ import annotations

import math

import numpy as np
from loguru import logger
from scipy.integrate import trapezoid
from scipy.interpolate import RegularGridInterpolator

from helix.consts import CAPTURE_THRESHOLD, MAX_OAM_INDEX, MIN_AZIMUTHAL_SAMPLES
from helix.exceptions import ConfigError, EmptySpectrumError
from helix.models.grid import ScalarField
from helix.models.spectrum import AzimuthalComponents, OamSpectrum


def check_l_range(l_range: tuple[int, int] | list[int]) -> tuple[int, int]:
    l_min, l_max = l_range
    if l_min > l_max:
        raise ConfigError(f"OAM 范围无序：[{l_min}, {l_max}]")
    if max(abs(l_min), abs(l_max)) > MAX_OAM_INDEX:
        raise ConfigError(f"OAM 范围 [{l_min}, {l_max}] 超出支持的 ±{MAX_OAM_INDEX}")
    return l_min, l_max


def azimuthal_samples(l_min: int, l_max: int) -> int:
    required = max(MIN_AZIMUTHAL_SAMPLES, 8 * (abs(l_max) + abs(l_min) + 8))
    return 1 << (required - 1).bit_length()


def _polar_resample(field: ScalarField, n_theta: int) -> tuple[np.ndarray, np.ndarray]:
    grid = field.grid
    radii = np.linspace(0.0, grid.extent - grid.spacing / 2, grid.n // 2)
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    xs = np.outer(radii, np.cos(theta))
    ys = np.outer(radii, np.sin(theta))
    if field.source is not None:
        # 解析场直接在圆环上求值，避免奇点附近的插值误差
        return radii, np.asarray(field.source(xs, ys), dtype=complex)

    points = np.stack([ys.ravel(), xs.ravel()], axis=-1)

    def interpolate(values: np.ndarray) -> np.ndarray:
        # 数组下标为 [y, x]
        interpolator = RegularGridInterpolator(
            (grid.axis, grid.axis), values, method="linear", bounds_error=False, fill_value=0.0
        )
        return interpolator(points)

    samples = interpolate(field.amp.real) + 1j * interpolate(field.amp.imag)
    return radii, samples.reshape(radii.size, n_theta)


def azimuthal_components(field: ScalarField, l_range: tuple[int, int] | list[int]) -> AzimuthalComponents:
    """a_l(r) = (1/2π)∮ E(r, θ) e^{-ilθ} dθ，关于网格中心（光轴）分解"""
    l_min, l_max = check_l_range(l_range)
    n_theta = azimuthal_samples(l_min, l_max)
    radii, samples = _polar_resample(field, n_theta)

    harmonics = np.fft.fft(samples, axis=1) / n_theta
    profiles = {l: harmonics[:, l % n_theta] for l in range(l_min, l_max + 1)}
    ring_power = np.mean(np.abs(samples) ** 2, axis=1)
    return AzimuthalComponents(radii=radii, profiles=profiles, ring_power=ring_power)


def power_spectrum(field: ScalarField, l_range: tuple[int, int] | list[int]) -> OamSpectrum:
    l_min, l_max = check_l_range(l_range)
    components = azimuthal_components(field, (l_min, l_max))
    r = components.radii
    raw = np.array([2.0 * math.pi * trapezoid(np.abs(a) ** 2 * r, r) for a in components.profiles.values()])
    total = 2.0 * math.pi * trapezoid(components.ring_power * r, r)

    if total <= 0 or raw.sum() <= 1e-12 * total:
        raise EmptySpectrumError(f"OAM 范围 [{l_min}, {l_max}] 内没有功率")
    captured = float(raw.sum() / total)
    warning = None
    if captured < CAPTURE_THRESHOLD:
        warning = f"OAM 范围 [{l_min}, {l_max}] 仅覆盖 {captured:.4%} 的功率，请扩大范围"
        logger.warning(warning)
    logger.debug(f"OAM 谱：覆盖率 {captured:.6f}，网格功率 {field.power:.6f}，极坐标功率 {total:.6f}")

    return OamSpectrum(
        l_min=l_min,
        l_max=l_max,
        weights=raw / raw.sum(),
        captured_fraction=captured,
        warning=warning,
        radial_profiles=components,
    )


def polar_power(spectrum: OamSpectrum) -> float:
    """极坐标重采样下的总功率，用于与网格功率比对"""
    if spectrum.radial_profiles is None:
        raise ConfigError("该 OAM 谱未保留径向分量")
    r = spectrum.radial_profiles.radii
    return float(2.0 * math.pi * trapezoid(spectrum.radial_profiles.ring_power * r, r))


def dominant_modes(spectrum: OamSpectrum, mass: float) -> list[int]:
    """按权重降序选出累计权重达到 mass 的最少 l 集合，平局时 |l| 小者优先，再按 l 小者优先"""
    if not 0 < mass <= 1:
        raise ConfigError(f"累计权重必须在 (0, 1] 内，当前为 {mass}")

    ranked = sorted(spectrum.items(), key=lambda item: (-item[1], abs(item[0]), item[0]))
    selected: list[int] = []
    cumulative = 0.0
    for l, weight in ranked:
        selected.append(l)
        cumulative += weight
        if cumulative >= mass - 1e-12:
            break
    return selected

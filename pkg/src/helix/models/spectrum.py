#!/usr/bin/env python3

from __future__ import annotations

from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field

import numpy as np

from helix.exceptions import ConfigError


@dataclass(frozen=True)
class AzimuthalComponents:
    radii: np.ndarray
    profiles: dict[int, np.ndarray]
    ring_power: np.ndarray  # 每个圆环上 |E|² 的角向平均


@dataclass(frozen=True)
class OamSpectrum:
    l_min: int
    l_max: int
    weights: np.ndarray
    captured_fraction: float = 1.0
    warning: str | None = None
    radial_profiles: AzimuthalComponents | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.l_min > self.l_max:
            raise ConfigError(f"OAM 范围无序：[{self.l_min}, {self.l_max}]")
        if len(self.weights) != self.l_max - self.l_min + 1:
            raise ConfigError("权重个数与 OAM 范围不一致")

    @classmethod
    def from_mapping(cls, weights: dict[int, float]) -> OamSpectrum:
        l_min, l_max = min(weights), max(weights)
        values = np.array([weights.get(l, 0.0) for l in range(l_min, l_max + 1)], dtype=float)
        return cls(l_min=l_min, l_max=l_max, weights=values / values.sum())

    @property
    def l_values(self) -> Sequence[int]:
        return range(self.l_min, self.l_max + 1)

    def weight(self, l: int) -> float:
        if not self.l_min <= l <= self.l_max:
            return 0.0
        return float(self.weights[l - self.l_min])

    def items(self) -> Iterator[tuple[int, float]]:
        for l, p in zip(self.l_values, self.weights, strict=True):
            yield l, float(p)

    def mean_l(self) -> float:
        return float(np.dot(np.arange(self.l_min, self.l_max + 1), self.weights))


@dataclass(frozen=True)
class JointSpectrum:
    """双光子 OAM 联合振幅矩阵 C[l_s, l_i]"""

    ls_values: np.ndarray
    li_values: np.ndarray
    amps: np.ndarray

    def __post_init__(self) -> None:
        if self.amps.shape != (self.ls_values.size, self.li_values.size):
            raise ConfigError(f"振幅矩阵形状 {self.amps.shape} 与 OAM 范围不一致")
        if not np.all(np.isfinite(self.amps)):
            raise ConfigError("振幅矩阵中存在非有限值")

    @classmethod
    def from_amplitudes(cls, ls_range: tuple[int, int], li_range: tuple[int, int], amps: np.ndarray) -> JointSpectrum:
        return cls(
            ls_values=np.arange(ls_range[0], ls_range[1] + 1),
            li_values=np.arange(li_range[0], li_range[1] + 1),
            amps=np.asarray(amps, dtype=complex),
        )

    @property
    def ls_range(self) -> tuple[int, int]:
        return int(self.ls_values[0]), int(self.ls_values[-1])

    @property
    def li_range(self) -> tuple[int, int]:
        return int(self.li_values[0]), int(self.li_values[-1])

    @property
    def total_power(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))

    @property
    def probs(self) -> np.ndarray:
        power = np.abs(self.amps) ** 2
        total = power.sum()
        return power / total if total > 0 else power

    @property
    def band_matrix(self) -> np.ndarray:
        """每个元素所属的泵浦 OAM 带 l_p = l_s + l_i"""
        return self.ls_values[:, None] + self.li_values[None, :]

    def band_values(self) -> range:
        return range(int(self.band_matrix.min()), int(self.band_matrix.max()) + 1)

    def band_weights(self) -> dict[int, float]:
        probs = self.probs
        bands = self.band_matrix
        return {lp: float(probs[bands == lp].sum()) for lp in self.band_values()}

    def amplitude(self, l_s: int, l_i: int) -> complex:
        ls_min, ls_max = self.ls_range
        li_min, li_max = self.li_range
        if not (ls_min <= l_s <= ls_max and li_min <= l_i <= li_max):
            raise ConfigError(f"(l_s, l_i)=({l_s}, {l_i}) 超出联合谱范围 [{ls_min}, {ls_max}]×[{li_min}, {li_max}]")
        return complex(self.amps[l_s - ls_min, l_i - li_min])

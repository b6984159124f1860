#!/usr/bin/env python3

from __future__ import annotations

import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from pydantic import Field

from helix.consts import (
    DEFAULT_EXTENT_FACTOR,
    DEFAULT_GRID_N,
    MIN_GRID_SAMPLES,
    MODE_EXTENT_FACTOR,
    MODE_SAMPLES_PER_WAIST,
)
from helix.exceptions import ConfigError
from helix.models.base import BaseModel

PointwiseField = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Grid:
    """横截面上的均匀方形网格，采样点取在网格单元中心，光轴位于网格几何中心"""

    n: int
    extent: float  # 半宽，单位 m

    def __post_init__(self) -> None:
        if self.n < MIN_GRID_SAMPLES or self.n % 2:
            raise ConfigError(f"网格采样数必须是不小于 {MIN_GRID_SAMPLES} 的偶数，当前为 {self.n}")
        if not (math.isfinite(self.extent) and self.extent > 0):
            raise ConfigError(f"网格半宽必须为正数，当前为 {self.extent}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.extent / self.n

    @property
    def cell_area(self) -> float:
        return self.spacing * self.spacing

    @cached_property
    def axis(self) -> np.ndarray:
        axis = (np.arange(self.n) - self.n / 2 + 0.5) * self.spacing
        axis.flags.writeable = False
        return axis

    @cached_property
    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """返回 (X, Y)，数组下标为 [y, x]"""
        x, y = np.meshgrid(self.axis, self.axis, indexing="xy")
        x.flags.writeable = False
        y.flags.writeable = False
        return x, y

    def refined(self, factor: int) -> Grid:
        return Grid(n=self.n * factor, extent=self.extent)

    def check_resolves(self, w: float, l: int = 0, p: int = 0) -> None:
        """检查网格能否分辨腰斑为 w 的 (l, p) 模式"""
        required = MODE_EXTENT_FACTOR * w * math.sqrt(abs(l) + 2 * p + 1)
        if self.extent < required:
            raise ConfigError(
                f"网格半宽 {self.extent:.4g} m 不足以容纳 l={l}, p={p}, w={w:.4g} m 的模式，至少需要 {required:.4g} m"
            )
        if self.spacing > w / MODE_SAMPLES_PER_WAIST:
            raise ConfigError(
                f"网格间隔 {self.spacing:.4g} m 过大，腰斑 w={w:.4g} m 要求不超过 {w / MODE_SAMPLES_PER_WAIST:.4g} m"
            )

    @classmethod
    def for_modes(
        cls,
        waists: Iterable[float],
        l_max: int,
        n: int = DEFAULT_GRID_N,
        extent_factor: float = DEFAULT_EXTENT_FACTOR,
    ) -> Grid:
        """按参与计算的腰斑和最大 |l| 构造默认网格"""
        waists = list(waists)
        if not waists or min(waists) <= 0:
            raise ConfigError("腰斑必须为正数")
        w_max = max(waists)
        extent = max(extent_factor * w_max, MODE_EXTENT_FACTOR * w_max * math.sqrt(abs(l_max) + 1))
        grid = cls(n=n, extent=extent)
        for w in waists:
            grid.check_resolves(w, l_max)
        return grid


@dataclass(frozen=True)
class ScalarField:
    """网格上的复振幅。解析合成的场同时保留逐点表达式 source，极坐标重采样时直接求值"""

    grid: Grid
    amp: np.ndarray
    source: PointwiseField | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.amp.shape != (self.grid.n, self.grid.n):
            raise ConfigError(f"场的形状 {self.amp.shape} 与网格 {self.grid.n}×{self.grid.n} 不一致")
        if not np.all(np.isfinite(self.amp)):
            raise ConfigError("场中存在非有限值")

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.amp) ** 2

    @property
    def power(self) -> float:
        return float(np.sum(self.intensity) * self.grid.cell_area)

    def normalized(self) -> ScalarField:
        power = self.power
        if power <= 0:
            raise ConfigError("场的总功率为零，无法归一化")
        scale = 1.0 / math.sqrt(power)
        source = self.source
        if source is None:
            return ScalarField(self.grid, self.amp * scale)
        return ScalarField(self.grid, self.amp * scale, lambda x, y: source(x, y) * scale)


class LgParams(BaseModel):
    l: int
    p: int = Field(default=0, ge=0)
    w: float = Field(gt=0)

#!/usr/bin/env python3

from __future__ import annotations

import math
from functools import lru_cache, partial

import numpy as np

from helix.exceptions import ConfigError, GridMismatchError
from helix.models.grid import Grid, LgParams, PointwiseField, ScalarField


def laguerre(p: int, alpha: int, x: np.ndarray) -> np.ndarray:
    """广义拉盖尔多项式 L_p^alpha(x)，按 p 的三项递推"""
    prev = np.ones_like(x, dtype=float)
    if p == 0:
        return prev
    curr = 1.0 + alpha - x
    for k in range(1, p):
        prev, curr = curr, ((2 * k + 1 + alpha - x) * curr - (k + alpha) * prev) / (k + 1)
    return curr


def lg_amplitude(params: LgParams, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """束腰平面上 LG_{l,p} 的逐点复振幅"""
    order = abs(params.l)
    r2 = x * x + y * y
    u = 2.0 * r2 / params.w**2
    norm = math.sqrt(2.0 * math.factorial(params.p) / (math.pi * math.factorial(params.p + order))) / params.w
    radial = u ** (order / 2) * laguerre(params.p, order, u) * np.exp(-r2 / params.w**2)
    return norm * radial * np.exp(1j * params.l * np.arctan2(y, x))


@lru_cache(maxsize=64)
def _lg_mode_cached(params: LgParams, grid: Grid) -> ScalarField:
    x, y = grid.mesh
    amp = lg_amplitude(params, x, y)
    amp.flags.writeable = False
    return ScalarField(grid, amp, partial(lg_amplitude, params))


def lg_mode(params: LgParams, grid: Grid) -> ScalarField:
    grid.check_resolves(params.w, params.l, params.p)
    return _lg_mode_cached(params, grid)


def inner_product(a: ScalarField, b: ScalarField) -> complex:
    """∫ a*(r) b(r) d²r，中点黎曼和"""
    if a.grid != b.grid:
        raise GridMismatchError(f"网格不一致：{a.grid} 与 {b.grid}")
    return complex(np.sum(np.conj(a.amp) * b.amp) * a.grid.cell_area)


def oracle_integrate(fn: PointwiseField, grid: Grid, refinement: int) -> complex:
    """在加密 refinement 倍的网格上逐点求同一积分，仅供测试校验离散误差"""
    if refinement < 2:
        raise ConfigError(f"加密倍数必须不小于 2，当前为 {refinement}")
    fine = grid.refined(refinement)
    x, y = fine.mesh
    return complex(np.sum(fn(x, y)) * fine.cell_area)

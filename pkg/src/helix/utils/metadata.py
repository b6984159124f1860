#!/usr/bin/env python3

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
import scipy

from helix.consts import VERSION
from helix.utils.formatter import format_number

if TYPE_CHECKING:
    from helix.experiment import ExperimentConfig
    from helix.models.grid import Grid


class Metadata:
    @staticmethod
    def generate(config: ExperimentConfig, grid: Grid | None = None, **extra: object) -> dict[str, str]:
        """输出文件头部的元数据，不含时间戳等随运行变化的内容"""
        data = {
            "config_sha256": config.checksum(),
            "helix_version": VERSION,
            "numpy_version": np.__version__,
            "scipy_version": scipy.__version__,
            "b_convention": config.schmidt.b_convention.value,
        }
        if grid is not None:
            data["grid_n"] = str(grid.n)
            data["grid_extent"] = format_number(grid.extent)
            data["grid_spacing"] = format_number(grid.spacing)
        for key, value in extra.items():
            data[key] = format_number(value) if isinstance(value, float) else str(value)
        return data

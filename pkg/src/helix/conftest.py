import os
from pathlib import Path

import pytest

from helix.experiment import ExperimentConfig
from helix.models.crystal import CrystalParams
from helix.models.grid import Grid

SCRIPT_DIR = Path(__file__).parent.resolve()
BASE_DIR = SCRIPT_DIR.parent.parent

os.chdir(BASE_DIR)

W_P = 60e-6


@pytest.fixture
def crystal() -> CrystalParams:
    return CrystalParams()


@pytest.fixture
def spdc_grid() -> Grid:
    """足以分辨 |l| ≤ 6 的 60 μm 模式的小网格"""
    return Grid.for_modes([W_P], l_max=6, n=192)


@pytest.fixture
def default_config() -> ExperimentConfig:
    return ExperimentConfig.from_file(BASE_DIR / "helix.yaml")

#!/usr/bin/env python3

import math

VERSION = "0.1.0"

DEFAULT_CONFIG_FILENAME = "helix.yaml"

# 网格
MIN_GRID_SAMPLES = 16
DEFAULT_GRID_N = 512
DEFAULT_EXTENT_FACTOR = 6.0
DEFAULT_FAR_FIELD_EXTENT_FACTOR = 16.0
# 模式需要 extent ≥ 4·w·sqrt(|l|+2p+1)，采样间隔 ≤ w/8
MODE_EXTENT_FACTOR = 4.0
MODE_SAMPLES_PER_WAIST = 8

# OAM 分解
MAX_OAM_INDEX = 12
MAX_SPP_ORDER = 12
MIN_AZIMUTHAL_SAMPLES = 256
CAPTURE_THRESHOLD = 0.999

# 高斯光强 exp(-2r²/w²) 的半高半径与 w 之比
FWHM_RADIUS_FACTOR = math.sqrt(math.log(2) / 2)

# Schmidt 数
BAND_WEIGHT_THRESHOLD = 1e-3
K_CALIBRATION_TARGET = 2.82

# 退出码
EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2

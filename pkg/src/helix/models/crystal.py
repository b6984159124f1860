#!/usr/bin/env python3

from __future__ import annotations

import math
from enum import Enum
from typing import Self

from pydantic import Field, model_validator

from helix.models.base import BaseModel


class BConvention(Enum):
    """由晶体长度 L 与泵浦波矢 k_p 导出 b 的几种写法"""

    L_OVER_KP = "l-over-kp"  # sqrt(L/k_p)
    L_OVER_2KP = "l-over-2kp"  # sqrt(L/(2k_p))
    L_LAMBDA_OVER_2PI = "l-lambda-over-2pi"  # sqrt(L·λ_p/(2π))
    L_OVER_4NKP = "l-over-4nkp"  # sqrt(L/(4·n_p·k_p))，晶体内波矢

    @property
    def formula(self) -> str:
        return {
            BConvention.L_OVER_KP: "sqrt(L/k_p)",
            BConvention.L_OVER_2KP: "sqrt(L/(2k_p))",
            BConvention.L_LAMBDA_OVER_2PI: "sqrt(L*lambda_p/(2pi))",
            BConvention.L_OVER_4NKP: "sqrt(L/(4n_p*k_p))",
        }[self]


class CrystalParams(BaseModel):
    length: float = Field(default=30e-3, gt=0)
    lambda_p: float = Field(default=405e-9, gt=0)
    lambda_s: float = Field(default=810e-9, gt=0)
    lambda_i: float = Field(default=810e-9, gt=0)
    w_p: float = Field(default=60e-6, gt=0)
    w_s: float = Field(default=60e-6, gt=0)
    w_i: float = Field(default=60e-6, gt=0)
    n_p: float = Field(default=1.80, ge=1)
    # 仅记录，假定完美相位匹配
    poling_period: float | None = Field(default=None, gt=0)
    temperature: float | None = None

    @model_validator(mode="after")
    def validate_energy_conservation(self) -> Self:
        expected = 1.0 / self.lambda_s + 1.0 / self.lambda_i
        if abs(1.0 / self.lambda_p - expected) > 1e-9 * (1.0 / self.lambda_p):
            raise ValueError(
                f"波长不满足能量守恒：1/λ_p={1.0 / self.lambda_p:.6g}，1/λ_s+1/λ_i={expected:.6g}"
            )
        return self

    @property
    def k_p(self) -> float:
        return 2.0 * math.pi / self.lambda_p

    @property
    def gamma(self) -> float:
        return self.w_p / self.w_i


class SchmidtParams(BaseModel):
    alpha: float = Field(default=0.85, gt=0)
    beta: float = Field(default=1.65, gt=0)
    b_convention: BConvention = BConvention.L_OVER_4NKP

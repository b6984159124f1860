#!/usr/bin/env python3

from __future__ import annotations

from enum import Enum

from pydantic import Field

from helix.consts import FWHM_RADIUS_FACTOR, MAX_SPP_ORDER
from helix.models.base import BaseModel


class ShiftReference(Enum):
    WAIST = "waist"  # x_o = shift_ratio·w
    FWHM = "fwhm"  # x_o = shift_ratio·(光强半高半径)


class PumpSpec(BaseModel):
    m: int = Field(ge=0, le=MAX_SPP_ORDER)
    shift_ratio: float = Field(default=0.0, ge=0)
    w: float = Field(gt=0)
    lambda_p: float = Field(default=405e-9, gt=0)
    shift_reference: ShiftReference = ShiftReference.WAIST

    @property
    def offset(self) -> float:
        """相位奇点相对光轴的 x 方向偏移，单位 m"""
        scale = FWHM_RADIUS_FACTOR if self.shift_reference == ShiftReference.FWHM else 1.0
        return self.shift_ratio * self.w * scale

    def with_waist(self, w: float) -> PumpSpec:
        return PumpSpec(
            m=self.m,
            shift_ratio=self.shift_ratio,
            w=w,
            lambda_p=self.lambda_p,
            shift_reference=self.shift_reference,
        )

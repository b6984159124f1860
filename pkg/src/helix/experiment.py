#!/usr/bin/env python3

from __future__ import annotations

from pathlib import Path
from typing import Any, Literal, Self

import yaml
from loguru import logger
from pydantic import Field, ValidationError, field_validator, model_validator

from helix.consts import (
    DEFAULT_EXTENT_FACTOR,
    DEFAULT_FAR_FIELD_EXTENT_FACTOR,
    DEFAULT_GRID_N,
    MAX_OAM_INDEX,
    MAX_SPP_ORDER,
    MIN_GRID_SAMPLES,
)
from helix.exceptions import ConfigError
from helix.models.base import BaseModel
from helix.models.crystal import BConvention, CrystalParams, SchmidtParams
from helix.models.grid import Grid
from helix.models.pump import ShiftReference
from helix.models.tomography import QubitBasis
from helix.utils.checksummer import Checksummer

LRange = tuple[int, int]


def _validate_orders(orders: list[int]) -> list[int]:
    for m in orders:
        if not 0 <= m <= MAX_SPP_ORDER:
            raise ValueError(f"SPP 阶数 {m} 超出支持范围 [0, {MAX_SPP_ORDER}]")
    return orders


def _validate_shifts(shifts: list[float]) -> list[float]:
    if not shifts:
        raise ValueError("偏移列表不能为空")
    for shift in shifts:
        if shift < 0:
            raise ValueError(f"偏移量必须非负，当前为 {shift}")
    return shifts


class PumpSection(BaseModel):
    orders: list[int] = Field(default_factory=lambda: [2, 4, 6])
    shifts: list[float] = Field(default_factory=lambda: [0.0, 0.5])
    w_g: float = Field(default=1.2e-3, gt=0)
    lambda_p: float = Field(default=405e-9, gt=0)
    shift_reference: ShiftReference = ShiftReference.FWHM

    @field_validator("orders")
    def validate_orders(cls, v: list[int]) -> list[int]:
        if not v:
            raise ValueError("SPP 阶数列表不能为空")
        return _validate_orders(v)

    @field_validator("shifts")
    def validate_shifts(cls, v: list[float]) -> list[float]:
        return _validate_shifts(v)


class CrystalSection(BaseModel):
    length: float = Field(default=30e-3, gt=0)
    w_p: float = Field(default=60e-6, gt=0)
    w_s: float = Field(default=60e-6, gt=0)
    w_i: float = Field(default=60e-6, gt=0)
    lambda_s: float = Field(default=810e-9, gt=0)
    lambda_i: float = Field(default=810e-9, gt=0)
    n_p: float = Field(default=1.80, ge=1)
    poling_period: float | None = Field(default=None, gt=0)
    temperature: float | None = None


class NumericsSection(BaseModel):
    grid_n: int = DEFAULT_GRID_N
    extent_factor: float = Field(default=DEFAULT_EXTENT_FACTOR, gt=0)
    far_field_extent_factor: float = Field(default=DEFAULT_FAR_FIELD_EXTENT_FACTOR, gt=0)
    ls_range: LRange = (-10, 12)
    li_range: LRange = (-10, 12)
    pump_l_range: LRange = (-MAX_OAM_INDEX, MAX_OAM_INDEX)

    @field_validator("grid_n")
    def validate_grid_n(cls, v: int) -> int:
        if v < MIN_GRID_SAMPLES or v % 2:
            raise ValueError(f"网格采样数必须是不小于 {MIN_GRID_SAMPLES} 的偶数")
        return v

    @field_validator("ls_range", "li_range", "pump_l_range")
    def validate_range(cls, v: LRange) -> LRange:
        l_min, l_max = v
        if l_min > l_max:
            raise ValueError(f"OAM 范围无序：[{l_min}, {l_max}]")
        if max(abs(l_min), abs(l_max)) > MAX_OAM_INDEX:
            raise ValueError(f"OAM 范围超出支持的 ±{MAX_OAM_INDEX}")
        return v

    @property
    def l_max(self) -> int:
        return max(abs(l) for l in (*self.ls_range, *self.li_range))


class SpiralSection(BaseModel):
    m: int = Field(default=6, ge=0, le=MAX_SPP_ORDER)
    shifts: list[float] = Field(default_factory=lambda: [0.0, 0.75, 1.25])
    fixed_ls: int = 3

    @field_validator("shifts")
    def validate_shifts(cls, v: list[float]) -> list[float]:
        return _validate_shifts(v)


class SchmidtSection(BaseModel):
    m: int = Field(default=6, ge=0, le=MAX_SPP_ORDER)
    shifts: list[float] = Field(default_factory=lambda: [0.25 * i for i in range(8)])
    alpha: float = Field(default=0.85, gt=0)
    beta: float = Field(default=1.65, gt=0)
    b_convention: BConvention = BConvention.L_OVER_4NKP

    @field_validator("shifts")
    def validate_shifts(cls, v: list[float]) -> list[float]:
        return _validate_shifts(v)

    @property
    def params(self) -> SchmidtParams:
        return SchmidtParams(alpha=self.alpha, beta=self.beta, b_convention=self.b_convention)


class TomoSection(BaseModel):
    m: int = Field(default=2, ge=0, le=MAX_SPP_ORDER)
    l: int = 2
    shifts: list[float] = Field(default_factory=lambda: [0.0, 0.25, 0.5])
    counts: int = Field(default=100_000, gt=0)
    noise: bool = False
    seed: int = Field(default=0, ge=0, lt=2**64)

    @field_validator("l")
    def validate_l(cls, v: int) -> int:
        if v == 0:
            raise ValueError("子空间的 OAM 指标 l 不能为 0")
        return v

    @field_validator("shifts")
    def validate_shifts(cls, v: list[float]) -> list[float]:
        return _validate_shifts(v)

    @property
    def basis(self) -> QubitBasis:
        return QubitBasis(l=self.l)


class OutputSection(BaseModel):
    directory: Path = Path("out")
    formats: list[Literal["csv", "json"]] = Field(default_factory=lambda: ["csv", "json"], min_length=1)


class ExperimentConfig(BaseModel):
    pump: PumpSection = Field(default_factory=PumpSection)
    crystal: CrystalSection = Field(default_factory=CrystalSection)
    numerics: NumericsSection = Field(default_factory=NumericsSection)
    spiral: SpiralSection = Field(default_factory=SpiralSection)
    schmidt: SchmidtSection = Field(default_factory=SchmidtSection)
    tomo: TomoSection = Field(default_factory=TomoSection)
    output: OutputSection = Field(default_factory=OutputSection)

    @model_validator(mode="after")
    def validate_cross_sections(self) -> Self:
        try:
            _ = self.crystal_params
        except ValidationError as e:
            raise ValueError(e.errors()[0]["msg"]) from e

        ls_min, ls_max = self.numerics.ls_range
        if not ls_min <= self.spiral.fixed_ls <= ls_max:
            raise ValueError(f"spiral.fixed_ls={self.spiral.fixed_ls} 不在 numerics.ls_range 内")
        for name, (l_min, l_max) in (("ls_range", self.numerics.ls_range), ("li_range", self.numerics.li_range)):
            if not (l_min <= 0 <= l_max and l_min <= self.tomo.l <= l_max):
                raise ValueError(f"层析子空间 {{0, {self.tomo.l}}} 不在 numerics.{name} 内")
        return self

    @property
    def crystal_params(self) -> CrystalParams:
        return CrystalParams(lambda_p=self.pump.lambda_p, **self.crystal.model_dump())

    def spdc_grid(self) -> Grid:
        crystal = self.crystal
        return Grid.for_modes(
            waists=(crystal.w_p, crystal.w_s, crystal.w_i),
            l_max=self.numerics.l_max,
            n=self.numerics.grid_n,
            extent_factor=self.numerics.extent_factor,
        )

    def synthesis_grid(self) -> Grid:
        """SPP 平面的网格，半宽取得足够大以细致采样远场"""
        grid = Grid(n=self.numerics.grid_n, extent=self.numerics.far_field_extent_factor * self.pump.w_g)
        grid.check_resolves(self.pump.w_g)
        return grid

    def checksum(self) -> str:
        return Checksummer.of_payload(self.model_dump(mode="json"))

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.model_dump(mode="json"), sort_keys=False, allow_unicode=True)

    @classmethod
    def from_file(cls, path: Path) -> ExperimentConfig:
        if not path.exists():
            raise ConfigError(f"未找到实验配置文件 {path}")
        return cls.from_text(path.read_text(encoding="utf-8"), str(path))

    @classmethod
    def from_text(cls, text: str, source: str = "<string>") -> ExperimentConfig:
        try:
            node = yaml.compose(text)
            data: Any = yaml.safe_load(text)
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            line = f":{mark.line + 1}" if mark is not None else ""
            raise ConfigError(f"{source}{line}: YAML 语法错误：{e}") from e

        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise ConfigError(f"{source}:1: 实验配置顶层必须是映射")

        try:
            config = cls.model_validate(data)
        except ValidationError as e:
            messages = []
            for error in e.errors():
                loc = tuple(error["loc"])
                path = ".".join(str(part) for part in loc) or "<root>"
                messages.append(f"{source}:{_locate_line(node, loc)}: {path}: {error['msg']}")
            raise ConfigError("实验配置校验失败：\n" + "\n".join(messages)) from e

        logger.debug(f"已加载实验配置 {source}，校验和 {config.checksum()[:12]}")
        return config


def _locate_line(node: yaml.Node | None, loc: tuple[Any, ...]) -> int:
    """沿字段路径在 YAML 节点树中查找行号，找不到时返回最近的父节点所在行"""
    if node is None:
        return 1
    for key in loc:
        if isinstance(node, yaml.MappingNode):
            child = next((value for name, value in node.value if name.value == key), None)
            if child is None:
                break
            node = child
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            node = node.value[key]
        else:
            break
    return node.start_mark.line + 1

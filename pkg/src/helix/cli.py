#!/usr/bin/env python3

from __future__ import annotations

import sys
import time
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from loguru import logger

from helix.consts import BAND_WEIGHT_THRESHOLD, EXIT_RUNTIME, EXIT_VALIDATION
from helix.exceptions import ConfigError
from helix.experiment import ExperimentConfig
from helix.models.pump import PumpSpec
from helix.models.spectrum import OamSpectrum
from helix.oamspec import dominant_modes, power_spectrum
from helix.spdc import (
    analytic_schmidt_gaussian,
    calibrate_b_convention,
    conditional_spectrum,
    joint_spectrum,
    schmidt_sweep,
)
from helix.tomo import FidelityRow, fidelity_sweep
from helix.utils.formatter import format_duration, format_shift
from helix.utils.metadata import Metadata
from helix.utils.writer import ResultWriter
from helix.vortex import far_field, pump_at_crystal, synthesize_shifted_vortex


@dataclass
class RunContext:
    config: ExperimentConfig
    output_dir: Path
    threads: int = 1
    config_path: Path | None = None
    persist: bool = False

    def writer(self) -> ResultWriter:
        return ResultWriter(self.output_dir, self.config.output.formats)


def _spectrum_rows(spectrum: OamSpectrum) -> list[tuple[int, float]]:
    return list(spectrum.items())


def cmd_pump_spectrum(ctx: RunContext) -> list[Path]:
    """SPP 平面的偏心涡旋：远场光强与 OAM 谱"""
    config = ctx.config
    grid = config.synthesis_grid()
    writer = ctx.writer()
    cases = [(m, shift) for m in config.pump.orders for shift in config.pump.shifts]

    def evaluate(case: tuple[int, float]):
        m, shift = case
        spec = PumpSpec(
            m=m,
            shift_ratio=shift,
            w=config.pump.w_g,
            lambda_p=config.pump.lambda_p,
            shift_reference=config.pump.shift_reference,
        )
        field = synthesize_shifted_vortex(spec, grid)
        return spec, far_field(field), power_spectrum(field, config.numerics.pump_l_range)

    with ThreadPoolExecutor(max_workers=ctx.threads) as executor:
        results = list(executor.map(evaluate, cases))

    for spec, far, spectrum in results:
        stem = f"pump_m{spec.m}_shift{format_shift(spec.shift_ratio)}"
        logger.info(f"m={spec.m}, x_o/w_G={spec.shift_ratio}：主导模式 {dominant_modes(spectrum, 0.9)}")
        _ = writer.write_csv(
            f"{stem}_farfield.csv",
            Metadata.generate(
                config,
                far.grid,
                quantity="far-field intensity, row-major [y, x], spatial frequency grid in 1/m",
                m=spec.m,
                shift_ratio=spec.shift_ratio,
            ),
            [f"x{i}" for i in range(far.grid.n)],
            (list(row) for row in far.intensity.astype(float)),
        )
        _ = writer.write_csv(
            f"{stem}_spectrum.csv",
            Metadata.generate(
                config,
                grid,
                m=spec.m,
                shift_ratio=spec.shift_ratio,
                singularity_offset_m=spec.offset,
                captured_fraction=spectrum.captured_fraction,
                mean_l=spectrum.mean_l(),
            ),
            ["l", "P_l"],
            _spectrum_rows(spectrum),
        )
    return writer.written


def cmd_spiral_spectrum(ctx: RunContext) -> list[Path]:
    """双光子联合谱与固定 l_s 的条件谱"""
    config = ctx.config
    crystal = config.crystal_params
    grid = config.spdc_grid()
    writer = ctx.writer()
    numerics = config.numerics
    spiral = config.spiral

    def evaluate(shift: float):
        spec = PumpSpec(
            m=spiral.m,
            shift_ratio=shift,
            w=config.pump.w_g,
            lambda_p=crystal.lambda_p,
            shift_reference=config.pump.shift_reference,
        )
        pump = pump_at_crystal(spec, crystal.w_p, grid)
        joint = joint_spectrum(pump, numerics.ls_range, numerics.li_range, crystal)
        return shift, power_spectrum(pump, numerics.pump_l_range), joint

    with ThreadPoolExecutor(max_workers=ctx.threads) as executor:
        results = list(executor.map(evaluate, spiral.shifts))

    for shift, pump_spectrum, joint in results:
        stem = f"m{spiral.m}_shift{format_shift(shift)}"
        bands = [lp for lp, weight in joint.band_weights().items() if weight >= BAND_WEIGHT_THRESHOLD]
        logger.info(f"x_o/w_G={shift}：有效 OAM 带 {bands}")
        _ = writer.write_csv(
            f"joint_{stem}.csv",
            Metadata.generate(config, grid, quantity="coincidence probability P(l_s, l_i)", shift_ratio=shift),
            ["l_s\\l_i", *(str(l) for l in joint.li_values)],
            ([int(l_s), *row] for l_s, row in zip(joint.ls_values, joint.probs.astype(float).tolist(), strict=True)),
        )
        conditional = conditional_spectrum(joint, spiral.fixed_ls)
        _ = writer.write_csv(
            f"conditional_{stem}_ls{spiral.fixed_ls}.csv",
            Metadata.generate(config, grid, shift_ratio=shift, fixed_ls=spiral.fixed_ls),
            ["l_i", "P_l_i"],
            _spectrum_rows(conditional),
        )
        _ = writer.write_csv(
            f"pump_crystal_{stem}.csv",
            Metadata.generate(config, grid, shift_ratio=shift, captured_fraction=pump_spectrum.captured_fraction),
            ["l", "P_l"],
            _spectrum_rows(pump_spectrum),
        )
    return writer.written


def cmd_schmidt(ctx: RunContext) -> list[Path]:
    """Schmidt 数随泵浦非对称度的变化，以及高斯泵浦的解析值"""
    config = ctx.config
    crystal = config.crystal_params
    grid = config.spdc_grid()
    writer = ctx.writer()

    rows = schmidt_sweep(
        config.schmidt.m,
        config.schmidt.shifts,
        crystal,
        grid,
        config.numerics.ls_range,
        config.numerics.li_range,
        config.pump.shift_reference,
        ctx.threads,
    )
    analytic = analytic_schmidt_gaussian(crystal, config.schmidt.params)
    logger.info(f"高斯泵浦解析 Schmidt 数 K={analytic.k:.4f}（b={analytic.b:.4e} m，{analytic.convention.formula}）")

    table = []
    for row in rows:
        table.extend((row.ratio, band.l_p, band.weight, band.k) for band in row.bands)
        total_weight = sum(band.weight for band in row.bands)
        table.append((row.ratio, "TOTAL_SVD", total_weight, row.k_total))
        table.append((row.ratio, "TOTAL_WEIGHTED", total_weight, row.k_weighted))
        table.append((row.ratio, "TOTAL_SUM", total_weight, row.k_sum))

    _ = writer.write_csv(
        f"schmidt_sweep_m{config.schmidt.m}.csv",
        Metadata.generate(config, grid, m=config.schmidt.m, analytic_gaussian_k=analytic.k),
        ["ratio", "band", "weight", "K"],
        table,
    )
    _ = writer.write_csv(
        "schmidt_analytic.csv",
        Metadata.generate(config, None),
        ["b_convention", "b_m", "K"],
        [(analytic.convention.value, analytic.b, analytic.k)],
    )
    return writer.written


def _density_payload(row: FidelityRow, config: ExperimentConfig) -> dict[str, object]:
    rho = row.density.rho
    return {
        "basis": row.density.basis.labels,
        "real": np.real(rho).tolist(),
        "imag": np.imag(rho).tolist(),
        "fidelity": row.fidelity,
        "purity": row.density.purity,
        "metadata": Metadata.generate(config, None, m=config.tomo.m, shift_ratio=row.ratio),
    }


def cmd_tomography(ctx: RunContext) -> list[Path]:
    """两比特 OAM 层析与 Bell 态保真度"""
    config = ctx.config
    crystal = config.crystal_params
    grid = config.spdc_grid()
    writer = ctx.writer()
    tomo = config.tomo

    rows = fidelity_sweep(
        tomo.m,
        tomo.shifts,
        crystal,
        grid,
        config.numerics.ls_range,
        config.numerics.li_range,
        tomo.basis,
        tomo.counts,
        tomo.noise,
        tomo.seed,
        config.pump.shift_reference,
        ctx.threads,
    )
    for row in rows:
        _ = writer.write_json(f"density_m{tomo.m}_shift{format_shift(row.ratio)}.json", _density_payload(row, config))
    _ = writer.write_csv(
        f"fidelity_sweep_m{tomo.m}.csv",
        Metadata.generate(config, grid, m=tomo.m, l=tomo.l, counts=tomo.counts, noise=tomo.noise, seed=tomo.seed),
        ["ratio", "F"],
        [(row.ratio, row.fidelity) for row in rows],
    )
    return writer.written


def cmd_calibrate_b(ctx: RunContext) -> list[Path]:
    """在默认实验参数下选出最接近 K=2.82 的 b 写法"""
    config = ctx.config
    calibration = calibrate_b_convention(config.schmidt.params)
    writer = ctx.writer()

    print(f"{'b_convention':20} {'formula':24} {'K':>10}")
    for convention, k in calibration.table.items():
        marker = " *" if convention == calibration.selected else ""
        print(f"{convention.value:20} {convention.formula:24} {k:10.4f}{marker}")
    fragment = f"schmidt:\n  b_convention: {calibration.selected.value}\n"
    print(fragment, end="")

    _ = writer.write_csv(
        "calibrate_b.csv",
        Metadata.generate(config, None, target_k=calibration.target, selected=calibration.selected.value),
        ["b_convention", "formula", "K"],
        [(convention.value, convention.formula, k) for convention, k in calibration.table.items()],
    )
    _ = writer.write_text("calibrate_b.yaml", fragment)

    if ctx.persist and ctx.config_path is not None:
        updated = config.model_copy(
            update={"schmidt": config.schmidt.model_copy(update={"b_convention": calibration.selected})}
        )
        _ = ctx.config_path.write_text(updated.to_yaml(), encoding="utf-8")
        logger.info(f"已将 b_convention={calibration.selected.value} 写回 {ctx.config_path}")
    return writer.written


def cmd_validate(ctx: RunContext) -> list[Path]:
    config = ctx.config
    _ = config.spdc_grid()
    _ = config.synthesis_grid()
    logger.info(f"实验配置有效，校验和 {config.checksum()}")
    return []


COMMANDS: dict[str, Callable[[RunContext], list[Path]]] = {
    "pump-spectrum": cmd_pump_spectrum,
    "spiral-spectrum": cmd_spiral_spectrum,
    "schmidt": cmd_schmidt,
    "tomography": cmd_tomography,
    "calibrate-b": cmd_calibrate_b,
    "validate": cmd_validate,
}


def execute_command(name: str, ctx: RunContext) -> list[Path]:
    """执行子命令，配置错误以退出码 1 结束，运行期错误以退出码 2 结束"""
    start = time.perf_counter()
    logger.info(f"开始执行 {name}")
    try:
        written = COMMANDS[name](ctx)
    except ConfigError as e:
        logger.error(str(e))
        sys.exit(EXIT_VALIDATION)
    except Exception as e:
        logger.exception(f"执行 {name} 失败：{e}")
        sys.exit(EXIT_RUNTIME)

    logger.success(f"{name} 完成，共写入 {len(written)} 个文件，耗时 {format_duration(time.perf_counter() - start)}")
    return written

#!/usr/bin/env python3

import argparse
import signal
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import cast

from loguru import logger
from pydantic import ValidationError

from helix.cli import COMMANDS, RunContext, execute_command
from helix.config import LogLevel, Settings
from helix.consts import DEFAULT_CONFIG_FILENAME, EXIT_VALIDATION
from helix.exceptions import ConfigError
from helix.experiment import ExperimentConfig


def _signal_handler(signum: int, _) -> None:
    if signum == signal.SIGINT:
        logger.info("用户主动中断执行")
    sys.exit(128 + signum)


@dataclass
class HelixArgs(argparse.Namespace):
    command: str
    config: str
    out: str | None
    seed: int | None
    threads: int | None
    log_level: str | None
    persist: bool


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(description="Helix - 非对称涡旋泵浦 SPDC 的 OAM 本征模仿真")
    _ = parser.add_argument(
        "command",
        choices=list(COMMANDS),
        help="要执行的子命令",
    )
    _ = parser.add_argument(
        "--config",
        "-c",
        default=DEFAULT_CONFIG_FILENAME,
        help="实验配置文件路径",
    )
    _ = parser.add_argument(
        "--out",
        "-o",
        help="输出目录，覆盖配置中的 output.directory",
    )
    _ = parser.add_argument(
        "--seed",
        type=int,
        help="泊松噪声的随机种子，覆盖配置中的 tomo.seed",
    )
    _ = parser.add_argument(
        "--threads",
        "-j",
        type=int,
        help="扫描点并行的线程数",
    )
    _ = parser.add_argument(
        "--log-level",
        choices=[level.value for level in LogLevel],
        help="设置日志等级",
    )
    _ = parser.add_argument(
        "--persist",
        action="store_true",
        help="calibrate-b 时把选出的 b_convention 写回配置文件",
    )

    return parser.parse_args(argv)


def load_context(args: HelixArgs, settings: Settings) -> RunContext:
    config_path = Path(args.config).expanduser()
    config = ExperimentConfig.from_file(config_path)

    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise ConfigError(f"随机种子必须在 [0, 2^64) 内，当前为 {args.seed}")
        config = config.model_copy(update={"tomo": config.tomo.model_copy(update={"seed": args.seed})})

    threads = args.threads if args.threads is not None else settings.threads
    if threads < 1:
        raise ConfigError(f"线程数必须为正，当前为 {threads}")

    return RunContext(
        config=config,
        output_dir=Path(args.out) if args.out else config.output.directory,
        threads=threads,
        config_path=config_path,
        persist=args.persist,
    )


def main(argv: list[str] | None = None) -> None:
    args = cast(HelixArgs, parse_args(argv))

    try:
        settings = Settings()
    except ValidationError as e:
        logger.error(f"运行期设置校验失败：{e}")
        sys.exit(EXIT_VALIDATION)

    log_level = args.log_level or settings.log_level.value
    _ = logger.remove()
    _ = logger.add(sys.stderr, level=log_level)

    _ = signal.signal(signal.SIGINT, _signal_handler)  # pyright: ignore[reportUnknownArgumentType]
    _ = signal.signal(signal.SIGTERM, _signal_handler)  # pyright: ignore[reportUnknownArgumentType]

    try:
        ctx = load_context(args, settings)
    except ConfigError as e:
        logger.error(str(e))
        sys.exit(EXIT_VALIDATION)

    _ = execute_command(args.command, ctx)


if __name__ == "__main__":
    main()

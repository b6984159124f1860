#!/usr/bin/env python3

from __future__ import annotations

import csv
import json
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

from loguru import logger

from helix.utils.checksummer import Checksummer
from helix.utils.formatter import format_number


class ResultWriter:
    """把结果写入输出目录，每个文件只由一个写入者写一次"""

    def __init__(self, directory: Path, formats: Iterable[str] = ("csv", "json")):
        self.directory = directory
        self.formats = set(formats)
        self.written: list[Path] = []
        self.digests: dict[Path, str] = {}

    def _prepare(self, name: str) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        return self.directory / name

    def write_csv(
        self,
        name: str,
        metadata: dict[str, str],
        header: Sequence[str],
        rows: Iterable[Sequence[Any]],
    ) -> Path | None:
        if "csv" not in self.formats:
            return None
        path = self._prepare(name)
        with open(path, "w", encoding="utf-8", newline="") as f:
            for key, value in metadata.items():
                _ = f.write(f"# {key}: {value}\n")
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_number(cell) if isinstance(cell, float) else cell for cell in row])
        return self._record(path)

    def write_json(self, name: str, payload: dict[str, Any]) -> Path | None:
        if "json" not in self.formats:
            return None
        path = self._prepare(name)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2, ensure_ascii=False)
            _ = f.write("\n")
        return self._record(path)

    def write_text(self, name: str, text: str) -> Path:
        path = self._prepare(name)
        _ = path.write_text(text, encoding="utf-8")
        return self._record(path)

    def _record(self, path: Path) -> Path:
        digest = Checksummer.of_file(path)
        logger.info(f"已写入 {path}（sha256 {digest[:16]}）")
        self.digests[path] = digest
        self.written.append(path)
        return path

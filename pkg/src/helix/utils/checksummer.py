#!/usr/bin/env python3

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any


class Checksummer:
    @staticmethod
    def of_payload(payload: Any) -> str:
        """对 JSON 兼容数据做规范化序列化后求 SHA-256"""
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    @staticmethod
    def of_file(path: Path) -> str:
        """结果文件的 SHA-256，写入日志用于比对两次运行是否逐字节一致"""
        with open(path, "rb") as f:
            return hashlib.file_digest(f, "sha256").hexdigest()

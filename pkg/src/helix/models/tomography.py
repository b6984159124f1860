#!/usr/bin/env python3

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from pydantic import field_validator

from helix.models.base import BaseModel


class QubitBasis(BaseModel):
    l: int

    @field_validator("l")
    def validate_l(cls, v: int) -> int:
        if v == 0:
            raise ValueError("子空间的 OAM 指标 l 不能为 0")
        return v

    @property
    def labels(self) -> list[str]:
        """基矢顺序 |l,l⟩, |l,0⟩, |0,l⟩, |0,0⟩"""
        return [f"|{a},{b}>" for a in (self.l, 0) for b in (self.l, 0)]

    @property
    def bell_state(self) -> np.ndarray:
        return np.array([0.0, 1.0, 1.0, 0.0], dtype=complex) / np.sqrt(2.0)


@dataclass(frozen=True)
class ProjectorSetting:
    """每一臂投影到 α|l⟩ + β|0⟩，系数按 (α, β) 存放"""

    label: str
    signal: tuple[complex, complex]
    idler: tuple[complex, complex]

    @property
    def vector(self) -> np.ndarray:
        return np.kron(np.asarray(self.signal, dtype=complex), np.asarray(self.idler, dtype=complex))

    @property
    def projector(self) -> np.ndarray:
        v = self.vector
        return np.outer(v, np.conj(v))


@dataclass(frozen=True)
class CountRecord:
    setting: ProjectorSetting
    rate: float
    counts: int
    scale: int

    @property
    def frequency(self) -> float:
        return self.counts / self.scale


@dataclass(frozen=True)
class DensityMatrix:
    rho: np.ndarray
    basis: QubitBasis

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.rho))

    @property
    def purity(self) -> float:
        return float(np.real(np.trace(self.rho @ self.rho)))

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.rho)

    def is_hermitian(self, tolerance: float = 1e-9) -> bool:
        return bool(np.allclose(self.rho, self.rho.conj().T, rtol=0.0, atol=tolerance))

"""Rate models for the three particle systems."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParameterError


@dataclass(frozen=True)
class SIM:
    """Glauber spin dynamics: flip rate exp(-beta * [H(flip) - H]_+).

    ``J_edges`` optionally gives one coupling per edge (in edge-list order),
    overriding the scalar ``J``.
    """

    beta: float
    J: float = 1.0
    h: float = 0.0
    J_edges: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.beta < 0:
            raise ParameterError("SIM requires beta >= 0")
        if self.h < 0:
            raise ParameterError("SIM requires h >= 0")
        if self.J_edges is None:
            if self.J <= 0:
                raise ParameterError("SIM requires J > 0")
        else:
            object.__setattr__(self, "J_edges", tuple(float(j) for j in self.J_edges))
            if any(j < 0 for j in self.J_edges):
                raise ParameterError("per-edge couplings must be >= 0")


@dataclass(frozen=True)
class VM:
    """Voter model: each vertex at rate 1 copies a uniform incident edge."""


@dataclass(frozen=True)
class CP:
    """Contact process with infection rate lam; recovery rate 1."""

    lam: float

    def __post_init__(self):
        if self.lam <= 0:
            raise ParameterError("CP requires lam > 0")


ModelParams = SIM | VM | CP

"""Hyperangle quadrature settings shared by basis checks and matrix assembly."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from hhladder.errors import QuadratureError
from hhladder.special import gauss_legendre

HALF_PI = 0.5 * math.pi
QUARTER_PI = 0.25 * math.pi


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Legendre settings for integrals over the hyperangle eta in [0, pi/2].

    ``eta_nodes`` is the node count per subinterval; with ``split_at_diagonal``
    the interval is cut at pi/4 where r1 = r2.
    """

    eta_nodes: int = 64
    split_at_diagonal: bool = True
    qmax_override: Optional[int] = None

    def __post_init__(self):
        if not isinstance(self.eta_nodes, int) or isinstance(self.eta_nodes, bool) or self.eta_nodes < 2:
            raise QuadratureError(f"eta_nodes must be an integer >= 2, got {self.eta_nodes!r}")
        if self.qmax_override is not None and (not isinstance(self.qmax_override, int) or self.qmax_override < 0):
            raise QuadratureError(f"qmax_override must be a non-negative integer, got {self.qmax_override!r}")

    def refined(self) -> "QuadratureSpec":
        return QuadratureSpec(2 * self.eta_nodes, self.split_at_diagonal, self.qmax_override)

    def descriptor(self) -> dict:
        return {
            "eta_nodes": self.eta_nodes,
            "split_at_diagonal": self.split_at_diagonal,
            "qmax_override": self.qmax_override,
        }


def eta_rule(spec: QuadratureSpec) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Plain Gauss-Legendre nodes/weights on [0, pi/2] (no measure factor)."""
    if spec.split_at_diagonal:
        x1, w1 = gauss_legendre(spec.eta_nodes, 0.0, QUARTER_PI)
        x2, w2 = gauss_legendre(spec.eta_nodes, QUARTER_PI, HALF_PI)
        return np.concatenate([x1, x2]), np.concatenate([w1, w2])
    return gauss_legendre(spec.eta_nodes, 0.0, HALF_PI)

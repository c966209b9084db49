"""ipslab: simulation and analytics for interacting particle systems on
random graphs.

The package pairs an exact event-driven simulator for spin, voter and
contact dynamics on arbitrary (multi)graphs with closed-form evaluators for
the quantities those dynamics are predicted to follow, and cross-validates
the two at desk scale.
"""

from . import analytics, dual, dynamics, graphgen, obsstats, rng
from .models import CP, SIM, VM

__all__ = [
    "analytics",
    "dual",
    "dynamics",
    "graphgen",
    "obsstats",
    "rng",
    "SIM",
    "VM",
    "CP",
]

__version__ = "0.1.0"

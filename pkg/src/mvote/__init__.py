"""Voting rules, domination-graph matching checks and exact distortion LPs."""

from .core import *  # noqa: F401,F403
from .matching import *  # noqa: F401,F403
from .rules import *  # noqa: F401,F403
from .metric import *  # noqa: F401,F403
from .distortion import *  # noqa: F401,F403
from .constructions import *  # noqa: F401,F403
from . import core, matching, rules, metric, distortion, constructions, lp
from ._kernels import BACKEND

__version__ = "0.1.0"

__all__ = (
    core.__all__
    + matching.__all__
    + rules.__all__
    + metric.__all__
    + distortion.__all__
    + constructions.__all__
    + ["BACKEND", "lp"]
)

"""Gowers uniformity norms, their duals, and structured decompositions on finite abelian groups."""

from ._backend import BACKEND, available_backends  # noqa: F401
from .algebra import *  # noqa: F401,F403
from .cube import *  # noqa: F401,F403
from .decomposable import *  # noqa: F401,F403
from .dual import *  # noqa: F401,F403
from .errors import (  # noqa: F401
    DimensionError,
    GowersError,
    InvalidInputError,
    InvalidParameterError,
    NumericalConsistencyError,
    RegularityFailure,
    ResourceError,
)
from .group import *  # noqa: F401,F403
from .norms import *  # noqa: F401,F403
from .regularity import *  # noqa: F401,F403
from .signals import *  # noqa: F401,F403
from .spectral import *  # noqa: F401,F403
from .structured import *  # noqa: F401,F403
from .suite import verify_suite  # noqa: F401

__version__ = "0.1.0"

"""Max-min, max-product and classical neural network operators driven by
sigmoidal activations, with the kernel and rate machinery around them."""

from .activations import *  # noqa: F401,F403
from .analysis import *  # noqa: F401,F403
from .kernel import *  # noqa: F401,F403
from .lattice import *  # noqa: F401,F403
from .operators import *  # noqa: F401,F403
from .properties import *  # noqa: F401,F403
from .targets import *  # noqa: F401,F403

__version__ = "0.1.0"

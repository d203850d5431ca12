"""Govern imports for the Wavelock package."""

# Explicitly available classes and functions
from .attenuation import *
from .cost import *
from .crlb import *
from .errors import *
from .harness import *
from .scene import *
from .settings import *
from .synth import *
from .optimize import hybrid_minimize

# Modules accessible as submodules
from . import attenuation
from . import cost
from . import crlb
from . import harness
from . import optimize
from . import scene
from . import sensitivity
from . import synth
from . import utils

from .version import __version__

from tdvmm._core import *  # noqa: F401,F403
from tdvmm._core import __version__  # noqa: F401

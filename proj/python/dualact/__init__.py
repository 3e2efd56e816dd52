from ._dualact import *  # noqa: F401,F403

"""Size cap for dense p*p operations.

Dense reconstructions defeat the quasi-linear memory budget, so they are
gated behind a cap. The default can be overridden per call or through the
``GEOMDS_DENSE_CAP`` environment variable.
"""

import os

from .errors import TooLarge

DEFAULT_DENSE_CAP = 5000
DENSE_CAP_ENV = "GEOMDS_DENSE_CAP"


def dense_cap(override=None):
    """Return the active dense-operation cap (number of vertices)."""
    if override is not None:
        return int(override)
    env = os.environ.get(DENSE_CAP_ENV)
    if env is not None:
        return int(env)
    return DEFAULT_DENSE_CAP


def ensure_dense_ok(p, override=None):
    """Raise :class:`TooLarge` when a dense p*p operation exceeds the cap."""
    cap = dense_cap(override)
    if p > cap:
        raise TooLarge(f"dense operation on p={p} exceeds cap {cap}")
    return p

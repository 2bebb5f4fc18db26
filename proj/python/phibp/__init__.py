"""Exact laws, duality checks, and coupled samplers for hierarchical
subordinator partition models.  Everything is implemented in the C++ core;
this package re-exports the compiled module and locates the bundled CLI."""

import os

from . import _phibp as _core
from ._phibp import *  # noqa: F401,F403

__version__ = "0.1.0"
__all__ = [name for name in dir(_core) if not name.startswith("_")]


def cli_path():
    """Absolute path of the `phibp` command-line binary, or None.

    Honors a PHIBP_CLI override (used by development builds), then looks next
    to the compiled module, where a wheel install places bin/phibp.
    """
    override = os.environ.get("PHIBP_CLI")
    if override and os.path.exists(override):
        return override
    for base in (os.path.dirname(_core.__file__), os.path.dirname(__file__)):
        p = os.path.join(base, "bin", "phibp")
        if os.path.exists(p):
            return p
    return None

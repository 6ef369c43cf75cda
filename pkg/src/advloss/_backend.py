"""Selects the compiled scan core when available.

Set ``ADVLOSS_PURE_PYTHON=1`` to force the pure-Python kernels, e.g.
for benchmarking one backend against the other.
"""

import os

if os.environ.get("ADVLOSS_PURE_PYTHON"):
    from . import _core_py as core
else:
    try:
        from . import _core  # type: ignore[attr-defined]

        core = _core
    except ImportError:
        from . import _core_py as core

COMPILED = bool(getattr(core, "COMPILED", False))


def backend_name() -> str:
    return "compiled" if COMPILED else "pure-python"

"""Hot-loop kernels with a compiled core and a pure-Python twin.

The compiled extension (Cython) is preferred; the pure-Python module
implements the identical sequential semantics and is selected when the
extension is unavailable.  Set SYMMPIX_BACKEND=python (or =compiled) to
force a backend; both produce bit-identical results, which the test suite
checks whenever the extension is importable.
"""

from __future__ import annotations

import os

_requested = os.environ.get("SYMMPIX_BACKEND", "auto").strip().lower()

if _requested in ("auto", "", "compiled", "c"):
    try:
        from symmpix.kernels import _core as _impl

        BACKEND = "compiled"
    except ImportError:
        if _requested in ("compiled", "c"):
            raise ImportError(
                "SYMMPIX_BACKEND=compiled but the symmpix.kernels._core "
                "extension is not built; reinstall with Cython + a C compiler"
            )
        from symmpix.kernels import _core_py as _impl

        BACKEND = "python"
elif _requested in ("python", "py", "pure"):
    from symmpix.kernels import _core_py as _impl

    BACKEND = "python"
else:
    raise ValueError(f"unknown SYMMPIX_BACKEND value: {_requested!r}")

assign_pass = _impl.assign_pass
hopcroft_karp = _impl.hopcroft_karp
label_components = _impl.label_components


def backend_name() -> str:
    return BACKEND

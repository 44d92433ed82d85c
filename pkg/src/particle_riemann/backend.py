"""Kernel backend selection.

Prefers the compiled extension; falls back to the pure-Python twin so the
package stays importable without a C toolchain.  ``BACKEND`` records which
one is active.
"""

try:
    from . import _kernels as kernels

    BACKEND = "compiled"
except ImportError:  # pragma: no cover - depends on the build environment
    from . import _kernels_py as kernels

    BACKEND = "python"

__all__ = ["kernels", "BACKEND"]

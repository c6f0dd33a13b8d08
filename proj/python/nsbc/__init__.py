"""Non-signaling-assisted and classical coding toolkit for finite-field
broadcast networks.

The heavy lifting lives in the compiled ``_nsbc`` extension; this package
re-exports its surface.
"""

try:
    # wheel layout: the extension is installed inside the package
    from ._nsbc import *  # noqa: F401,F403
    from ._nsbc import __version__  # noqa: F401
except ImportError:
    # development layout: the extension sits on sys.path (CMake build tree)
    from _nsbc import *  # noqa: F401,F403
    from _nsbc import __version__  # noqa: F401

"""Opt-in allocator tuning for long simulations.

NumPy returns large arrays to the OS on every free; on some virtual
machines the resulting page faults dominate the runtime of repeated
trials. Keeping freed memory in the heap avoids them. Only glibc is
affected; elsewhere this is a no-op.
"""

import ctypes
import ctypes.util

_M_TRIM_THRESHOLD = -1
_M_MMAP_THRESHOLD = -3


def retain_heap(limit: int = 1 << 32) -> bool:
    """Ask glibc to keep up to ``limit`` bytes of freed memory; True if applied."""
    name = ctypes.util.find_library("c")
    if not name:
        return False
    try:
        libc = ctypes.CDLL(name)
        mallopt = libc.mallopt
    except (OSError, AttributeError):
        return False
    ok = mallopt(_M_MMAP_THRESHOLD, ctypes.c_int(min(limit, 2**31 - 1)))
    ok &= mallopt(_M_TRIM_THRESHOLD, ctypes.c_int(min(limit, 2**31 - 1)))
    return bool(ok)

"""Kernel compilation switch.

Every hot loop in the package is written once, as plain Python over numpy
arrays, and decorated with :func:`kernel`.  By default the decorator compiles
with ``numba.njit``.  Setting ``HYPERPART_DISABLE_NUMBA=1`` before import runs
the very same functions interpreted, which is slow but handy for debugging and
for cross-checking the compiled path.
"""

import os

import numpy as np

DISABLE_ENV = "HYPERPART_DISABLE_NUMBA"

USE_NUMBA = os.environ.get(DISABLE_ENV, "").strip().lower() not in ("1", "true", "yes", "on")

if USE_NUMBA:
    try:
        from numba import njit as _njit
    except ImportError:  # pragma: no cover - numba is a hard dependency
        USE_NUMBA = False

def _sync_cache():
    """Drop cached machine code when any module of the package changed.

    numba checks only the source file of the cached function itself, so a
    kernel whose callee lives in another module would keep running the old
    callee after an edit.
    """
    import glob
    import hashlib

    here = os.path.dirname(os.path.abspath(__file__))
    cache = os.path.join(here, "__pycache__")
    digest = hashlib.sha1()
    for path in sorted(glob.glob(os.path.join(here, "*.py"))):
        with open(path, "rb") as fh:
            digest.update(fh.read())
    stamp = os.path.join(cache, "kernels.stamp")
    try:
        with open(stamp) as fh:
            if fh.read() == digest.hexdigest():
                return
    except OSError:
        pass
    try:
        os.makedirs(cache, exist_ok=True)
        for path in glob.glob(os.path.join(cache, "*.nb[ic]")):
            os.remove(path)
        with open(stamp, "w") as fh:
            fh.write(digest.hexdigest())
    except OSError:  # read-only install, nothing to refresh
        pass


if USE_NUMBA:
    if "NUMBA_CACHE_DIR" not in os.environ:
        _sync_cache()

    def kernel(fn):
        return _njit(cache=True, nogil=True, _nrt=False)(fn)

else:

    def kernel(fn):
        return fn


MASK32 = 0xFFFFFFFF


# xorshift128 on four 32-bit words held in an int64 array.  Shifts never leave
# the int64 range, so the interpreted and compiled paths produce identical
# streams.
@kernel
def rng_next(st):
    t = st[0]
    t = t ^ ((t << 11) & MASK32)
    t = t ^ (t >> 8)
    st[0] = st[1]
    st[1] = st[2]
    st[2] = st[3]
    w = st[3]
    w = w ^ (w >> 19) ^ t
    st[3] = w
    return w


@kernel
def rng_below(st, n):
    return rng_next(st) % n


@kernel
def rng_shuffle(st, arr, count):
    for i in range(count - 1, 0, -1):
        j = rng_next(st) % (i + 1)
        tmp = arr[i]
        arr[i] = arr[j]
        arr[j] = tmp


def make_rng_state(seed, stream):
    """Derive a kernel RNG state for a named stream of a master seed."""
    words = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, _stream_id(stream)]).generate_state(
        4, dtype=np.uint32
    )
    st = words.astype(np.int64)
    if not st.any():
        st[3] = 0x9E3779B9
    return st


def _stream_id(name):
    h = 2166136261
    for ch in str(name).encode():
        h = ((h ^ ch) * 16777619) & 0xFFFFFFFF
    return h


class KernelRng:
    """Seeded stream usable both from Python and from inside kernels."""

    def __init__(self, seed=0, stream="default"):
        self.state = make_rng_state(seed, stream)

    def below(self, n):
        return int(rng_below(self.state, n))

    def random(self):
        return int(rng_next(self.state)) / 4294967296.0

"""Addressable binary max-heaps stored in 2-D arrays.

Row ``q`` of ``keys``/``items`` holds heap number ``q``; ``pos[q, item]`` is
the slot of ``item`` in that heap or -1.  Several independent heaps over the
same item universe therefore share one allocation, which is what the k-way
gain engine needs.  A single heap is simply ``q == 0`` of a one-row table.
"""

import numpy as np

from ._jit import kernel


def allocate(num_heaps, universe):
    keys = np.zeros((num_heaps, max(universe, 1)), dtype=np.float64)
    items = np.zeros((num_heaps, max(universe, 1)), dtype=np.int32)
    pos = np.full((num_heaps, max(universe, 1)), -1, dtype=np.int32)
    size = np.zeros(num_heaps, dtype=np.int64)
    return keys, items, pos, size


@kernel
def _sift_up(keys, items, pos, q, i):
    key = keys[q, i]
    item = items[q, i]
    while i > 0:
        parent = (i - 1) >> 1
        if keys[q, parent] >= key:
            break
        keys[q, i] = keys[q, parent]
        items[q, i] = items[q, parent]
        pos[q, items[q, i]] = i
        i = parent
    keys[q, i] = key
    items[q, i] = item
    pos[q, item] = i


@kernel
def _sift_down(keys, items, pos, size, q, i):
    n = size[q]
    key = keys[q, i]
    item = items[q, i]
    while True:
        child = 2 * i + 1
        if child >= n:
            break
        if child + 1 < n and keys[q, child + 1] > keys[q, child]:
            child += 1
        if keys[q, child] <= key:
            break
        keys[q, i] = keys[q, child]
        items[q, i] = items[q, child]
        pos[q, items[q, i]] = i
        i = child
    keys[q, i] = key
    items[q, i] = item
    pos[q, item] = i


@kernel
def heap_push(keys, items, pos, size, q, item, key):
    i = size[q]
    size[q] = i + 1
    keys[q, i] = key
    items[q, i] = item
    pos[q, item] = i
    _sift_up(keys, items, pos, q, i)


@kernel
def heap_contains(pos, q, item):
    return pos[q, item] >= 0


@kernel
def heap_key(keys, pos, q, item):
    return keys[q, pos[q, item]]


@kernel
def heap_set_key(keys, items, pos, size, q, item, key):
    i = pos[q, item]
    old = keys[q, i]
    keys[q, i] = key
    if key > old:
        _sift_up(keys, items, pos, q, i)
    elif key < old:
        _sift_down(keys, items, pos, size, q, i)


@kernel
def heap_add_key(keys, items, pos, size, q, item, delta):
    heap_set_key(keys, items, pos, size, q, item, keys[q, pos[q, item]] + delta)


@kernel
def heap_remove(keys, items, pos, size, q, item):
    i = pos[q, item]
    last = size[q] - 1
    pos[q, item] = -1
    size[q] = last
    if i == last:
        return
    old = keys[q, i]
    keys[q, i] = keys[q, last]
    items[q, i] = items[q, last]
    pos[q, items[q, i]] = i
    if keys[q, i] > old:
        _sift_up(keys, items, pos, q, i)
    else:
        _sift_down(keys, items, pos, size, q, i)


@kernel
def heap_upsert(keys, items, pos, size, q, item, key):
    if pos[q, item] >= 0:
        heap_set_key(keys, items, pos, size, q, item, key)
    else:
        heap_push(keys, items, pos, size, q, item, key)


@kernel
def heap_clear(items, pos, size, q):
    for i in range(size[q]):
        pos[q, items[q, i]] = -1
    size[q] = 0

"""File formats.

hMetis hypergraph files::

    % comment
    <num_nets> <num_vertices> [fmt]
    [w] pin pin ...        one line per net, pins 1-based
    c                      one line per vertex if fmt is 10 or 11

``fmt`` 1 adds a leading net weight, 10 adds vertex weight lines, 11 both.

Matrix Market coordinate files are read with the row-net model: every
non-empty row is a net whose pins are the columns of its non-zeros.

Partition files hold one 0-based block id per line.
"""

import os

import numpy as np

from .hypergraph import Hypergraph, HypergraphError


class FormatError(ValueError):
    pass


def _lines(text):
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        yield line


def _ints(line, what):
    try:
        return [int(tok) for tok in line.split()]
    except ValueError:
        raise FormatError(f"malformed {what}: {line!r}") from None


def parse_hmetis(text):
    lines = list(_lines(text))
    if not lines:
        raise FormatError("missing header")
    header = _ints(lines[0], "header")
    if len(header) not in (2, 3):
        raise FormatError(f"malformed header: {lines[0]!r}")
    m, n = header[0], header[1]
    fmt = header[2] if len(header) == 3 else 0
    if m < 0 or n < 0 or fmt not in (0, 1, 10, 11):
        raise FormatError(f"malformed header: {lines[0]!r}")
    has_nw = fmt in (1, 11)
    has_vw = fmt in (10, 11)
    expected = 1 + m + (n if has_vw else 0)
    if len(lines) != expected:
        raise FormatError(f"expected {expected - 1} data lines, found {len(lines) - 1}")

    nets = []
    net_w = np.ones(m)
    for e in range(m):
        vals = _ints(lines[1 + e], "net line")
        if has_nw:
            if len(vals) < 2:
                raise FormatError(f"net {e + 1}: weight without pins")
            if vals[0] <= 0:
                raise FormatError(f"net {e + 1}: non-positive weight {vals[0]}")
            net_w[e] = vals[0]
            vals = vals[1:]
        if not vals:
            raise FormatError(f"net {e + 1} is empty")
        for p in vals:
            if not 1 <= p <= n:
                raise FormatError(f"net {e + 1}: pin {p} out of range 1..{n}")
        nets.append([p - 1 for p in vals])

    vw = np.ones(n)
    if has_vw:
        for v in range(n):
            vals = _ints(lines[1 + m + v], "vertex weight")
            if len(vals) != 1:
                raise FormatError(f"vertex {v + 1}: expected one weight")
            if vals[0] <= 0:
                raise FormatError(f"vertex {v + 1}: non-positive weight {vals[0]}")
            vw[v] = vals[0]
    try:
        return Hypergraph.build(n, nets, net_w, vw)
    except HypergraphError as exc:
        raise FormatError(str(exc)) from None


def _num(x):
    x = float(x)
    return str(int(x)) if x.is_integer() else repr(x)


def format_hmetis(hg):
    """Serialise the enabled nets of ``hg`` (all vertices are written)."""
    nets = hg.enabled_nets()
    nw = hg.a.nweight[nets]
    vw = hg.a.vweight
    has_nw = bool((nw != 1).any())
    has_vw = bool((vw != 1).any())
    fmt = (1 if has_nw else 0) + (10 if has_vw else 0)
    out = [f"{len(nets)} {hg.num_vertices}" + (f" {fmt}" if fmt else "")]
    for e, w in zip(nets, nw):
        pins = " ".join(str(int(p) + 1) for p in hg.pins(e))
        out.append(f"{_num(w)} {pins}" if has_nw else pins)
    if has_vw:
        out.extend(_num(c) for c in vw)
    return "\n".join(out) + "\n"


def read_hmetis(path):
    with open(path) as fh:
        return parse_hmetis(fh.read())


def write_hmetis(hg, path):
    with open(path, "w") as fh:
        fh.write(format_hmetis(hg))


def parse_rownet_matrix(text):
    lines = list(_lines(text))
    if not lines:
        raise FormatError("missing size line")
    size = lines[0].split()
    try:
        rows, cols, nnz = (int(x) for x in size[:3])
    except ValueError:
        raise FormatError(f"malformed size line: {lines[0]!r}") from None
    if len(size) != 3 or rows < 0 or cols < 0 or nnz < 0:
        raise FormatError(f"malformed size line: {lines[0]!r}")
    if len(lines) - 1 != nnz:
        raise FormatError(f"expected {nnz} entries, found {len(lines) - 1}")
    by_row = {}
    for line in lines[1:]:
        tok = line.split()
        try:
            r, c = int(tok[0]), int(tok[1])
        except (ValueError, IndexError):
            raise FormatError(f"malformed entry: {line!r}") from None
        if not (1 <= r <= rows and 1 <= c <= cols):
            raise FormatError(f"entry ({r}, {c}) out of range")
        by_row.setdefault(r, []).append(c - 1)
    nets = [by_row[r] for r in sorted(by_row)]
    try:
        return Hypergraph.build(cols, nets)
    except HypergraphError as exc:
        raise FormatError(str(exc)) from None


def read_rownet_matrix(path):
    with open(path) as fh:
        return parse_rownet_matrix(fh.read())


def read_hypergraph(path, fmt="hmetis"):
    if fmt == "hmetis":
        return read_hmetis(path)
    if fmt == "matrix":
        return read_rownet_matrix(path)
    raise ValueError(f"unknown input format {fmt!r}")


def format_partition(assignment):
    return "".join(f"{int(b)}\n" for b in assignment)


def write_partition(assignment, path):
    with open(path, "w") as fh:
        fh.write(format_partition(assignment))


def parse_partition(text, num_vertices=None, k=None):
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    try:
        blocks = np.array([int(x) for x in lines], dtype=np.int64)
    except ValueError:
        raise FormatError("malformed partition file") from None
    if num_vertices is not None and blocks.size != num_vertices:
        raise FormatError(f"incomplete assignment: {blocks.size} lines for {num_vertices} vertices")
    if k is not None and blocks.size and (blocks.min() < 0 or blocks.max() >= k):
        raise FormatError(f"block id out of range 0..{k - 1}")
    return blocks


def read_partition(path, num_vertices=None, k=None):
    if not os.path.exists(path):
        raise FormatError(f"partition file {path} not found")
    with open(path) as fh:
        return parse_partition(fh.read(), num_vertices, k)

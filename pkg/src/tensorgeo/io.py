"""Plain-text serialization of tensors, matrices, points, and tangents.

A tensor document holds a ``shape:`` line of integers followed by a
``data:`` line of decimal doubles printed with 17 significant digits,
row-major; matrices are the 2-d case.  Point and tangent documents list one
block section per mode; permutations and the human-facing mode numbers are
written 1-based.

Parsers raise :class:`FormatError` with the offending line number so
callers can report locations.
"""

import numpy as np

from .group import HorizontalBlocks, ModeBlocks, gamma12


class FormatError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(message + where)


def _fmt(values):
    return " ".join(f"{float(v):.17g}" for v in values)


class _Lines:
    def __init__(self, text):
        self.lines = text.splitlines()
        self.pos = 0

    def next(self, expect=None):
        while self.pos < len(self.lines):
            raw = self.lines[self.pos]
            self.pos += 1
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if expect is not None:
                if not line.startswith(expect + ":"):
                    raise FormatError(f"expected '{expect}:', found '{line}'",
                                      self.pos)
                return line[len(expect) + 1:].strip()
            return line
        if expect is not None:
            raise FormatError(f"expected '{expect}:', found end of file",
                              len(self.lines))
        return None

    def parse(self, expect, kind):
        body = self.next(expect)
        try:
            return [kind(tok) for tok in body.split()]
        except ValueError as exc:
            raise FormatError(f"bad {expect} entry: {exc}", self.pos) from None


def dump_tensor(arr):
    arr = np.asarray(arr, dtype=float)
    return (f"shape: {' '.join(str(s) for s in arr.shape)}\n"
            f"data: {_fmt(arr.ravel())}\n")


def _parse_tensor(lines):
    shape = lines.parse("shape", int)
    data = lines.parse("data", float)
    size = int(np.prod(shape)) if shape else 0
    if len(data) != size:
        raise FormatError(f"data holds {len(data)} entries, shape wants {size}",
                          lines.pos)
    arr = np.array(data).reshape(shape)
    if not np.all(np.isfinite(arr)):
        raise FormatError("non-finite entry in data", lines.pos)
    return arr


def load_tensor(text):
    return _parse_tensor(_Lines(text))


def dump_matrix(m):
    m = np.asarray(m, dtype=float)
    if m.ndim != 2:
        raise ValueError("matrix documents require 2-d data")
    return dump_tensor(m)


def load_matrix(text):
    m = load_tensor(text)
    if m.ndim != 2:
        raise FormatError("matrix document with non-2d shape")
    return m


def save_tensor(path, arr):
    with open(path, "w") as fh:
        fh.write(dump_tensor(arr))


def read_tensor(path):
    with open(path) as fh:
        return load_tensor(fh.read())


# ---------------------------------------------------------------------------
# points and tangents

def _shape_header(point):
    shape = point.shape
    if shape.name == "cp":
        ranks = [shape.r]
    elif shape.name == "tucker":
        ranks = list(shape.ranks)
    else:
        ranks = list(shape.ranks)
    return (f"manifold: {shape.name}\n"
            f"dims: {' '.join(str(n) for n in shape.dims)}\n"
            f"ranks: {' '.join(str(t) for t in ranks)}\n")


def dump_point(point):
    out = [_shape_header(point)]
    for i, mb in enumerate(point.modes):
        out.append(f"mode: {i + 1}\n")
        out.append(f"k: {mb.k}\n")
        out.append(f"perm: {' '.join(str(int(v) + 1) for v in mb.perm)}\n")
        out.append("g11:\n" + dump_matrix(mb.g11))
        out.append("g21:\n" + dump_matrix(mb.g21))
    return "".join(out)


def _parse_shape_header(lines):
    from .cp import CpShape
    from .tt import TtShape
    from .tucker import TuckerShape
    manifold = lines.next("manifold")
    dims = lines.parse("dims", int)
    ranks = lines.parse("ranks", int)
    if manifold == "cp":
        if len(ranks) != 1:
            raise FormatError("cp documents carry a single rank", lines.pos)
        return CpShape(dims, ranks[0])
    if manifold == "tucker":
        return TuckerShape(dims, ranks)
    if manifold == "tt":
        return TtShape(dims, ranks)
    raise FormatError(f"unknown manifold tag '{manifold}'", lines.pos)


def _point_class(shape):
    from .cp import CpPoint
    from .tt import TtPoint
    from .tucker import TuckerPoint
    return {"cp": CpPoint, "tucker": TuckerPoint, "tt": TtPoint}[shape.name]


def load_point(text):
    lines = _Lines(text)
    shape = _parse_shape_header(lines)
    modes = []
    for i in range(len(shape.dims)):
        mode_no = lines.parse("mode", int)
        if mode_no != [i + 1]:
            raise FormatError(f"expected mode {i + 1}", lines.pos)
        k = lines.parse("k", int)[0]
        if k != shape.ks[i]:
            raise FormatError(f"mode {i + 1}: k = {k} conflicts with the "
                              f"declared ranks (want {shape.ks[i]})", lines.pos)
        perm = np.array(lines.parse("perm", int)) - 1
        if lines.next() != "g11:":
            raise FormatError("expected 'g11:'", lines.pos)
        g11 = _parse_tensor(lines)
        if lines.next() != "g21:":
            raise FormatError("expected 'g21:'", lines.pos)
        g21 = _parse_tensor(lines)
        try:
            modes.append(ModeBlocks(perm, g11, g21))
        except ValueError as exc:
            raise FormatError(f"mode {i + 1}: {exc}", lines.pos) from None
    return _point_class(shape)(shape, tuple(modes))


def dump_tangent(point, tangent):
    out = [_shape_header(point)]
    for i, tb in enumerate(tangent.modes):
        out.append(f"mode: {i + 1}\n")
        out.append(f"k: {tb.k}\n")
        out.append("x11:\n" + dump_matrix(tb.x11))
        out.append("x21:\n" + dump_matrix(tb.x21))
    return "".join(out)


def load_tangent(text, point):
    """Tangent blocks against an existing point; coupling blocks are rebuilt."""
    lines = _Lines(text)
    shape = _parse_shape_header(lines)
    if shape != point.shape:
        raise FormatError("tangent header does not match the point's shape")
    modes = []
    for i in range(len(shape.dims)):
        lines.parse("mode", int)
        lines.parse("k", int)
        if lines.next() != "x11:":
            raise FormatError("expected 'x11:'", lines.pos)
        x11 = _parse_tensor(lines)
        if lines.next() != "x21:":
            raise FormatError("expected 'x21:'", lines.pos)
        x21 = _parse_tensor(lines)
        try:
            modes.append(HorizontalBlocks(x11, x21, gamma12(point.modes[i])))
        except ValueError as exc:
            raise FormatError(f"mode {i + 1}: {exc}", lines.pos) from None
    from .homogeneous import ManifoldTangent
    return ManifoldTangent(modes)


def save_point(path, point):
    with open(path, "w") as fh:
        fh.write(dump_point(point))


def read_point(path):
    with open(path) as fh:
        return load_point(fh.read())


def save_tangent(path, point, tangent):
    with open(path, "w") as fh:
        fh.write(dump_tangent(point, tangent))


def read_tangent(path, point):
    with open(path) as fh:
        return load_tangent(fh.read(), point)

"""CSV and binary PGM output for realized fields."""

import numpy as np

from ..exceptions import DomainError
from .types import GridSpec


def _coord_names(sample):
    g = sample.geometry
    if isinstance(g, (int, np.integer)):
        return ["vertex"]
    k = sample.coords().shape[1]
    return ["x", "y", "z"][:k] if k <= 3 else [f"x{i}" for i in range(k)]


def format_csv(samples, metadata=None):
    """One row per site: coordinates, then one value column per sample.

    ``metadata`` items become ``# key=value`` lines ahead of the header.
    """
    samples = list(samples)
    if not samples:
        raise DomainError("nothing to write")
    first = samples[0]
    lines = [f"# {k}={v}" for k, v in (metadata or {}).items()]
    names = _coord_names(first)
    if len(samples) == 1:
        value_names = ["value"]
    else:
        value_names = [f"value_{s.stream}" for s in samples]
    lines.append(",".join(names + value_names))
    if names == ["vertex"]:
        coords = [[str(i)] for i in range(first.values.size)]
    else:
        coords = [[repr(float(c)) for c in row] for row in first.coords()]
    values = np.stack([s.values for s in samples], axis=1)
    for c, row in zip(coords, values.tolist()):
        lines.append(",".join(c + [repr(v) for v in row]))
    return "\n".join(lines) + "\n"


def write_csv(samples, path, metadata=None):
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(format_csv(samples, metadata))


def pgm_bytes(sample):
    """8-bit P5 image of a 2-D grid sample, min-max scaled; the range is kept in a header comment."""
    g = sample.geometry
    if not isinstance(g, GridSpec) or g.dims != 2:
        raise DomainError("PGM export needs a 2-D grid sample")
    img = sample.as_grid()
    lo, hi = float(img.min()), float(img.max())
    if hi > lo:
        scaled = np.rint((img - lo) / (hi - lo) * 255.0)
    else:
        scaled = np.zeros(img.shape)
    height, width = img.shape
    header = f"P5\n# min={lo!r} max={hi!r}\n{width} {height}\n255\n".encode("ascii")
    return header + scaled.astype(np.uint8).tobytes()


def write_pgm(sample, path):
    with open(path, "wb") as fh:
        fh.write(pgm_bytes(sample))


def read_pgm(path):
    """Parse a P5 file written by ``write_pgm``: (pixels, comment lines)."""
    with open(path, "rb") as fh:
        data = fh.read()
    fields, comments, pos = [], [], 0
    while len(fields) < 4:
        end = data.index(b"\n", pos)
        line = data[pos:end].decode("ascii")
        pos = end + 1
        if line.startswith("#"):
            comments.append(line)
        else:
            fields.extend(line.split())
    if fields[0] != "P5":
        raise DomainError(f"{path}: not a binary PGM")
    width, height, maxval = int(fields[1]), int(fields[2]), int(fields[3])
    pixels = np.frombuffer(data[pos:], dtype=np.uint8)
    if pixels.size != width * height or maxval != 255:
        raise DomainError(f"{path}: truncated or unsupported PGM")
    return pixels.reshape(height, width), comments

"""Raster gridplots: stacked per-k strips of colored vertical bands.

Each series element becomes a band_width x row_height block colored
through either the 3-color sign palette (positive white, zero red,
negative black) or a 256-level jet-style palette. Images are written as
binary PPM so the byte stream is fully specified.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np


def colormap_sign(v: int) -> tuple[int, int, int]:
    """3-color palette: +1 white, 0 red, -1 black."""
    table = {1: (255, 255, 255), 0: (255, 0, 0), -1: (0, 0, 0)}
    try:
        return table[int(v)]
    except KeyError:
        raise ValueError(f"sign colormap domain is -1, 0, 1; got {v}") from None


def colormap_jet(level: int) -> tuple[int, int, int]:
    """Piecewise-linear blue-to-red palette over levels 0..255.

    Channel c(t) = clamp(1.5 - |4t - c0|, 0, 1) with c0 = 3, 2, 1 for
    R, G, B and t = level/255, scaled to bytes with halves rounded away
    from zero.
    """
    if not 0 <= level <= 255:
        raise ValueError(f"jet colormap domain is 0..255; got {level}")
    t = level / 255.0
    out = []
    for c0 in (3.0, 2.0, 1.0):
        x = min(max(1.5 - abs(4.0 * t - c0), 0.0), 1.0)
        out.append(int(np.floor(x * 255.0 + 0.5)))
    return tuple(out)


def _table(kind: str) -> np.ndarray:
    if kind == "sign3":
        return np.array([colormap_sign(v) for v in (-1, 0, 1)], dtype=np.uint8)
    if kind == "jet256":
        return np.array([colormap_jet(v) for v in range(256)], dtype=np.uint8)
    raise ValueError(f"unknown colormap {kind!r}")


@dataclass(frozen=True)
class Colormap:
    """A named palette with its full RGB lookup table."""

    kind: str
    table: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.table is None:
            object.__setattr__(self, "table", _table(self.kind))

    def lookup(self, levels: np.ndarray) -> np.ndarray:
        """Map integer levels to RGB rows, validating the domain."""
        lv = np.asarray(levels)
        if self.kind == "sign3":
            if lv.size and not np.isin(lv, (-1, 0, 1)).all():
                raise ValueError("sign colormap domain is -1, 0, 1")
            return self.table[lv + 1]
        if lv.size and (lv.min() < 0 or lv.max() > 255):
            raise ValueError("jet colormap domain is 0..255")
        return self.table[lv]


@dataclass(frozen=True)
class GridRow:
    """One strip of the gridplot: its k label, levels, and value range.

    ``q_range`` carries the endpoints of the underlying PIP sequence for
    annotation purposes; it does not affect the pixels.
    """

    k: int
    levels: np.ndarray
    q_range: tuple[int, int] | None = None


@dataclass(frozen=True)
class GridImage:
    """Row-major RGB raster plus per-row annotations."""

    width: int
    height: int
    pixels: np.ndarray
    meta: list


def render_gridplot(rows, style="sign3", band_width: int = 1,
                    row_height: int = 40, gap: int = 8) -> GridImage:
    """Rasterize per-k rows into one stacked image, highest k on top.

    Every row must have the same length. Rows are separated by ``gap``
    white pixel rows; each element paints a band_width x row_height
    block of its palette color.
    """
    cmap = style if isinstance(style, Colormap) else Colormap(style)
    rows = list(rows)
    if not rows:
        raise ValueError("need at least one row")
    lengths = {len(np.asarray(r.levels)) for r in rows}
    if len(lengths) != 1:
        raise ValueError(f"rows differ in length: {sorted(lengths)}")
    (length,) = lengths
    if length == 0:
        raise ValueError("rows must be nonempty")
    if band_width < 1 or row_height < 1 or gap < 0:
        raise ValueError("need band_width >= 1, row_height >= 1, gap >= 0")

    ordered = sorted(rows, key=lambda r: r.k, reverse=True)
    width = band_width * length
    height = len(ordered) * (row_height + gap) - gap
    pixels = np.full((height, width, 3), 255, dtype=np.uint8)
    for slot, row in enumerate(ordered):
        rgb = cmap.lookup(np.asarray(row.levels, dtype=np.int64))
        strip = np.repeat(rgb, band_width, axis=0)
        y0 = slot * (row_height + gap)
        pixels[y0 : y0 + row_height, :, :] = strip[np.newaxis, :, :]
    meta = [(row.k, row.q_range) for row in ordered]
    return GridImage(width=width, height=height, pixels=pixels, meta=meta)


def write_ppm(image, path) -> None:
    """Write binary PPM (P6, maxval 255), top row first."""
    pixels = image.pixels if isinstance(image, GridImage) else np.asarray(image)
    if pixels.ndim != 3 or pixels.shape[2] != 3 or pixels.dtype != np.uint8:
        raise ValueError("expected a (height, width, 3) uint8 array")
    h, w = pixels.shape[:2]
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(pixels.tobytes())


def read_ppm(path) -> np.ndarray:
    """Read a binary PPM written by :func:`write_ppm`."""
    with open(path, "rb") as fh:
        data = fh.read()
    m = re.match(rb"P6\s+(\d+)\s+(\d+)\s+(\d+)\s", data)
    if not m:
        raise ValueError(f"{path}: not a binary PPM")
    w, h, maxval = (int(g) for g in m.groups())
    if maxval != 255:
        raise ValueError(f"{path}: unsupported maxval {maxval}")
    raster = data[m.end() :]
    if len(raster) != w * h * 3:
        raise ValueError(f"{path}: truncated raster")
    return np.frombuffer(raster, dtype=np.uint8).reshape(h, w, 3).copy()

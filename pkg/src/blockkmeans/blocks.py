"""Distinct-block decomposition of an image and its exact inverse."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .image import Dims, Image


class BoundsError(ValueError):
    pass


class ReassemblyError(ValueError):
    pass


class StrategyKind(enum.Enum):
    ROW = "row"
    COLUMN = "column"
    SQUARE = "square"


DEFAULT_EXTENTS = {
    StrategyKind.ROW: 1200,
    StrategyKind.COLUMN: 1000,
    StrategyKind.SQUARE: 1200,
}


@dataclass(frozen=True)
class Strategy:
    """Block shape family plus its free dimension.

    ``extent`` is the block height for ROW, block width for COLUMN and the side
    length for SQUARE.
    """

    kind: StrategyKind
    extent: int

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", StrategyKind(self.kind))
        if self.extent < 1:
            raise ValueError(f"extent must be >= 1, got {self.extent}")

    @classmethod
    def default(cls, kind: StrategyKind | str) -> "Strategy":
        kind = StrategyKind(kind)
        return cls(kind, DEFAULT_EXTENTS[kind])

    @property
    def name(self) -> str:
        return self.kind.value


@dataclass(frozen=True)
class BlockShape:
    """Block size in ``[rows cols]`` order."""

    rows: int
    cols: int

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"block shape must be >= 1x1, got [{self.rows} {self.cols}]")

    @property
    def height(self) -> int:
        return self.rows

    @property
    def width(self) -> int:
        return self.cols

    def __str__(self) -> str:
        return f"[{self.rows} {self.cols}]"


@dataclass(frozen=True)
class BlockRegion:
    grid_row: int
    grid_col: int
    x0: int
    y0: int
    width: int
    height: int

    @property
    def area(self) -> int:
        return self.width * self.height


@dataclass(frozen=True)
class BlockGrid:
    image_dims: Dims
    shape: BlockShape
    grid_rows: int
    grid_cols: int
    regions: tuple[BlockRegion, ...]

    def __len__(self) -> int:
        return len(self.regions)

    def __iter__(self):
        return iter(self.regions)


def derive_block_shape(strategy: Strategy, dims: Dims) -> BlockShape:
    kind, extent = strategy.kind, strategy.extent
    if kind is StrategyKind.ROW:
        return BlockShape(min(extent, dims.height), dims.width)
    if kind is StrategyKind.COLUMN:
        return BlockShape(dims.height, min(extent, dims.width))
    return BlockShape(min(extent, dims.height), min(extent, dims.width))


def compute_grid(dims: Dims, shape: BlockShape) -> BlockGrid:
    grid_rows = math.ceil(dims.height / shape.rows)
    grid_cols = math.ceil(dims.width / shape.cols)
    regions = []
    for r in range(grid_rows):
        y0 = r * shape.rows
        h = min(shape.rows, dims.height - y0)
        for c in range(grid_cols):
            x0 = c * shape.cols
            w = min(shape.cols, dims.width - x0)
            regions.append(BlockRegion(r, c, x0, y0, w, h))
    return BlockGrid(dims, shape, grid_rows, grid_cols, tuple(regions))


def _check_bounds(dims: Dims, region: BlockRegion):
    if (
        region.width < 1
        or region.height < 1
        or region.x0 < 0
        or region.y0 < 0
        or region.x0 + region.width > dims.width
        or region.y0 + region.height > dims.height
    ):
        raise BoundsError(f"region {region} lies outside a {dims} image")


def extract_block(img: Image, region: BlockRegion) -> Image:
    _check_bounds(img.dims, region)
    view = img.samples[
        region.y0 : region.y0 + region.height, region.x0 : region.x0 + region.width
    ]
    return Image(region.width, region.height, img.channels, img.maxval, view)


def reassemble(dims: Dims, pieces: Iterable[tuple[BlockRegion, Image]]) -> Image:
    """Stitch block outputs back into one image.

    Every pixel must be written by exactly one piece; gaps, overlaps and pieces
    whose size disagrees with their region raise ReassemblyError.
    """
    pieces = list(pieces)
    if not pieces:
        raise ReassemblyError("no pieces supplied")
    first = pieces[0][1]
    channels, maxval = first.channels, first.maxval
    out = np.zeros((dims.height, dims.width, channels), dtype=first.samples.dtype)
    coverage = np.zeros((dims.height, dims.width), dtype=np.uint8)

    for region, piece in pieces:
        try:
            _check_bounds(dims, region)
        except BoundsError as exc:
            raise ReassemblyError(str(exc)) from None
        if (piece.width, piece.height) != (region.width, region.height):
            raise ReassemblyError(
                f"piece for region {region} is {piece.width}x{piece.height}"
            )
        if (piece.channels, piece.maxval) != (channels, maxval):
            raise ReassemblyError(f"piece for region {region} has a different sample format")
        ys = slice(region.y0, region.y0 + region.height)
        xs = slice(region.x0, region.x0 + region.width)
        if coverage[ys, xs].any():
            raise ReassemblyError(f"region {region} overlaps an earlier piece")
        coverage[ys, xs] = 1
        out[ys, xs] = piece.samples

    if not coverage.all():
        holes = np.argwhere(coverage == 0)
        (y0, x0), (y1, x1) = holes.min(axis=0), holes.max(axis=0)
        raise ReassemblyError(
            f"no piece covers the area x0={x0} y0={y0} width={x1 - x0 + 1} height={y1 - y0 + 1}"
        )
    return Image(dims.width, dims.height, channels, maxval, out)

"""Whole-image serial, block serial and block parallel execution modes."""

from __future__ import annotations

import enum
import time
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass, replace

from .blocks import BlockRegion, Strategy, compute_grid, derive_block_shape, extract_block, reassemble
from .image import Image
from .kmeans import KMeansConfig, KMeansModel, image_points, render, run_kmeans
from .rng import GOLDEN_GAMMA, MASK64, mix64


class Mode(enum.Enum):
    WHOLE = "whole"
    BLOCK_SERIAL = "block-serial"
    BLOCK_PARALLEL = "block-parallel"


@dataclass(frozen=True)
class ExecutionPlan:
    mode: Mode
    kmeans: KMeansConfig
    strategy: Strategy | None = None
    workers: int = 1

    def __post_init__(self):
        if isinstance(self.mode, str):
            object.__setattr__(self, "mode", Mode(self.mode))
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if (self.strategy is None) != (self.mode is Mode.WHOLE):
            raise ValueError("a strategy is required for block modes and only for them")


@dataclass(frozen=True, eq=False)
class ClusteredResult:
    output: Image
    block_models: tuple[tuple[BlockRegion, KMeansModel], ...]
    wall_time: float  # milliseconds


def block_seed(global_seed: int, grid_row: int, grid_col: int, grid_cols: int) -> int:
    ordinal = grid_row * grid_cols + grid_col + 1
    return mix64((global_seed & MASK64) ^ ((ordinal * GOLDEN_GAMMA) & MASK64))


def _cluster(img: Image, cfg: KMeansConfig) -> tuple[Image, KMeansModel]:
    model = run_kmeans(image_points(img), cfg)
    return render(img.dims, model.labels, model.centroids, img.maxval), model


def _cluster_block(block: Image, cfg: KMeansConfig) -> tuple[Image, KMeansModel]:
    return _cluster(block, cfg)


def run_whole_image_serial(img: Image, cfg: KMeansConfig) -> ClusteredResult:
    start = time.perf_counter()
    output, model = _cluster(img, cfg)
    elapsed = (time.perf_counter() - start) * 1e3
    region = BlockRegion(0, 0, 0, 0, img.width, img.height)
    return ClusteredResult(output, ((region, model),), elapsed)


def _block_jobs(img: Image, plan: ExecutionPlan):
    grid = compute_grid(img.dims, derive_block_shape(plan.strategy, img.dims))
    for region in grid.regions:
        cfg = replace(
            plan.kmeans,
            seed=block_seed(plan.kmeans.seed, region.grid_row, region.grid_col, grid.grid_cols),
        )
        yield region, cfg


def _finish(img: Image, regions, results, start: float) -> ClusteredResult:
    output = reassemble(img.dims, [(r, piece) for r, (piece, _) in zip(regions, results)])
    elapsed = (time.perf_counter() - start) * 1e3
    models = tuple((r, model) for r, (_, model) in zip(regions, results))
    return ClusteredResult(output, models, elapsed)


def run_block_serial(img: Image, plan: ExecutionPlan) -> ClusteredResult:
    if plan.mode is not Mode.BLOCK_SERIAL:
        raise ValueError(f"run_block_serial needs a block-serial plan, got {plan.mode.value}")
    start = time.perf_counter()
    regions, results = [], []
    for region, cfg in _block_jobs(img, plan):
        regions.append(region)
        results.append(_cluster_block(extract_block(img, region), cfg))
    return _finish(img, regions, results, start)


def run_block_parallel(img: Image, plan: ExecutionPlan, backend: str = "process") -> ClusteredResult:
    """Cluster blocks on a pool of ``plan.workers`` workers.

    ``backend`` picks processes (true CPU parallelism) or threads. Blocks are
    queued in row-major order and results are placed by region, so the output
    does not depend on completion order or pool size. The first failing block
    (in grid order) aborts the run with its exception.
    """
    if plan.mode is not Mode.BLOCK_PARALLEL:
        raise ValueError(f"run_block_parallel needs a block-parallel plan, got {plan.mode.value}")
    pools: dict[str, type[Executor]] = {"process": ProcessPoolExecutor, "thread": ThreadPoolExecutor}
    if backend not in pools:
        raise ValueError(f"unknown backend {backend!r}")

    start = time.perf_counter()
    jobs = list(_block_jobs(img, plan))
    with pools[backend](max_workers=plan.workers) as pool:
        futures = [pool.submit(_cluster_block, extract_block(img, r), cfg) for r, cfg in jobs]
        try:
            results = [f.result() for f in futures]
        except BaseException:
            for f in futures:
                f.cancel()
            raise
    return _finish(img, [r for r, _ in jobs], results, start)


def run_plan(img: Image, plan: ExecutionPlan, backend: str = "process") -> ClusteredResult:
    if plan.mode is Mode.WHOLE:
        return run_whole_image_serial(img, plan.kmeans)
    if plan.mode is Mode.BLOCK_SERIAL:
        return run_block_serial(img, plan)
    return run_block_parallel(img, plan, backend=backend)

"""Block-parallel K-means clustering of large raster images."""

from .bench import BenchRecord, efficiency, run_benchmark, speedup, write_csv
from .blocks import (
    BlockGrid,
    BlockRegion,
    BlockShape,
    Strategy,
    StrategyKind,
    compute_grid,
    derive_block_shape,
    extract_block,
    reassemble,
)
from .image import Dims, Image, decode_pnm, encode_pnm, generate_synthetic
from .kmeans import KMeansConfig, KMeansModel, canonicalize, init_kmeans_pp, lloyd_step, render, run_kmeans
from .runtime import (
    ClusteredResult,
    ExecutionPlan,
    Mode,
    block_seed,
    run_block_parallel,
    run_block_serial,
    run_whole_image_serial,
)

__version__ = "0.1.0"

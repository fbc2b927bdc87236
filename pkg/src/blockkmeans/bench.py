"""Speedup/efficiency metrics and the strategy x k x workers benchmark matrix."""

from __future__ import annotations

import csv
import io
import statistics
from dataclasses import dataclass, replace
from typing import Callable, Sequence

from .blocks import Strategy
from .image import Dims, Image
from .kmeans import KMeansConfig
from .runtime import ExecutionPlan, Mode, run_block_parallel, run_block_serial, run_whole_image_serial

CSV_HEADER = (
    "data_size,strategy,extent,k,workers,serial_ms,block_serial_ms,"
    "parallel_ms,speedup,efficiency"
)


def speedup(serial_ms: float, parallel_ms: float) -> float:
    if serial_ms <= 0 or parallel_ms <= 0:
        raise ValueError(f"times must be positive, got {serial_ms} and {parallel_ms}")
    return serial_ms / parallel_ms


def efficiency(speedup_value: float, workers: int) -> float:
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    if speedup_value <= 0:
        raise ValueError(f"speedup must be positive, got {speedup_value}")
    return speedup_value / workers


@dataclass(frozen=True)
class BenchRecord:
    data_size: Dims
    strategy: Strategy
    k: int
    workers: int
    serial_ms: float
    block_serial_ms: float
    parallel_ms: float
    speedup: float
    efficiency: float
    repetitions: int = 1
    aggregation: str = "median"

    @classmethod
    def from_times(cls, data_size, strategy, k, workers, serial_ms, block_serial_ms,
                   parallel_ms, repetitions=1):
        s = speedup(serial_ms, parallel_ms)
        return cls(data_size, strategy, k, workers, serial_ms, block_serial_ms,
                   parallel_ms, s, efficiency(s, workers), repetitions)


def _median_ms(run: Callable[[], float], repetitions: int) -> float:
    # a timer reading of exactly 0 would break the ratio; clamp to one nanosecond
    return max(statistics.median(run() for _ in range(repetitions)), 1e-6)


def run_benchmark(
    img: Image,
    strategies: Sequence[Strategy],
    ks: Sequence[int],
    workers_list: Sequence[int],
    kmeans: KMeansConfig,
    repetitions: int = 3,
    backend: str = "process",
    progress: Callable[[str], None] | None = None,
) -> list[BenchRecord]:
    """Time every (strategy, k, workers) cell, one measurement at a time.

    The whole-image baseline is measured once per k and the block-serial run
    once per (strategy, k); each timing is the median over ``repetitions``.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    log = progress or (lambda msg: None)

    whole_ms = {}
    for k in dict.fromkeys(ks):
        cfg = replace(kmeans, k=k)
        whole_ms[k] = _median_ms(lambda: run_whole_image_serial(img, cfg).wall_time, repetitions)
        log(f"whole k={k}: {whole_ms[k]:.3f} ms")

    records = []
    for strategy in strategies:
        for k in ks:
            cfg = replace(kmeans, k=k)
            serial_plan = ExecutionPlan(Mode.BLOCK_SERIAL, cfg, strategy)
            block_ms = _median_ms(lambda: run_block_serial(img, serial_plan).wall_time, repetitions)
            log(f"block-serial {strategy.name} k={k}: {block_ms:.3f} ms")
            for w in workers_list:
                plan = ExecutionPlan(Mode.BLOCK_PARALLEL, cfg, strategy, w)
                par_ms = _median_ms(
                    lambda: run_block_parallel(img, plan, backend=backend).wall_time, repetitions
                )
                log(f"block-parallel {strategy.name} k={k} workers={w}: {par_ms:.3f} ms")
                records.append(
                    BenchRecord.from_times(
                        img.dims, strategy, k, w, whole_ms[k], block_ms, par_ms, repetitions
                    )
                )
    return records


def write_csv(records: Sequence[BenchRecord]) -> bytes:
    buf = io.StringIO(newline="")
    buf.write(CSV_HEADER + "\n")
    for r in records:
        buf.write(
            f"{r.data_size.width}x{r.data_size.height},{r.strategy.name},{r.strategy.extent},"
            f"{r.k},{r.workers},{r.serial_ms:.6f},{r.block_serial_ms:.6f},"
            f"{r.parallel_ms:.6f},{r.speedup:.6f},{r.efficiency:.6f}\n"
        )
    return buf.getvalue().encode("utf-8")


def read_csv(data: bytes) -> list[dict]:
    """Parse CSV produced by write_csv back into typed rows."""
    rows = []
    for row in csv.DictReader(io.StringIO(data.decode("utf-8"))):
        w, h = row["data_size"].split("x")
        rows.append(
            {
                "data_size": Dims(int(w), int(h)),
                "strategy": row["strategy"],
                "extent": int(row["extent"]),
                "k": int(row["k"]),
                "workers": int(row["workers"]),
                **{
                    key: float(row[key])
                    for key in ("serial_ms", "block_serial_ms", "parallel_ms", "speedup", "efficiency")
                },
            }
        )
    return rows

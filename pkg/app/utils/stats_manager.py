import time
from contextlib import contextmanager
from typing import Optional

import psutil


class RunStats:
    """Wall time and resident memory of one solver run."""

    def __init__(self):
        self.wall_time_ms: int = 0
        self.memory_mb: Optional[float] = None
        self.memory_increase_mb: Optional[float] = None

    @contextmanager
    def measure(self):
        process = psutil.Process()
        start_memory = process.memory_info().rss / 1024 / 1024  # MB
        start_time = time.perf_counter()
        try:
            yield self
        finally:
            self.wall_time_ms = int((time.perf_counter() - start_time) * 1000)
            end_memory = process.memory_info().rss / 1024 / 1024
            self.memory_mb = round(end_memory, 2)
            self.memory_increase_mb = round(end_memory - start_memory, 2)


@contextmanager
def measure_resources():
    """Yield a RunStats that is filled in when the block exits."""
    stats = RunStats()
    with stats.measure():
        yield stats

import numpy as np

from app.utils.stats_manager import measure_resources


def test_measure_resources_fills_stats():
    with measure_resources() as stats:
        assert stats.memory_mb is None
        block = np.ones(2_000_000)
    assert block.sum() == 2_000_000
    assert stats.wall_time_ms >= 0
    assert stats.memory_mb > 0
    assert stats.memory_increase_mb is not None

from concurrent.futures import ProcessPoolExecutor

from .logger import get_logger

logger = get_logger(__name__)


def run_sharded(fn, shards, workers=1):
    """
    Apply `fn` to every shard and return the results in shard order.

    Args:
        fn: picklable callable taking one shard argument
        shards (list): work items; order defines output order
        workers (int): process count, inline execution when <= 1

    Returns:
        list: fn(shard) for each shard, in input order
    """
    shards = list(shards)
    if workers <= 1 or len(shards) <= 1:
        return [fn(s) for s in shards]
    logger.debug(f"dispatching {len(shards)} shards to {workers} workers")
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, shards))

''' Seeded, splittable random generators.

Every sampler in the package takes an explicit ``numpy.random.Generator``; workers get
independent streams spawned from one ``SeedSequence`` so results depend only on the seed
and the shard layout.
'''
import numpy as np


def make_rng(seed=None):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def spawn_rngs(seed, num):
    ss = np.random.SeedSequence(seed)
    return [np.random.Generator(np.random.PCG64(child)) for child in ss.spawn(num)]


def split_trials(trials, num_shards):
    """Split `trials` into `num_shards` nearly equal positive parts (empty parts dropped)."""
    num_shards = max(1, min(num_shards, trials)) if trials > 0 else 1
    base, extra = divmod(trials, num_shards)
    return [base + (1 if i < extra else 0) for i in range(num_shards) if base + (1 if i < extra else 0) > 0]

from .logger import setup_logger, get_logger
from .config import RunConfig, __version__
from .random_util import make_rng, spawn_rngs, split_trials
from .parallel import run_sharded
from .io_util import write_table, write_document, to_jsonable

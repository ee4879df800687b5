''' Run configuration shared by every subcommand. '''
import hashlib
import json
from dataclasses import dataclass, field, asdict

__version__ = "0.3.0"

# option names that only affect logging/plumbing and are kept out of the hash
_UNHASHED = ("out", "quiet", "log_dir", "workers")
_CORE_KEYS = ("subcommand", "seed", "workers", "out", "format", "precision_digits", "quiet", "log_dir")


@dataclass
class RunConfig:
    subcommand: str
    seed: int = 0
    workers: int = 1
    out: str = "-"
    format: str = "csv"
    precision_digits: int = 50
    quiet: bool = False
    log_dir: str = None
    grid_overrides: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.format not in ("csv", "json"):
            raise NotImplementedError(f"Unknown output format {self.format}")
        if self.workers < 1:
            raise ValueError(f"workers must be positive, got {self.workers}")
        if self.precision_digits < 10:
            raise ValueError(f"precision_digits must be at least 10, got {self.precision_digits}")

    @classmethod
    def from_args(cls, args, params_file=None):
        """
        Build a config from parsed argparse options. Values read from the JSON
        `params_file` fill in defaults; explicit flags win.
        """
        file_values = {}
        if params_file:
            with open(params_file) as f:
                file_values = json.load(f)
        args = vars(args).copy()
        core = {}
        for key in _CORE_KEYS:
            value = args.pop(key, None)
            if value is not None:
                core[key] = value
        args.pop("params_file", None)
        grid_overrides = dict(file_values.pop("grid_overrides", {}))
        for key in ("alpha", "a0", "i_med"):
            if args.get(key) is not None:
                grid_overrides[key] = args[key]
        options = dict(file_values.pop("options", {}))
        for key, value in file_values.items():
            if key in _CORE_KEYS:
                core.setdefault(key, value)
            else:
                options[key] = value
        options.update({k: v for k, v in args.items() if v is not None})
        return cls(grid_overrides=grid_overrides, options=options, **core)

    def canonical(self):
        d = asdict(self)
        for key in _UNHASHED:
            d.pop(key, None)
        return json.dumps(d, sort_keys=True, default=str)

    def config_hash(self):
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]

    def header(self):
        return {"version": __version__, "config_hash": self.config_hash(), "seed": self.seed,
                "subcommand": self.subcommand}

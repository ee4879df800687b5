''' Grid parameters and the interval partition of primes by norm.

Heights are carried as log H: the literal formulas live at triple-logarithmic scale and
H itself overflows a float long before they become non-degenerate.
'''
import math
from dataclasses import dataclass

SMALL = "small"
MEDIUM = "medium"
LARGE = "large"
OVERRIDE_KEYS = ("alpha", "a0", "i_med")


def exp_iter(x, k):
    for _ in range(k):
        x = math.exp(x)
    return x


def log_iter(x, k):
    for _ in range(k):
        if x <= 0:
            raise ValueError(f"iterated logarithm undefined at {x}")
        x = math.log(x)
    return x


@dataclass(frozen=True)
class GridParameters:
    log_H: float
    alpha: float
    a0: float
    i_med: int
    literal: bool = True

    def __post_init__(self):
        if not self.alpha > 1:
            raise ValueError(f"alpha must exceed 1, got {self.alpha}")
        if not self.a0 > 1:
            raise ValueError(f"a0 must exceed 1, got {self.a0}")
        if self.i_med < 1:
            raise ValueError(f"i_med must be positive, got {self.i_med}")

    @property
    def H(self):
        try:
            return math.exp(self.log_H)
        except OverflowError:
            return math.inf

    @property
    def log_alpha(self):
        return math.log(self.alpha)

    def to_dict(self):
        return {"log_H": self.log_H, "alpha": self.alpha, "a0": self.a0, "i_med": self.i_med,
                "literal": self.literal}


def literal_values(log_H):
    """(alpha, a0, i_med) from the literal height formulas; requires log^(3) H > 1."""
    l3 = log_iter(log_H, 2)
    if l3 <= 1:
        raise ValueError(f"literal grid parameters need log^(3) H > 1, got {l3:.4f}")
    alpha = math.exp(1.0 / exp_iter(l3 / 4, 3))
    a0 = exp_iter(l3 / 3, 3)
    i_med = math.ceil(exp_iter(l3 / 2, 2) / math.log(alpha))
    return alpha, a0, i_med


def grid_params(H=None, overrides=None, log_H=None):
    """
    Args:
        H: height; alternatively pass log_H for heights beyond float range
        overrides (dict): any of alpha, a0, i_med, used verbatim
    Returns:
        GridParameters
    """
    if log_H is None:
        if H is None or H <= 1:
            raise ValueError(f"height must exceed 1, got {H}")
        log_H = math.log(H)
    overrides = dict(overrides or {})
    unknown = set(overrides) - set(OVERRIDE_KEYS)
    if unknown:
        raise KeyError(f"Unknown grid parameter(s) {sorted(unknown)}")
    if all(k in overrides for k in OVERRIDE_KEYS):
        return GridParameters(log_H, float(overrides["alpha"]), float(overrides["a0"]), int(overrides["i_med"]),
                              literal=False)
    alpha, a0, i_med = literal_values(log_H)
    values = {"alpha": alpha, "a0": a0, "i_med": i_med, **overrides}
    return GridParameters(log_H, float(values["alpha"]), float(values["a0"]), int(values["i_med"]),
                          literal=not overrides)


def interval_index(norm, params):
    """
    Place a prime norm in the partition a0 * alpha^i <= N < a0 * alpha^(i+1).

    Returns:
        (tag, i): tag is SMALL (i None) when norm <= a0, else MEDIUM iff i < i_med, else LARGE
    """
    if norm < 2:
        raise ValueError(f"prime norms are at least 2, got {norm}")
    if norm <= params.a0:
        return SMALL, None
    i = int(math.floor((math.log(norm) - math.log(params.a0)) / params.log_alpha))
    if norm < 1e300:
        # settle float rounding at the interval ends
        while i > 0 and params.a0 * params.alpha ** i > norm:
            i -= 1
        while params.a0 * params.alpha ** (i + 1) <= norm:
            i += 1
    i = max(i, 0)
    return (MEDIUM if i < params.i_med else LARGE), i


def interval_bounds(i, params):
    """Log-norms of the ends of interval i."""
    return math.log(params.a0) + i * params.log_alpha, math.log(params.a0) + (i + 1) * params.log_alpha

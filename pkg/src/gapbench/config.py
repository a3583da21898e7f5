"""Runtime caps and environment overrides.

Every exponential-cost routine in the package refuses work beyond a cap
instead of thrashing the machine.  Caps are read from GAPBENCH_<NAME>
environment variables and clamped to hard ceilings chosen so memory use
stays within a desktop budget.
"""

import os

_HARD = {
    "BRUTE_CAP": 32,   # gap_bruteforce variable count
    "EVAL_CAP": 30,    # eval_all / counting variable count
    "SIM_CAP": 30,     # statevector qubit count
    "DIST_CAP": 28,    # full_distribution qubit count
    "NAIVE_CAP": 12,   # permanent_naive dimension
    "RYSER_CAP": 34,   # permanent_ryser dimension
    "THREADS": 256,
}

_DEFAULT = {
    "BRUTE_CAP": 28,
    "EVAL_CAP": 26,
    "SIM_CAP": 26,
    "DIST_CAP": 24,
    "NAIVE_CAP": 10,
    "RYSER_CAP": 30,
    "THREADS": 1,
}


def _read(name):
    raw = os.environ.get("GAPBENCH_" + name)
    if raw is None:
        return _DEFAULT[name]
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"GAPBENCH_{name} must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"GAPBENCH_{name} must be positive, got {value}")
    return min(value, _HARD[name])


def brute_cap() -> int:
    return _read("BRUTE_CAP")


def eval_cap() -> int:
    return _read("EVAL_CAP")


def sim_cap() -> int:
    return _read("SIM_CAP")


def dist_cap() -> int:
    return _read("DIST_CAP")


def naive_cap() -> int:
    return _read("NAIVE_CAP")


def ryser_cap() -> int:
    return _read("RYSER_CAP")


def thread_count() -> int:
    """Advisory thread count recorded in run configs.

    The library itself is pure numpy; BLAS-level threading is the only
    parallelism in play, so results are identical for any value here.
    """
    return _read("THREADS")

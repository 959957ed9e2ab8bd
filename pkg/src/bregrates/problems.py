"""Registry of the bundled problem configurations.

Four instances ship with the package (as JSON files under ``configs/``,
also directly usable with the command-line front end):

``scalar1``
    A = [1], x+ = 1, squared-norm penalty. The distance function has the
    closed form D(r) = 1/2 max(0, 1 - r)^2, so every derived quantity can
    be checked against pencil-and-paper values.
``diag8``
    Diagonal operator with singular values 2^-1 .. 2^-8, x+ = ones,
    squared-norm penalty. Severe ill-conditioning emulates an ill-posed
    operator at desk scale; D stays positive out to r ~ 296.
``en6``
    Diagonal operator with singular values 3^-1 .. 3^-6 and an elastic-net
    penalty: a genuinely nonsmooth penalty with a strongly convex part.
``benchmark4``
    x+ chosen inside the range of A^T with small preimage norm, so D(r)
    vanishes for r >= 2: the linear-rate benchmark regime. Profile grid
    only; the rate sweep needs D > 0 on the inverted window, which this
    instance deliberately violates.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .config import RunConfig, load_config

#: problems with a sweep section: the default suite for rate verification
SWEEP_PROBLEMS = ("scalar1", "diag8", "en6")
#: everything bundled, including the benchmark-regime instance
ALL_PROBLEMS = SWEEP_PROBLEMS + ("benchmark4",)


def config_path(name: str) -> Path:
    """Filesystem path of a bundled configuration."""
    if name not in ALL_PROBLEMS:
        raise KeyError(f"unknown problem {name!r}; bundled: {ALL_PROBLEMS}")
    return Path(resources.files("bregrates").joinpath(f"configs/{name}.json"))


def load(name: str) -> RunConfig:
    """Parse a bundled configuration into a RunConfig."""
    return load_config(config_path(name))

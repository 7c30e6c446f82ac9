"""Run configuration for the ptrinom command line."""

import argparse
import os
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

DEFAULT_L_RANGE = "0..10"
DEFAULT_MODE = "lemma1"
DEFAULT_FORMAT = "json"
DEFAULT_WORKERS = 1
DEFAULT_SEED = 20170101

WORKERS_ENV = "PTRINOM_WORKERS"

MODES = ("lemma1", "full", "both", "fraction")
FORMATS = ("json", "csv")


def parse_range(text: str) -> Tuple[int, ...]:
    """Parses "1..6", "4" or "1,3,5" (items may mix both) into sorted values.

    Raises:
        argparse.ArgumentTypeError: If the text is malformed or empty.
    """
    values = set()
    try:
        for item in text.split(","):
            item = item.strip()
            if ".." in item:
                low, high = item.split("..")
                values.update(range(int(low), int(high) + 1))
            elif item:
                values.add(int(item))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"Expected a range like 1..6, 4 or 1,3 but got {text!r}."
        ) from None
    if not values:
        raise argparse.ArgumentTypeError(f"Range {text!r} is empty.")
    if min(values) < 0:
        raise argparse.ArgumentTypeError(f"Range {text!r} has negative values.")
    return tuple(sorted(values))


def parse_ids(text: str) -> Tuple[str, ...]:
    ids = tuple(item.strip().lower() for item in text.split(",") if item.strip())
    if not ids:
        raise argparse.ArgumentTypeError("Expected at least one family id.")
    return ids


def workers_from_env(default: int = DEFAULT_WORKERS) -> int:
    value = os.environ.get(WORKERS_ENV)
    if value is None:
        return default
    try:
        workers = int(value)
    except ValueError:
        raise ValueError(
            f"{WORKERS_ENV} must be a positive integer but is {value!r}."
        ) from None
    if workers < 1:
        raise ValueError(f"{WORKERS_ENV} must be positive but is {workers}.")
    return workers


@dataclass
class RunConfig:
    """Options shared by every subcommand.

    Fields a subcommand does not use keep their defaults.
    """
    command: str
    families: Tuple[str, ...] = ()
    k_range: Tuple[int, ...] = (1,)
    l_range: Tuple[int, ...] = tuple(range(11))
    mode: str = DEFAULT_MODE
    out: Optional[str] = None
    format: str = DEFAULT_FORMAT
    workers: int = DEFAULT_WORKERS
    seed: int = DEFAULT_SEED
    negative: bool = False
    progress: bool = False
    verbosity: int = 0
    p: int = 2
    signs: Optional[str] = None
    r_range: Optional[Tuple[int, ...]] = None
    oracle: bool = False
    samples: int = 500
    fracs: List[str] = field(default_factory=list)
    quadratics: List[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.k_range or not self.l_range:
            raise ValueError("Ranges of k and l must be nonempty.")
        if self.mode not in MODES:
            raise ValueError(f"Mode must be one of {MODES} but is {self.mode}.")
        if self.format not in FORMATS:
            raise ValueError(
                f"Format must be one of {FORMATS} but is {self.format}."
            )
        if self.workers < 1:
            raise ValueError(f"Workers must be positive but is {self.workers}.")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        """Builds a config from parsed arguments, reading PTRINOM_WORKERS
        when --workers is absent."""
        workers = args.workers if args.workers is not None else workers_from_env()
        values = {
            name: getattr(args, name)
            for name in (
                "families", "k_range", "l_range", "mode", "out", "format",
                "seed", "negative", "progress", "verbosity", "p", "signs",
                "r_range", "oracle", "samples", "fracs", "quadratics",
            )
            if getattr(args, name, None) is not None
        }
        return cls(command=args.command, workers=workers, **values)

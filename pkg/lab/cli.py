"""
Shared plumbing for the management commands: run configuration, flag
parsing and the mapping of lab errors onto exit codes.
"""
import logging
from dataclasses import dataclass

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from .exceptions import InputError, NumericError, UsageError
from .reports import emit

logger = logging.getLogger(__name__)

INPUT_EXIT_CODE = 2
NUMERIC_EXIT_CODE = 1


def parse_range(text: str) -> list:
    """"a:b" or "a:b:step" (inclusive) or a single integer."""
    try:
        parts = [int(p) for p in text.split(":")]
    except ValueError as exc:
        raise UsageError(f"Cannot parse N range '{text}'") from exc
    if len(parts) == 1:
        start = stop = parts[0]
        step = 1
    elif len(parts) in (2, 3):
        start, stop = parts[0], parts[1]
        step = parts[2] if len(parts) == 3 else 1
    else:
        raise UsageError(f"Cannot parse N range '{text}'")
    if start < 1 or stop < start or step < 1:
        raise UsageError(f"Invalid N range '{text}'")
    return list(range(start, stop + 1, step))


@dataclass(frozen=True)
class RunConfig:
    digits: int
    N_values: tuple = ()
    u: str = "ipi"
    fmt: str = "json"
    out: str = None
    seed: int = 0

    def __post_init__(self):
        if self.digits < settings.KNOTLAB_MIN_DIGITS:
            raise UsageError(f"--digits must be at least {settings.KNOTLAB_MIN_DIGITS}, got {self.digits}")
        if self.fmt not in ("json", "csv"):
            raise UsageError(f"Unknown format '{self.fmt}'")

    @classmethod
    def from_options(cls, options):
        N_text = options.get("N")
        return cls(
            digits=options.get("digits") or settings.KNOTLAB_DEFAULT_DIGITS,
            N_values=tuple(parse_range(N_text)) if N_text else (),
            u=options.get("u") or "ipi",
            fmt=options.get("format") or "json",
            out=options.get("out"),
            seed=options.get("seed") or 0,
        )

    def as_dict(self):
        out = {"digits": self.digits, "u": self.u, "seed": self.seed}
        if self.N_values:
            out["N"] = [self.N_values[0], self.N_values[-1]]
        return out


class LabCommand(BaseCommand):
    """Base command: common flags, error mapping and report emission."""

    use_N = False
    use_u = False

    def add_arguments(self, parser):
        parser.add_argument("--digits", type=int, help="Working precision in decimal digits")
        parser.add_argument("--format", choices=["json", "csv"], default="json")
        parser.add_argument("--out", help="Write the report to this file instead of stdout")
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument("--table", help="Knot table file (defaults to KNOTLAB_TABLE_PATH)")
        if self.use_N:
            parser.add_argument("--N", help="Range a:b or a:b:step")
        if self.use_u:
            parser.add_argument("--u", default="ipi", help='"ipi", "ipi+0.3" or "a+bi"')
        self.add_lab_arguments(parser)

    def add_lab_arguments(self, parser):
        pass

    def run(self, config: RunConfig, options) -> dict:
        raise NotImplementedError

    def handle(self, *args, **options):
        try:
            config = RunConfig.from_options(options)
            report = self.run(config, options)
        except InputError as exc:
            logger.warning(f"{self.__module__.rsplit('.', 1)[-1]}: {exc}")
            raise CommandError(str(exc), returncode=INPUT_EXIT_CODE) from exc
        except NumericError as exc:
            logger.error(f"{self.__module__.rsplit('.', 1)[-1]}: {exc}")
            raise CommandError(str(exc), returncode=NUMERIC_EXIT_CODE) from exc
        emit(report, config.fmt, config.out, self.stdout)

"""Run manifest embedded in every report."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from .. import __version__
from ..lc_core.records import SCHEMA_VERSION, digest


@dataclass
class RunManifest:
    """What produced a report.

    Wall time is only recorded when requested; without it the same command,
    seed and inputs always yield the same bytes.
    """

    command: list[str]
    seed: int
    version: str = __version__
    input_digests: dict[str, str] = field(default_factory=dict)
    wall_time: Optional[float] = None

    @classmethod
    def for_argv(cls, argv: Sequence[str], seed: int) -> "RunManifest":
        return cls(list(argv), seed)

    def add_input(self, name: str, document: Any) -> None:
        self.input_digests[name] = digest(document)

    def as_record(self) -> dict[str, Any]:
        record: dict[str, Any] = {
            "schema": SCHEMA_VERSION,
            "command": self.command,
            "seed": self.seed,
            "version": self.version,
            "inputs": dict(sorted(self.input_digests.items())),
        }
        if self.wall_time is not None:
            record["wall_time"] = round(self.wall_time, 6)
        return record

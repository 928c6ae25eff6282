"""
Tools for reproducibility: the manifest written next to every output.
"""

from typing import Any

import xxhash
from pydantic import BaseModel, ConfigDict

from epsicomp import __version__


def digest(data: bytes) -> str:
    return f"xxh64:{xxhash.xxh64(data).hexdigest()}"


class RunManifest(BaseModel):
    """
    Everything needed to reproduce a run: the command, its fully resolved
    configuration, the seeds it used, the digest of its input data and the
    version of epsicomp that produced it.
    """

    command: str
    config: dict[str, Any]
    seeds: dict[str, int]
    input_digest: str | None = None
    version: str = __version__

    model_config = ConfigDict(frozen=True)

    def reproduces(self, other: "RunManifest") -> bool:
        """
        Whether two runs are expected to give bit-identical outputs. The
        worker count never changes results, so it is ignored.
        """

        def resolved(manifest: RunManifest) -> dict[str, Any]:
            return {k: v for k, v in manifest.config.items() if k != "threads"}

        return (
            self.command == other.command
            and resolved(self) == resolved(other)
            and self.seeds == other.seeds
            and self.input_digest == other.input_digest
            and self.version == other.version
        )

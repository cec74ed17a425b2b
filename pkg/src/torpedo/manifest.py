from __future__ import annotations

import sys
import logging
from typing import TYPE_CHECKING, Any

from pydantic import BaseModel, Field

from torpedo import __version__
from torpedo.json_utils import digest, pretty_json, to_jsonable, save_as_json


if TYPE_CHECKING:
    from pathlib import Path


logger = logging.getLogger(__name__)


class RunManifest(BaseModel):
    """Provenance of one command run; the digest covers the result document only."""

    command: str
    parameters: dict[str, Any]
    seed: int | None = None
    version: str = __version__
    digest: str
    wall_time: float | None = Field(default=None, exclude=True)


def build_manifest(
    command: str,
    parameters: dict[str, Any],
    result: Any,
    *,
    seed: int | None = None,
    wall_time: float | None = None,
) -> RunManifest:
    return RunManifest(
        command=command,
        parameters=to_jsonable(parameters),  # type: ignore[arg-type]
        seed=seed,
        digest=digest(result),
        wall_time=wall_time,
    )


def render_document(manifest: RunManifest, result: Any) -> str:
    """The stdout document: sorted keys, no timings, so reruns are byte-identical."""
    document = {'manifest': manifest.model_dump(mode='json'), 'result': to_jsonable(result)}
    return pretty_json(document, indent=2, max_line=100, sort_keys=True, expand_top_level=True)


def emit(
    command: str,
    parameters: dict[str, Any],
    result: Any,
    *,
    seed: int | None = None,
    wall_time: float | None = None,
    output: Path | None = None,
) -> RunManifest:
    """Print the manifest and result to stdout and optionally save the bare result to ``output``."""
    manifest = build_manifest(command, parameters, result, seed=seed, wall_time=wall_time)
    sys.stdout.write(render_document(manifest, result) + '\n')
    sys.stdout.flush()
    if output is not None:
        save_as_json(output, result)
        logger.info('Result written to %s', output)
    if wall_time is not None:
        logger.info('%s finished in %.2f s', command, wall_time)
    return manifest


__all__ = (
    'RunManifest',
    'build_manifest',
    'emit',
    'render_document',
)

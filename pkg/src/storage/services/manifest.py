"""Run manifests: JSON on disk, validated into ``RunManifest``.

Overrides are ``dotted.key=value`` strings matched case-insensitively against
the declared fields (``evolve.N_gen=2`` sets ``evolve.n_gen``).
"""

import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, Union

from pydantic import ValidationError

from src.config import settings
from src.static_values import MANIFEST_SCHEMA_VERSION
from src.storage.schema import RunManifest
from src.utils.errors import ManifestError


def _validate(data: Any) -> RunManifest:
    try:
        return RunManifest.model_validate(data)
    except ValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}" for err in exc.errors()
        )
        raise ManifestError(f"invalid manifest (schema version {MANIFEST_SCHEMA_VERSION}): {problems}") from exc


def _parse_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _set_dotted(data: Dict[str, Any], dotted: str, value: Any) -> None:
    node: Any = data
    parts = dotted.split(".")
    for depth, part in enumerate(parts):
        if not isinstance(node, dict):
            raise ManifestError(f"override {dotted!r}: {'.'.join(parts[:depth])} is not a section")
        matches = [key for key in node if key.lower() == part.lower()]
        if not matches:
            raise ManifestError(f"override {dotted!r}: unknown key {part!r}")
        key = matches[0]
        if depth == len(parts) - 1:
            # switching domains drops the other domain's fields
            if key == "name" and depth == 1 and parts[0].lower() == "domain":
                node.clear()
            node[key] = value
        else:
            node = node[key]


def apply_overrides(manifest: RunManifest, overrides: Iterable[str]) -> RunManifest:
    data = manifest.model_dump(mode="json")
    for override in overrides:
        dotted, sep, text = override.partition("=")
        if not sep or not dotted:
            raise ManifestError(f"override {override!r} is not of the form key=value")
        _set_dotted(data, dotted.strip(), _parse_value(text.strip()))
    return _validate(data)


def parse_manifest(text: str) -> RunManifest:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"manifest is not valid JSON: {exc}") from exc
    return _validate(data)


def dump_manifest(manifest: RunManifest) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(manifest.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"


def resolve_manifest_path(name: Union[str, Path]) -> Path:
    """A path as given, else a preset name under the presets directory."""
    path = Path(name)
    if path.exists():
        return path
    for candidate in (settings.presets_dir / path, settings.presets_dir / f"{path}.json"):
        if candidate.exists():
            return candidate
    raise ManifestError(f"no manifest or preset named {str(name)!r}")


def load_manifest(name: Union[str, Path], overrides: Iterable[str] = ()) -> RunManifest:
    path = resolve_manifest_path(name)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    return apply_overrides(parse_manifest(text), overrides)


def stamp(manifest: RunManifest) -> RunManifest:
    return manifest.model_copy(update={"created_at": datetime.now(timezone.utc).isoformat(timespec="seconds")})

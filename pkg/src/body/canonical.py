"""Canonical JSON serialization and change-aware file writes.

Every derived artifact (profiles, trees, views, lease store) goes through
these helpers so that identical inputs always produce identical bytes and
re-runs on unchanged state touch nothing on disk.
"""

from __future__ import annotations

import json
from pathlib import Path


def canonical_json(payload) -> str:
    """Deterministic JSON text: sorted keys, 2-space indent, trailing newline."""
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_text_if_changed(path: Path, text: str) -> bool:
    """Write only when content differs; returns True when bytes hit the disk."""
    path = Path(path)
    if path.exists() and path.read_text(encoding="utf-8") == text:
        return False
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return True


def load_json(path: Path):
    return json.loads(Path(path).read_text(encoding="utf-8"))

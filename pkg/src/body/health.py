"""Health verdict ingestion and deterministic graph coloring.

The monitoring platform stays authoritative for thresholds and alerts; this
module only projects its verdicts onto the topology. Two colorings are
computed per node: `effective` propagates severity upward (a bad camera
raises its floor group and ancestors, clamped at amber; red on an internal
node requires that node's own verdict) and `display_fill` inherits downward
(a verdict-less device shows the state of its access switch). Same tree plus
same feed always produces the same colors, and coloring never touches the
node or edge sets.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path

from .errors import MalformedFeed
from .graph import TopologyNode


class Level(IntEnum):
    GREEN = 0
    AMBER = 1
    RED = 2


FEED_LEVELS = {"OK": Level.GREEN, "WARNING": Level.AMBER, "CRITICAL": Level.RED}


@dataclass(frozen=True)
class HealthVerdict:
    level: Level
    source: str  # monitor_feed | propagated | inherited | default


def parse_verdict_feed(source) -> dict[str, Level]:
    """Read a `{hostname: OK|WARNING|CRITICAL}` JSON object.

    `source` may be a filesystem path or raw JSON text/bytes. Hostnames that
    match no topology node are kept in the returned map so the caller can
    report them instead of losing them.
    """
    if isinstance(source, Path):
        text = source.read_text(encoding="utf-8")
    elif isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str) and source.lstrip()[:1] not in ('{', '[', '"'):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedFeed(f"not JSON: {exc}") from None
    if not isinstance(data, dict):
        raise MalformedFeed(f"expected a JSON object, got {type(data).__name__}")
    verdicts: dict[str, Level] = {}
    for hostname, value in data.items():
        if value not in FEED_LEVELS:
            raise MalformedFeed(f"{hostname}: invalid level {value!r}")
        verdicts[str(hostname)] = FEED_LEVELS[value]
    return verdicts


@dataclass
class ColoredGraph:
    """Verdict projection over one tree; the tree itself is untouched."""

    root: TopologyNode
    effective: dict[str, HealthVerdict]
    display_fill: dict[str, Level]
    unmatched: list[str] = field(default_factory=list)

    def level(self, node_id: str) -> Level:
        verdict = self.effective.get(node_id)
        return verdict.level if verdict else Level.GREEN


def _own_level(node: TopologyNode, verdicts: dict[str, Level]) -> Level | None:
    hostname = node.metadata.get("hostname", node.id)
    return verdicts.get(hostname)


def propagate_colors(tree: TopologyNode, verdicts: dict[str, Level]) -> ColoredGraph:
    """Compute both colorings for one tree.

    effective(leaf) = own verdict or green. effective(internal) =
    max(own verdict, min(amber, max of children)); the amber clamp encodes
    "a degraded child is a warning upstream, never a critical by proxy".
    display_fill falls back to the nearest access-switch ancestor's effective
    color for nodes that carry no verdict of their own.
    """
    effective: dict[str, HealthVerdict] = {}
    display_fill: dict[str, Level] = {}
    matched: set[str] = set()

    def up(node: TopologyNode) -> Level:
        own = _own_level(node, verdicts)
        if own is not None:
            matched.add(node.metadata.get("hostname", node.id))
        if not node.children:
            level = own if own is not None else Level.GREEN
            effective[node.id] = HealthVerdict(
                level, "monitor_feed" if own is not None else "default"
            )
            return level
        derived = min(max(up(child) for child in node.children), Level.AMBER)
        level = max(own if own is not None else Level.GREEN, derived)
        if own is not None and own >= derived:
            source = "monitor_feed"
        elif derived > Level.GREEN:
            source = "propagated"
        else:
            source = "default"
        effective[node.id] = HealthVerdict(Level(level), source)
        return Level(level)

    up(tree)

    def down(node: TopologyNode, inherited: Level | None):
        own = _own_level(node, verdicts)
        if node.kind == "access_switch":
            inherited = effective[node.id].level
        is_verdictless_leaf = own is None and not node.children
        if is_verdictless_leaf and inherited is not None:
            display_fill[node.id] = inherited
        else:
            display_fill[node.id] = effective[node.id].level
        for child in node.children:
            down(child, inherited)

    down(tree, None)

    unmatched = sorted(set(verdicts) - matched)
    return ColoredGraph(root=tree, effective=effective, display_fill=display_fill, unmatched=unmatched)

"""Topology trees: per-switch views, the server graph, and their persistence.

Two graphs come out of classification. The per-switch tree groups resolved
endpoints into floor blocks recovered from their hostnames, hangs cascade
endpoints under a mini-switch node, and aggregates everything unresolved
into a single "others" quarantine block so inventory gaps stay visible. The
server graph chains core -> campus -> distribution -> access/servers from the
campus map.

Both persist as a directory hierarchy (one directory per internal node, one
JSON file per device) plus a canonical `_tree.json` per root: the filesystem
is the database, rebuildable from profiles + registry alone, and re-running
on unchanged input rewrites nothing.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .canonical import canonical_json, write_text_if_changed
from .classify import PortKind, SwitchClassification
from .registry import TopoMap, parse_hostname

# Declaration order doubles as the child sort order within a node.
NODE_KINDS = (
    "core",
    "campus",
    "distribution_switch",
    "access_switch",
    "floor_group",
    "camera",
    "mini_switch",
    "server",
    "quarantine_block",
    "unresolved_mac",
)
_KIND_ORDER = {kind: i for i, kind in enumerate(NODE_KINDS)}

QUARANTINE_LABEL = "others"


@dataclass
class TopologyNode:
    id: str
    kind: str
    label: str
    metadata: dict = field(default_factory=dict)
    children: list["TopologyNode"] = field(default_factory=list)

    def add(self, child: "TopologyNode") -> "TopologyNode":
        self.children.append(child)
        return child

    def sort(self) -> "TopologyNode":
        self.children.sort(key=lambda c: (_KIND_ORDER[c.kind], c.id))
        for child in self.children:
            child.sort()
        return self

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()

    def find(self, node_id: str) -> "TopologyNode | None":
        return next((n for n in self.walk() if n.id == node_id), None)

    def node_count(self) -> int:
        return sum(1 for _ in self.walk())

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "label": self.label,
            "metadata": self.metadata,
            "children": [c.to_dict() for c in self.children],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TopologyNode":
        return cls(
            id=data["id"],
            kind=data["kind"],
            label=data["label"],
            metadata=dict(data["metadata"]),
            children=[cls.from_dict(c) for c in data["children"]],
        )


def build_switch_tree(
    switch_id: str,
    classifications,
    resolutions,
    campus: str | None = None,
    hostname_pattern: str | None = None,
) -> TopologyNode:
    """Per-switch tree: floor groups, cascade nodes, and the quarantine block.

    Resolved endpoints land under `bld<building>-flr<floor>` groups keyed from
    their own hostnames; endpoints behind a mini-switch cascade port attach
    under one mini_switch node per (port, floor group). Everything without an
    identity-plus-floor (HIL values and registered assets with nonconforming
    names) lands under the single "others" block, each entry carrying the
    port / OUI vendor / parent switch triple a field visit needs.

    Endpoint leaves inside floor groups always render as kind "camera"; the
    concrete device role, when known, rides metadata.
    """
    parsed_switch = parse_hostname(switch_id, hostname_pattern)
    if campus is None:
        campus = parsed_switch.campus if parsed_switch else "unknown"
    root = TopologyNode(
        id=switch_id,
        kind="access_switch",
        label=switch_id,
        metadata={"campus": campus, "hostname": switch_id},
    )

    kind_by_port = {c.port: c.kind for c in classifications}
    floor_groups: dict[str, TopologyNode] = {}
    mini_switches: dict[tuple[str, str], TopologyNode] = {}
    quarantine: TopologyNode | None = None

    def floor_group(key: str) -> TopologyNode:
        if key not in floor_groups:
            floor_groups[key] = root.add(
                TopologyNode(
                    id=f"{switch_id}/{key}",
                    kind="floor_group",
                    label=key,
                    metadata={"campus": campus},
                )
            )
        return floor_groups[key]

    def others() -> TopologyNode:
        nonlocal quarantine
        if quarantine is None:
            quarantine = root.add(
                TopologyNode(
                    id=f"{switch_id}/{QUARANTINE_LABEL}",
                    kind="quarantine_block",
                    label=QUARANTINE_LABEL,
                    metadata={"campus": campus},
                )
            )
        return quarantine

    for resolution in resolutions:
        identity = resolution.identity
        parsed = None
        if identity is not None:
            parsed = identity.parsed or parse_hostname(identity.hostname, hostname_pattern)

        if resolution.status.is_resolved and parsed is not None:
            group = floor_group(parsed.floor_key)
            parent = group
            if kind_by_port.get(resolution.port) == PortKind.MINI_SWITCH_CASCADE:
                mini_key = (resolution.port, parsed.floor_key)
                if mini_key not in mini_switches:
                    mini_switches[mini_key] = group.add(
                        TopologyNode(
                            id=f"{switch_id}/{parsed.floor_key}/mini-{resolution.port}",
                            kind="mini_switch",
                            label=f"mini-switch @ {resolution.port}",
                            metadata={"campus": campus, "port": resolution.port, "parent_switch": switch_id},
                        )
                    )
                parent = mini_switches[mini_key]
            metadata = {
                "campus": campus,
                "hostname": identity.hostname,
                "mac": resolution.mac.text,
                "ip": identity.ip,
                "port": resolution.port,
                "status": resolution.status.value,
                "wattage_check": resolution.wattage_check.value,
            }
            if identity.model:
                metadata["model"] = identity.model
            if parsed.role != "cam":
                metadata["role"] = parsed.role
            parent.add(
                TopologyNode(id=identity.hostname, kind="camera", label=identity.hostname, metadata=metadata)
            )
        else:
            # HIL values and resolved-but-nonconforming names: quarantined,
            # never dropped.
            metadata = {
                "campus": campus,
                "mac": resolution.mac.text,
                "port": resolution.port,
                "oui_vendor": resolution.oui.vendor if resolution.oui else "unknown",
                "parent_switch": switch_id,
                "status": resolution.status.value,
            }
            if identity is not None:
                metadata["hostname"] = identity.hostname
                metadata["ip"] = identity.ip
            others().add(
                TopologyNode(
                    id=f"{switch_id}/{QUARANTINE_LABEL}/{resolution.mac.text}",
                    kind="unresolved_mac",
                    label=resolution.mac.text,
                    metadata=metadata,
                )
            )

    return root.sort()


def build_switch_tree_from(
    result: SwitchClassification,
    campus: str | None = None,
    hostname_pattern: str | None = None,
) -> TopologyNode:
    tree = build_switch_tree(
        result.switch_id,
        result.classifications,
        result.resolutions,
        campus=campus,
        hostname_pattern=hostname_pattern,
    )
    if result.uplink_port:
        tree.metadata["uplink_port"] = result.uplink_port
        tree.metadata["uplink_evidence"] = list(result.uplink_evidence)
    if result.ambiguous_ports:
        tree.metadata["ambiguous_uplink_ports"] = list(result.ambiguous_ports)
    return tree


def build_server_graph(
    topo_map: TopoMap, server_metadata: dict[str, dict] | None = None
) -> TopologyNode:
    """Core -> campus -> distribution -> access/server dependency chain."""
    server_metadata = server_metadata or {}
    root = TopologyNode(id="core", kind="core", label="core", metadata={"hostname": "core"})
    campus_nodes: dict[str, TopologyNode] = {}
    switch_nodes: dict[str, TopologyNode] = {}

    for campus in sorted(topo_map.campuses):
        campus_nodes[campus] = root.add(
            TopologyNode(
                id=f"campus-{campus}",
                kind="campus",
                label=campus,
                metadata={"campus": campus},
            )
        )
        for dist in sorted(topo_map.campuses[campus]):
            dist_node = campus_nodes[campus].add(
                TopologyNode(
                    id=dist,
                    kind="distribution_switch",
                    label=dist,
                    metadata={"campus": campus, "hostname": dist},
                )
            )
            switch_nodes[dist] = dist_node
            for access in sorted(topo_map.campuses[campus][dist]):
                switch_nodes[access] = dist_node.add(
                    TopologyNode(
                        id=access,
                        kind="access_switch",
                        label=access,
                        metadata={"campus": campus, "hostname": access},
                    )
                )

    for server in topo_map.servers:
        parent = switch_nodes[server["parent"]]
        metadata = {"campus": server["campus"], "hostname": server["id"]}
        metadata.update(server_metadata.get(server["id"], {}))
        parent.add(TopologyNode(id=server["id"], kind="server", label=server["id"], metadata=metadata))

    return root.sort()


_UNSAFE_SEGMENT = re.compile(r"[^A-Za-z0-9._-]")


def _fs_segment(text: str) -> str:
    return _UNSAFE_SEGMENT.sub("-", text)


TOPOLOGY_DIRNAME = "topology"
SERVER_GRAPH_DIRNAME = "_srv"
TREE_FILENAME = "_tree.json"


def tree_dir(root: TopologyNode, state_dir: Path) -> Path:
    base = Path(state_dir) / TOPOLOGY_DIRNAME
    if root.kind == "core":
        return base / SERVER_GRAPH_DIRNAME
    campus = root.metadata.get("campus", "unknown")
    return base / _fs_segment(campus) / _fs_segment(root.id)


def persist_tree(root: TopologyNode, state_dir: Path) -> list[Path]:
    """Mirror the tree onto the filesystem; returns the files actually written.

    Internal nodes become directories, device leaves become `<id>.json`
    files, and the root gets the full canonical `_tree.json`. Unchanged
    content is never rewritten, and files from a previous shape of the tree
    are pruned, so the directory is always exactly the current tree.
    """
    base = tree_dir(root, state_dir)
    manifest: dict[Path, str] = {base / TREE_FILENAME: canonical_json(root.to_dict())}

    def descend(node: TopologyNode, directory: Path):
        for child in node.children:
            if child.children:
                descend(child, directory / _fs_segment(child.label))
            else:
                manifest[directory / f"{_fs_segment(child.label)}.json"] = canonical_json(child.to_dict())

    descend(root, base)

    written = [path for path, text in sorted(manifest.items()) if write_text_if_changed(path, text)]

    # Prune anything that is no longer part of the tree.
    if base.is_dir():
        expected = set(manifest)
        for path in sorted(base.rglob("*"), reverse=True):
            if path.is_file() and path not in expected:
                path.unlink()
            elif path.is_dir() and not any(path.iterdir()):
                path.rmdir()
    return written


def load_tree(root_dir: Path) -> TopologyNode:
    from .canonical import load_json

    return TopologyNode.from_dict(load_json(Path(root_dir) / TREE_FILENAME))


# ---------------------------------------------------------------------------
# View export
# ---------------------------------------------------------------------------

HEALTH_COLORS = {0: "#2e7d32", 1: "#ff8f00", 2: "#c62828"}  # green, amber, red

CAMPUS_PALETTE = (
    "#4e79a7",
    "#f28e2b",
    "#59a14f",
    "#b07aa1",
    "#76b7b2",
    "#edc948",
    "#ff9da7",
    "#9c755f",
)

NEUTRAL_FILL = "#9e9e9e"

_TOOLTIP_KEYS = (
    "hostname",
    "ip",
    "mac",
    "model",
    "port",
    "oui_vendor",
    "parent_switch",
    "stream_count",
    "status",
    "role",
)


def campus_fill_map(campuses) -> dict[str, str]:
    return {c: CAMPUS_PALETTE[i % len(CAMPUS_PALETTE)] for i, c in enumerate(sorted(campuses))}


def export_view(root: TopologyNode, colored=None, view: str = "sw", campus_fills: dict[str, str] | None = None) -> dict:
    """Flat renderer-agnostic node/edge JSON payload.

    Border always encodes the upward-propagated health verdict. Fill encodes
    campus affiliation on the server view; on per-switch views it encodes the
    inherited health (a verdict-less device shows its parent switch's state).
    """
    campus_fills = campus_fills or campus_fill_map(
        {n.metadata.get("campus") for n in root.walk() if n.metadata.get("campus")}
    )
    effective = colored.effective if colored else {}
    display_fill = colored.display_fill if colored else {}

    nodes = []
    edges = []
    for node in root.walk():
        level = effective.get(node.id)
        border = HEALTH_COLORS[level.level if level else 0]
        if view == "srv":
            campus = node.metadata.get("campus")
            fill = campus_fills.get(campus, NEUTRAL_FILL)
        else:
            fill = HEALTH_COLORS[display_fill.get(node.id, 0)]
        tooltip = {k: node.metadata[k] for k in _TOOLTIP_KEYS if k in node.metadata}
        nodes.append(
            {
                "id": node.id,
                "kind": node.kind,
                "label": node.label,
                "fill": fill,
                "border": border,
                "tooltip": tooltip,
            }
        )
        for child in node.children:
            edges.append({"source": node.id, "target": child.id})

    return {"nodes": nodes, "edges": edges}

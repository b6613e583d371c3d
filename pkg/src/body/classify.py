"""Deterministic port classification and endpoint resolution.

The cascade works from the strongest signal down: LLDP neighbor identity
anchors the switch in the hierarchy (uplink vs managed cascade), PoE delivery
state plus MAC density discriminate the edge port types, the sovereign
registry turns a MAC into an identity and a floor, the OUI prefix supplies a
device-class hypothesis for unregistered MACs, and the PoE wattage signature
corroborates camera identities without ever changing a verdict.

Identity evidence always dominates class evidence: a registry match never
downgrades to an OUI-only resolution, and wattage is advisory only. MACs that
exhaust every signal are not dropped; they come out as *_HIL values carrying
the context a field technician needs.
"""

from __future__ import annotations

import csv
import fnmatch
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import yaml

from .collection import InterfaceState, SwitchProfile
from .errors import AmbiguousUplink, MalformedLine
from .registry import (
    AssetRecord,
    MacAddress,
    OuiDatabase,
    OuiEntry,
    Registry,
    TopoMap,
    parse_hostname,
)


class PortKind(str, Enum):
    UPLINK = "UPLINK"
    MANAGED_CASCADE = "MANAGED_CASCADE"
    MINI_SWITCH_CASCADE = "MINI_SWITCH_CASCADE"
    CAMERA = "CAMERA"
    SERVER = "SERVER"
    EMPTY = "EMPTY"
    UNKNOWN = "UNKNOWN"


# Endpoint-bearing kinds: their MACs enter resolution. Uplink and managed
# cascade ports carry the rest of the fabric, not endpoints.
ENDPOINT_KINDS = (
    PortKind.MINI_SWITCH_CASCADE,
    PortKind.CAMERA,
    PortKind.SERVER,
    PortKind.UNKNOWN,
)


class ResolutionStatus(str, Enum):
    RESOLVED_DIRECT_POE = "RESOLVED_DIRECT_POE"
    RESOLVED_NOT_POE = "RESOLVED_NOT_POE"
    UNREGISTERED_HIL = "UNREGISTERED_HIL"
    UNKNOWN_HIL = "UNKNOWN_HIL"

    @property
    def is_hil(self) -> bool:
        return self in (ResolutionStatus.UNREGISTERED_HIL, ResolutionStatus.UNKNOWN_HIL)

    @property
    def is_resolved(self) -> bool:
        return not self.is_hil


class WattageCheck(str, Enum):
    CONFIRMED = "confirmed"
    INCONCLUSIVE = "inconclusive"
    CONTRADICTED = "contradicted"
    NOT_APPLICABLE = "not_applicable"


EVIDENCE_ORDER = ("lldp_name", "mac_density", "poe_state", "registry_match", "oui", "wattage", "operator")


def _order_evidence(tags: set[str]) -> tuple[str, ...]:
    return tuple(sorted(tags, key=EVIDENCE_ORDER.index))


@dataclass(frozen=True)
class PortClassification:
    port: str
    kind: PortKind
    evidence: tuple[str, ...]


@dataclass(frozen=True)
class EndpointResolution:
    mac: MacAddress
    port: str
    status: ResolutionStatus
    identity: AssetRecord | None
    oui: OuiEntry | None
    floor: int | None
    wattage_check: WattageCheck


@dataclass
class ClassifyConfig:
    """Loaded classify_config.yml plus the tables it references."""

    overlay_vlan: int | None = None  # None means all VLANs
    uplink_name_patterns: list[str] = field(default_factory=lambda: ["*core*", "*dist*"])
    cascade_name_patterns: list[str] = field(default_factory=list)
    hostname_pattern: str | None = None
    oui_db: OuiDatabase = field(default_factory=lambda: OuiDatabase([]))
    wattage_profiles: dict[str, tuple[float, float]] = field(default_factory=dict)

    @classmethod
    def load(cls, path: Path) -> "ClassifyConfig":
        path = Path(path)
        data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
        vlan = data.get("overlay_vlan", "all")
        cfg = cls(
            overlay_vlan=None if vlan in (None, "all") else int(vlan),
            uplink_name_patterns=[str(p) for p in data.get("uplink_name_patterns", ["*core*", "*dist*"])],
            cascade_name_patterns=[str(p) for p in data.get("cascade_name_patterns", [])],
            hostname_pattern=data.get("hostname_pattern"),
        )
        from .registry import load_oui_db  # local import keeps module load light

        if data.get("oui_csv"):
            cfg.oui_db = load_oui_db(path.parent / data["oui_csv"])
        if data.get("wattage_profiles"):
            cfg.wattage_profiles = load_wattage_profiles(path.parent / data["wattage_profiles"])
        return cfg

    def parse_hostname(self, raw: str):
        return parse_hostname(raw, self.hostname_pattern)


def load_wattage_profiles(path: Path) -> dict[str, tuple[float, float]]:
    """Known per-model PoE draw envelopes, `model,min_w,max_w` CSV."""
    profiles: dict[str, tuple[float, float]] = {}
    with Path(path).open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header] != ["model", "min_w", "max_w"]:
            raise MalformedLine(str(path), 1, f"expected header model,min_w,max_w, got {header}")
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise MalformedLine(str(path), line_no, f"expected 3 columns, got {len(row)}")
            try:
                profiles[row[0].strip()] = (float(row[1]), float(row[2]))
            except ValueError as exc:
                raise MalformedLine(str(path), line_no, str(exc)) from None
    return profiles


def _mac_counts(profile: SwitchProfile, overlay_vlan: int | None) -> dict[str, int]:
    counts: dict[str, int] = {}
    for entry in profile.mac_table:
        if overlay_vlan is not None and entry.vlan != overlay_vlan:
            continue
        counts[entry.port] = counts.get(entry.port, 0) + 1
    return counts


def _matches_any(name: str, patterns: list[str]) -> bool:
    return any(fnmatch.fnmatchcase(name, pattern) for pattern in patterns)


def _neighbor_is_uplink(
    neighbor_name: str, self_tier: int | None, topo_map: TopoMap, config: ClassifyConfig
) -> bool:
    if _matches_any(neighbor_name, config.uplink_name_patterns):
        return True
    parsed = config.parse_hostname(neighbor_name)
    if parsed is None or parsed.role != "sw":
        return False
    neighbor_tier = topo_map.tier_of(neighbor_name)
    if neighbor_tier is None:
        return False
    return self_tier is None or neighbor_tier < self_tier


def _neighbor_is_cascade(
    neighbor_name: str, self_tier: int | None, topo_map: TopoMap, config: ClassifyConfig
) -> bool:
    if _matches_any(neighbor_name, config.cascade_name_patterns):
        return True
    parsed = config.parse_hostname(neighbor_name)
    if parsed is None or parsed.role != "sw":
        return False
    neighbor_tier = topo_map.tier_of(neighbor_name)
    if neighbor_tier is None or self_tier is None:
        return False
    return neighbor_tier > self_tier


def identify_uplink(
    profile: SwitchProfile,
    config: ClassifyConfig,
    topo_map: TopoMap,
    operator_choice: str | None = None,
) -> tuple[str, tuple[str, ...]]:
    """Anchor the switch: which local port points toward the core?

    LLDP neighbor identity is the primary signal; where it is absent the port
    carrying the strictly largest MAC population is the uplink, because the
    upstream fabric aggregates every other switch's table. A tie in the
    fallback is not broken automatically: uplink validation is a human
    checkpoint, so AmbiguousUplink is raised for the HIL path instead.

    An operator_choice (recorded during onboarding) short-circuits both rules.
    """
    if operator_choice:
        return operator_choice, ("operator",)

    self_tier = topo_map.tier_of(profile.switch_id)
    for neighbor in profile.lldp_neighbors:
        if _neighbor_is_uplink(neighbor.neighbor_name, self_tier, topo_map, config):
            return neighbor.local_port, ("lldp_name",)

    counts = _mac_counts(profile, config.overlay_vlan)
    if not counts:
        raise AmbiguousUplink(profile.switch_id, [])
    top = max(counts.values())
    candidates = sorted(port for port, n in counts.items() if n == top)
    if len(candidates) > 1:
        raise AmbiguousUplink(profile.switch_id, candidates)
    return candidates[0], ("mac_density",)


def classify_ports(
    profile: SwitchProfile,
    uplink_port: str,
    registry: Registry,
    topo_map: TopoMap,
    config: ClassifyConfig,
    uplink_evidence: tuple[str, ...] = ("lldp_name",),
) -> list[PortClassification]:
    """Assign exactly one kind to every interface, in cascade precedence order."""
    counts = _mac_counts(profile, config.overlay_vlan)
    self_tier = topo_map.tier_of(profile.switch_id)
    cascade_ports = {
        n.local_port
        for n in profile.lldp_neighbors
        if _neighbor_is_cascade(n.neighbor_name, self_tier, topo_map, config)
    }

    out: list[PortClassification] = []
    for iface in profile.interfaces:
        port = iface.port
        mac_count = counts.get(port, 0)
        delivering = iface.poe.delivering
        server_evidence = (
            _server_signal(profile, port, registry, config)
            if not delivering and mac_count == 1
            else set()
        )
        if port == uplink_port:
            kind, evidence = PortKind.UPLINK, set(uplink_evidence)
        elif port in cascade_ports:
            kind, evidence = PortKind.MANAGED_CASCADE, {"lldp_name"}
        elif delivering and mac_count > 1:
            kind, evidence = PortKind.MINI_SWITCH_CASCADE, {"poe_state", "mac_density"}
        elif delivering and mac_count == 1:
            kind, evidence = PortKind.CAMERA, {"poe_state", "mac_density"}
        elif server_evidence:
            kind, evidence = PortKind.SERVER, server_evidence
        elif not iface.link_up and mac_count == 0:
            kind, evidence = PortKind.EMPTY, set()
        else:
            kind, evidence = PortKind.UNKNOWN, set()
        out.append(PortClassification(port=port, kind=kind, evidence=_order_evidence(evidence)))
    return out


def _server_signal(
    profile: SwitchProfile, port: str, registry: Registry, config: ClassifyConfig
) -> set[str]:
    """Positive server evidence for the single MAC on this port, if any."""
    macs = profile.macs_on(port, config.overlay_vlan)
    if len(macs) != 1:
        return set()
    record = registry.lookup(macs[0])
    if record is not None and record.parsed is not None and record.parsed.role == "srv":
        return {"registry_match"}
    entry = config.oui_db.lookup(macs[0])
    if entry is not None and entry.device_class == "server":
        return {"oui"}
    return set()


def resolve_endpoint(
    mac: MacAddress,
    port_class: PortClassification,
    registry: Registry,
    oui_db: OuiDatabase,
    wattage_profiles: dict[str, tuple[float, float]],
    port_poe: InterfaceState | None,
    hostname_pattern: str | None = None,
) -> EndpointResolution:
    """Resolve one visible MAC to an identity, or to an explicit HIL value."""
    identity = registry.lookup(mac)
    oui = oui_db.lookup(mac)
    if identity is not None:
        status = (
            ResolutionStatus.RESOLVED_DIRECT_POE
            if port_class.kind == PortKind.CAMERA
            else ResolutionStatus.RESOLVED_NOT_POE
        )
        parsed = identity.parsed or parse_hostname(identity.hostname, hostname_pattern)
        floor = parsed.floor if parsed else None
    elif oui is not None:
        status, floor = ResolutionStatus.UNREGISTERED_HIL, None
    else:
        status, floor = ResolutionStatus.UNKNOWN_HIL, None

    wattage = WattageCheck.NOT_APPLICABLE
    if (
        status == ResolutionStatus.RESOLVED_DIRECT_POE
        and port_poe is not None
        and port_poe.poe.delivering
    ):
        # Single-MAC PoE port: the delivered watts are attributable to this
        # device, so the model envelope is checkable.
        envelope = wattage_profiles.get(identity.model or "")
        if envelope is None:
            wattage = WattageCheck.INCONCLUSIVE
        elif envelope[0] <= port_poe.poe.power_watts <= envelope[1]:
            wattage = WattageCheck.CONFIRMED
        else:
            wattage = WattageCheck.CONTRADICTED

    return EndpointResolution(
        mac=mac,
        port=port_class.port,
        status=status,
        identity=identity,
        oui=oui,
        floor=floor,
        wattage_check=wattage,
    )


@dataclass
class SwitchClassification:
    """classify_switch output for one switch."""

    switch_id: str
    uplink_port: str | None
    uplink_evidence: tuple[str, ...]
    classifications: list[PortClassification]
    resolutions: list[EndpointResolution]
    ambiguous_ports: list[str] = field(default_factory=list)

    @property
    def needs_uplink_hil(self) -> bool:
        return self.uplink_port is None

    @property
    def hil_resolutions(self) -> list[EndpointResolution]:
        return [r for r in self.resolutions if r.status.is_hil]

    @property
    def resolved(self) -> list[EndpointResolution]:
        return [r for r in self.resolutions if r.status.is_resolved]

    def port_kind(self, port: str) -> PortKind | None:
        return next((c.kind for c in self.classifications if c.port == port), None)


def classify_switch(
    profile: SwitchProfile,
    registry: Registry,
    topo_map: TopoMap,
    config: ClassifyConfig,
    operator_uplink: str | None = None,
) -> SwitchClassification:
    """Run the full cascade for one switch.

    Every MAC visible on an endpoint-class port lands in exactly one
    resolution; nothing is silently dropped. An ambiguous uplink aborts the
    cascade for this switch and reports it as a HIL-required outcome with an
    empty classification set.
    """
    try:
        uplink_port, uplink_evidence = identify_uplink(profile, config, topo_map, operator_uplink)
    except AmbiguousUplink as exc:
        return SwitchClassification(
            switch_id=profile.switch_id,
            uplink_port=None,
            uplink_evidence=(),
            classifications=[],
            resolutions=[],
            ambiguous_ports=exc.ports,
        )

    classifications = classify_ports(
        profile, uplink_port, registry, topo_map, config, uplink_evidence
    )
    by_port = {c.port: c for c in classifications}

    resolutions: list[EndpointResolution] = []
    enriched: dict[str, set[str]] = {}
    seen_macs: set[MacAddress] = set()
    for entry in profile.mac_table:
        if config.overlay_vlan is not None and entry.vlan != config.overlay_vlan:
            continue
        port_class = by_port[entry.port]
        if port_class.kind not in ENDPOINT_KINDS:
            continue
        if entry.mac in seen_macs:
            # A flapping MAC seen on two endpoint ports still resolves exactly
            # once; the first port in canonical order hosts it.
            continue
        seen_macs.add(entry.mac)
        resolution = resolve_endpoint(
            mac=entry.mac,
            port_class=port_class,
            registry=registry,
            oui_db=config.oui_db,
            wattage_profiles=config.wattage_profiles,
            port_poe=profile.interface(entry.port),
            hostname_pattern=config.hostname_pattern,
        )
        resolutions.append(resolution)
        tags = enriched.setdefault(entry.port, set())
        if resolution.identity is not None:
            tags.add("registry_match")
        elif resolution.oui is not None:
            tags.add("oui")
        if resolution.wattage_check in (WattageCheck.CONFIRMED, WattageCheck.CONTRADICTED):
            tags.add("wattage")

    # Fold resolution corroboration back into the port evidence, preserving
    # cascade order (identity evidence after structural, before wattage).
    final = [
        PortClassification(
            port=c.port,
            kind=c.kind,
            evidence=_order_evidence(set(c.evidence) | enriched.get(c.port, set())),
        )
        if c.kind in ENDPOINT_KINDS
        else c
        for c in classifications
    ]

    resolutions.sort(key=lambda r: (r.port, r.mac))
    return SwitchClassification(
        switch_id=profile.switch_id,
        uplink_port=uplink_port,
        uplink_evidence=uplink_evidence,
        classifications=final,
        resolutions=resolutions,
    )

"""Per-switch state collection: transports, transcript parsing, persistence.

A collection session opens a transport to one switch, runs the four commands
its dialect defines, parses the transcripts into the vendor-agnostic
SwitchProfile, and persists it as `_profile.json`. The persisted profile is
the decoupling point: everything downstream reads profiles, never the
network, so a dead switch degrades to "stale data" instead of "no data".
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Protocol

import yaml

from .canonical import canonical_json, load_json, write_text_if_changed
from .dialects import (
    DIALECTS,
    SECTIONS,
    COMMAND_SECTIONS,
    Dialect,
    RawInterfaceRow,
    RawLldpRow,
    RawMacRow,
    RawPoeRow,
    SkippedRow,
    get_dialect,
    parse_section,
)
from .errors import InvalidProfile, MissingProfile, TransportUnavailable
from .registry import MacAddress

logger = logging.getLogger(__name__)

PROFILE_FILENAME = "_profile.json"
PROFILE_DIRNAME = "profiles_sw"


def normalize_mac(raw: str) -> MacAddress:
    """Canonicalize any accepted vendor spelling of a MAC address."""
    return MacAddress.parse(raw)


@dataclass(frozen=True)
class PoeState:
    capable: bool
    delivering: bool
    power_watts: float
    poe_class: int | None = None


@dataclass(frozen=True)
class InterfaceState:
    port: str
    link_up: bool
    speed_mbps: int
    poe: PoeState

    def check(self):
        if self.poe.delivering and not self.poe.capable:
            raise InvalidProfile(f"port {self.port}: delivering PoE while not capable")
        if self.poe.delivering and self.poe.power_watts <= 0:
            raise InvalidProfile(f"port {self.port}: delivering PoE at {self.poe.power_watts} W")
        if not self.link_up and self.poe.delivering:
            raise InvalidProfile(f"port {self.port}: delivering PoE with link down")


@dataclass(frozen=True)
class MacTableEntry:
    port: str
    mac: MacAddress
    vlan: int


@dataclass(frozen=True)
class LldpNeighbor:
    local_port: str
    neighbor_name: str
    neighbor_port: str


@dataclass(frozen=True)
class SwitchMeta:
    """Hardware facts recorded at onboarding time (meta.yml), not collected."""

    switch_id: str
    dialect: str
    model: str = ""
    firmware: str = ""
    serial: str = ""
    poe_budget_watts: float = 0.0

    @classmethod
    def from_yaml(cls, path: Path) -> "SwitchMeta":
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        return cls(
            switch_id=str(data["switch_id"]),
            dialect=str(data["dialect"]),
            model=str(data.get("model", "")),
            firmware=str(data.get("firmware", "")),
            serial=str(data.get("serial", "")),
            poe_budget_watts=float(data.get("poe_budget_watts", 0.0)),
        )


@dataclass
class SwitchProfile:
    """Vendor-agnostic hardware state of one switch at collection time."""

    switch_id: str
    vendor_dialect: str
    model: str
    firmware: str
    serial: str
    poe_budget_watts: float
    interfaces: list[InterfaceState]
    mac_table: list[MacTableEntry]
    lldp_neighbors: list[LldpNeighbor]
    collected_at: str

    def __post_init__(self):
        self.interfaces = sorted(self.interfaces, key=lambda i: i.port)
        self.mac_table = sorted(self.mac_table, key=lambda e: (e.port, e.mac))
        self.lldp_neighbors = sorted(
            self.lldp_neighbors, key=lambda n: (n.local_port, n.neighbor_name)
        )

    def validate(self) -> "SwitchProfile":
        if self.vendor_dialect not in DIALECTS:
            raise InvalidProfile(f"unknown dialect {self.vendor_dialect!r}")
        ports = {i.port for i in self.interfaces}
        if len(ports) != len(self.interfaces):
            raise InvalidProfile(f"{self.switch_id}: duplicate interface names")
        for iface in self.interfaces:
            iface.check()
        for entry in self.mac_table:
            if entry.port not in ports:
                raise InvalidProfile(
                    f"{self.switch_id}: MAC {entry.mac} on unknown port {entry.port}"
                )
        if len(set(self.mac_table)) != len(self.mac_table):
            raise InvalidProfile(f"{self.switch_id}: duplicate (port, mac, vlan) entries")
        delivering = sum(i.poe.power_watts for i in self.interfaces if i.poe.delivering)
        if self.poe_budget_watts and delivering > self.poe_budget_watts + 1e-9:
            raise InvalidProfile(
                f"{self.switch_id}: delivering {delivering:.1f} W exceeds budget "
                f"{self.poe_budget_watts:.1f} W"
            )
        return self

    def macs_on(self, port: str, vlan: int | None = None) -> list[MacAddress]:
        return [
            e.mac
            for e in self.mac_table
            if e.port == port and (vlan is None or e.vlan == vlan)
        ]

    def interface(self, port: str) -> InterfaceState | None:
        return next((i for i in self.interfaces if i.port == port), None)

    def to_dict(self) -> dict:
        return {
            "switch_id": self.switch_id,
            "vendor_dialect": self.vendor_dialect,
            "model": self.model,
            "firmware": self.firmware,
            "serial": self.serial,
            "poe_budget_watts": self.poe_budget_watts,
            "collected_at": self.collected_at,
            "interfaces": [
                {
                    "port": i.port,
                    "link_up": i.link_up,
                    "speed_mbps": i.speed_mbps,
                    "poe": {
                        "capable": i.poe.capable,
                        "delivering": i.poe.delivering,
                        "power_watts": i.poe.power_watts,
                        "poe_class": i.poe.poe_class,
                    },
                }
                for i in self.interfaces
            ],
            "mac_table": [
                {"port": e.port, "mac": e.mac.text, "vlan": e.vlan} for e in self.mac_table
            ],
            "lldp_neighbors": [
                {
                    "local_port": n.local_port,
                    "neighbor_name": n.neighbor_name,
                    "neighbor_port": n.neighbor_port,
                }
                for n in self.lldp_neighbors
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SwitchProfile":
        return cls(
            switch_id=data["switch_id"],
            vendor_dialect=data["vendor_dialect"],
            model=data["model"],
            firmware=data["firmware"],
            serial=data["serial"],
            poe_budget_watts=data["poe_budget_watts"],
            collected_at=data["collected_at"],
            interfaces=[
                InterfaceState(
                    port=i["port"],
                    link_up=i["link_up"],
                    speed_mbps=i["speed_mbps"],
                    poe=PoeState(
                        capable=i["poe"]["capable"],
                        delivering=i["poe"]["delivering"],
                        power_watts=i["poe"]["power_watts"],
                        poe_class=i["poe"]["poe_class"],
                    ),
                )
                for i in data["interfaces"]
            ],
            mac_table=[
                MacTableEntry(port=e["port"], mac=MacAddress(e["mac"]), vlan=e["vlan"])
                for e in data["mac_table"]
            ],
            lldp_neighbors=[
                LldpNeighbor(
                    local_port=n["local_port"],
                    neighbor_name=n["neighbor_name"],
                    neighbor_port=n["neighbor_port"],
                )
                for n in data["lldp_neighbors"]
            ],
        )


@dataclass
class ParsedBundle:
    """parse_cli_bundle output: profile fragments plus the skip report."""

    interfaces: list[InterfaceState]
    mac_table: list[MacTableEntry]
    lldp_neighbors: list[LldpNeighbor]
    skipped: list[SkippedRow] = field(default_factory=list)


def parse_cli_bundle(dialect: str | Dialect, raw_outputs: dict[str, str]) -> ParsedBundle:
    """Parse the four command transcripts of one switch.

    `raw_outputs` maps section name (mac_table, interfaces, poe, lldp) to the
    full transcript text. Partial rows become skip reports; a MAC-table row
    naming a port absent from the interface table is also a skip, keeping the
    profile invariant (every MAC entry references a known interface) true by
    construction.
    """
    d = get_dialect(dialect) if isinstance(dialect, str) else dialect
    skipped: list[SkippedRow] = []

    if_rows: list[RawInterfaceRow]
    if_rows, skips = parse_section(d, "interfaces", raw_outputs.get("interfaces", ""))
    skipped.extend(skips)
    poe_rows: list[RawPoeRow]
    poe_rows, skips = parse_section(d, "poe", raw_outputs.get("poe", ""))
    skipped.extend(skips)
    mac_rows: list[RawMacRow]
    mac_rows, skips = parse_section(d, "mac_table", raw_outputs.get("mac_table", ""))
    skipped.extend(skips)
    lldp_rows: list[RawLldpRow]
    lldp_rows, skips = parse_section(d, "lldp", raw_outputs.get("lldp", ""))
    skipped.extend(skips)

    poe_by_port = {r.port: r for r in poe_rows}
    known_ports = {r.port for r in if_rows}
    for row in poe_rows:
        if row.port not in known_ports:
            skipped.append(SkippedRow("poe", 0, f"PoE row for unknown port {row.port}"))

    interfaces = []
    for row in if_rows:
        poe = poe_by_port.get(row.port)
        interfaces.append(
            InterfaceState(
                port=row.port,
                link_up=row.link_up,
                speed_mbps=row.speed_mbps,
                poe=PoeState(
                    capable=poe.capable if poe else False,
                    delivering=poe.delivering if poe else False,
                    power_watts=poe.power_watts if poe else 0.0,
                    poe_class=poe.poe_class if poe else None,
                ),
            )
        )

    mac_table = []
    seen: set[tuple[str, MacAddress, int]] = set()
    for row in mac_rows:
        if row.port not in known_ports:
            skipped.append(SkippedRow("mac_table", 0, f"MAC {row.mac} on unknown port {row.port}"))
            continue
        key = (row.port, row.mac, row.vlan)
        if key in seen:
            skipped.append(SkippedRow("mac_table", 0, f"duplicate entry {row.port}/{row.mac}"))
            continue
        seen.add(key)
        mac_table.append(MacTableEntry(port=row.port, mac=row.mac, vlan=row.vlan))

    neighbors = [
        LldpNeighbor(local_port=r.local_port, neighbor_name=r.neighbor_name, neighbor_port=r.neighbor_port)
        for r in lldp_rows
    ]
    return ParsedBundle(
        interfaces=interfaces, mac_table=mac_table, lldp_neighbors=neighbors, skipped=skipped
    )


class Transport(Protocol):
    """Two-method collection contract; implementations own session state."""

    def open(self, switch_id: str) -> None: ...

    def run(self, command: str) -> str: ...


_SECTION_FILES = {
    "mac_table": "mac_table.txt",
    "interfaces": "interfaces.txt",
    "poe": "poe.txt",
    "lldp": "lldp.txt",
}


class ReplayTransport:
    """Replays recorded transcripts from a fixture corpus directory.

    Layout: `<root>/<switch_id>/{mac_table.txt, interfaces.txt, poe.txt,
    lldp.txt, meta.yml}`. This is the shipped transport; a live remote-shell
    transport plugs into the same two-method contract.
    """

    def __init__(self, root: Path):
        self.root = Path(root)
        self._current: Path | None = None

    def list_switches(self) -> list[str]:
        if not self.root.is_dir():
            return []
        return sorted(p.parent.name for p in self.root.glob("*/meta.yml"))

    def describe(self, switch_id: str) -> SwitchMeta:
        meta_path = self.root / switch_id / "meta.yml"
        if not meta_path.is_file():
            raise TransportUnavailable(switch_id, f"no meta.yml under {self.root / switch_id}")
        return SwitchMeta.from_yaml(meta_path)

    def open(self, switch_id: str) -> None:
        switch_dir = self.root / switch_id
        if not (switch_dir / "meta.yml").is_file():
            raise TransportUnavailable(switch_id, f"no recorded session under {switch_dir}")
        self._current = switch_dir

    def run(self, command: str) -> str:
        if self._current is None:
            raise TransportUnavailable("<none>", "open() a switch before run()")
        section = COMMAND_SECTIONS.get(command)
        if section is None:
            raise TransportUnavailable(self._current.name, f"no transcript for command {command!r}")
        path = self._current / _SECTION_FILES[section]
        if not path.is_file():
            raise TransportUnavailable(self._current.name, f"missing transcript {path.name}")
        return path.read_text(encoding="utf-8")


class ProfileStore:
    """`_profile.json` persistence under `<state_dir>/profiles_sw/<switch_id>/`."""

    def __init__(self, state_dir: Path):
        self.root = Path(state_dir) / PROFILE_DIRNAME

    def path(self, switch_id: str) -> Path:
        return self.root / switch_id / PROFILE_FILENAME

    def store(self, profile: SwitchProfile) -> Path:
        """Write the canonical profile; no-op when hardware state is unchanged.

        Only `collected_at` differing does not count as a change: rewriting it
        would churn bytes on every run without carrying new information.
        """
        profile.validate()
        path = self.path(profile.switch_id)
        payload = profile.to_dict()
        if path.exists():
            previous = load_json(path)
            if {**previous, "collected_at": ""} == {**payload, "collected_at": ""}:
                return path
        write_text_if_changed(path, canonical_json(payload))
        return path

    def load(self, switch_id: str) -> SwitchProfile:
        path = self.path(switch_id)
        if not path.is_file():
            raise MissingProfile(switch_id)
        return SwitchProfile.from_dict(load_json(path)).validate()

    def list_ids(self) -> list[str]:
        if not self.root.is_dir():
            return []
        return sorted(p.parent.name for p in self.root.glob(f"*/{PROFILE_FILENAME}"))


def utc_now_iso() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def assemble_profile(
    switch_id: str,
    dialect: str | None,
    transport,
    store: ProfileStore,
    hardware: SwitchMeta | None = None,
    now: str | None = None,
) -> tuple[SwitchProfile, list[SkippedRow]]:
    """Collect one switch end to end and persist the result.

    When the transport cannot reach the switch, the last persisted profile is
    returned instead (stale data beats no data); only a switch that was never
    collected surfaces TransportUnavailable to the caller.
    """
    if hardware is None and hasattr(transport, "describe"):
        try:
            hardware = transport.describe(switch_id)
        except TransportUnavailable:
            hardware = None
    if dialect is None and hardware is not None:
        dialect = hardware.dialect

    try:
        transport.open(switch_id)
        d = get_dialect(dialect) if dialect else None
        if d is None:
            raise TransportUnavailable(switch_id, "no dialect known for switch")
        raw = {section: transport.run(d.commands[section]) for section in SECTIONS}
    except TransportUnavailable as exc:
        try:
            stale = store.load(switch_id)
        except MissingProfile:
            raise exc
        logger.warning("collection failed for %s (%s); using persisted profile", switch_id, exc)
        return stale, []

    bundle = parse_cli_bundle(d, raw)
    meta = hardware or SwitchMeta(switch_id=switch_id, dialect=d.name)
    profile = SwitchProfile(
        switch_id=switch_id,
        vendor_dialect=d.name,
        model=meta.model,
        firmware=meta.firmware,
        serial=meta.serial,
        poe_budget_watts=meta.poe_budget_watts,
        interfaces=bundle.interfaces,
        mac_table=bundle.mac_table,
        lldp_neighbors=bundle.lldp_neighbors,
        collected_at=now or utc_now_iso(),
    ).validate()
    store.store(profile)
    for skip in bundle.skipped:
        logger.warning("%s: skipped %s row %d: %s", switch_id, skip.section, skip.line_no, skip.reason)
    return profile, bundle.skipped

"""Canonical asset data sources and the positional hostname grammar.

Four inputs anchor everything downstream: the sovereign DHCP reservation
file, the asset-management CSV export, the campus/switch hierarchy map, and
the OUI vendor database. All four load into immutable indexes; after that the
pipeline never touches them again, so the loaded objects are safe to share
across stages.

Hostnames here are positional: the name alone encodes campus, institute,
role, building and floor, which is what lets the graph builder recover
physical location without any external floor registry. Names that do not
match the grammar are kept and flagged, never dropped.
"""

from __future__ import annotations

import csv
import ipaddress
import re
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .errors import DuplicateMac, DuplicateSwitch, MalformedLine, MalformedMac, OrphanServer

ROLES = ("sw", "cam", "srv", "nvr")

LEASE_DURATIONS = ("12h", "24h", "48h", "infinite")

# Accepted vendor spellings of a MAC. Anything else is malformed.
_MAC_COLON_RE = re.compile(r"^[0-9a-f]{2}(:[0-9a-f]{2}){5}$")
_MAC_DASH_RE = re.compile(r"^[0-9A-Fa-f]{2}(-[0-9A-Fa-f]{2}){5}$")
_MAC_DOTTED_RE = re.compile(r"^[0-9A-Fa-f]{4}(\.[0-9A-Fa-f]{4}){2}$")
_MAC_BARE_RE = re.compile(r"^[0-9A-Fa-f]{12}$")

# Shipped default grammar:
#   camp-<campus>-inst-<institute>-<role>-bld<building>-flr<floor>[-<index>]
# Tokens are lowercase alphanumeric; floor/index reject leading zeros so the
# canonical rendering is unique.
DEFAULT_HOSTNAME_PATTERN = (
    r"^camp-(?P<campus>[a-z0-9]+)-inst-(?P<institute>[a-z0-9]+)"
    r"-(?P<role>sw|cam|srv|nvr)"
    r"-bld(?P<building>[a-z0-9]+)-flr(?P<floor>0|[1-9][0-9]*)"
    r"(?:-(?P<index>0|[1-9][0-9]*))?$"
)
_DEFAULT_HOSTNAME_RE = re.compile(DEFAULT_HOSTNAME_PATTERN)

_TOKEN_RE = re.compile(r"^[a-z0-9]+$")


@dataclass(frozen=True, order=True)
class MacAddress:
    """Six octets in canonical form: lowercase hex, colon separated.

    Ordering is byte-lexicographic (the canonical text orders the same way
    because octets render fixed-width), so sorted MAC lists are stable across
    runs and machines.
    """

    text: str

    def __post_init__(self):
        if not _MAC_COLON_RE.match(self.text):
            raise MalformedMac(self.text)

    @classmethod
    def parse(cls, raw: str) -> "MacAddress":
        """Accept any of the common vendor spellings and canonicalize.

        aa:bb:cc:dd:ee:ff | AA-BB-CC-DD-EE-FF | aabb.ccdd.eeff | aabbccddeeff
        """
        token = raw.strip()
        if _MAC_COLON_RE.match(token.lower()) and ":" in token:
            digits = token.lower().replace(":", "")
        elif _MAC_DASH_RE.match(token):
            digits = token.lower().replace("-", "")
        elif _MAC_DOTTED_RE.match(token):
            digits = token.lower().replace(".", "")
        elif _MAC_BARE_RE.match(token):
            digits = token.lower()
        else:
            raise MalformedMac(raw)
        return cls(":".join(digits[i : i + 2] for i in range(0, 12, 2)))

    @property
    def oui(self) -> str:
        """First three octets, the vendor prefix (e.g. 'aa:bb:cc')."""
        return self.text[:8]

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class PositionalHostname:
    """Structured form of a grammar-conforming device name."""

    campus: str
    institute: str
    role: str
    building: str
    floor: int
    index: int | None = None

    def __post_init__(self):
        for token in (self.campus, self.institute, self.building):
            if not _TOKEN_RE.match(token):
                raise ValueError(f"hostname token must be lowercase alphanumeric: {token!r}")
        if self.role not in ROLES:
            raise ValueError(f"role must be one of {ROLES}: {self.role!r}")
        if self.floor < 0:
            raise ValueError("floor must be non-negative")
        if self.index is not None and self.index < 0:
            raise ValueError("index must be non-negative")

    def render(self) -> str:
        base = (
            f"camp-{self.campus}-inst-{self.institute}-{self.role}"
            f"-bld{self.building}-flr{self.floor}"
        )
        return base if self.index is None else f"{base}-{self.index}"

    @property
    def floor_key(self) -> str:
        """Floor-group key for the topology tree: building + floor."""
        return f"bld{self.building}-flr{self.floor}"

    def __str__(self) -> str:
        return self.render()


def parse_hostname(raw: str, pattern: re.Pattern | str | None = None) -> PositionalHostname | None:
    """Parse a raw device name against the positional grammar.

    Returns None for any name that does not conform; nonconforming names are
    an expected population (legacy gear, operator typos) and flow through the
    pipeline as flagged values, so this never raises.
    """
    if pattern is None:
        rx = _DEFAULT_HOSTNAME_RE
    elif isinstance(pattern, str):
        rx = re.compile(pattern)
    else:
        rx = pattern
    m = rx.match(raw)
    if not m:
        return None
    groups = m.groupdict()
    index = groups.get("index")
    try:
        return PositionalHostname(
            campus=groups["campus"],
            institute=groups["institute"],
            role=groups["role"],
            building=groups["building"],
            floor=int(groups["floor"]),
            index=int(index) if index is not None else None,
        )
    except (KeyError, ValueError):
        # A custom pattern may capture tokens the dataclass rejects; that is
        # a nonconforming name, not an error.
        return None


def extract_floor(raw_hostname: str, pattern: re.Pattern | str | None = None) -> int | None:
    """Floor index straight from the device name; None when nonconforming."""
    parsed = parse_hostname(raw_hostname, pattern)
    return parsed.floor if parsed else None


@dataclass(frozen=True)
class AssetRecord:
    """One registered device: the unit of the sovereign inventory."""

    mac: MacAddress
    ip: str
    hostname: str
    model: str | None
    source: str  # dhcp | glpi | both
    lease: str | None = None  # dhcp reservation duration, when sourced from dhcp
    parsed: PositionalHostname | None = field(default=None, compare=False)

    @property
    def nonconforming(self) -> bool:
        return self.parsed is None


class Registry:
    """Merged, MAC-indexed view of the DHCP reservations and the asset export."""

    def __init__(self, records: list[AssetRecord]):
        self._by_mac: dict[MacAddress, AssetRecord] = {}
        for record in records:
            if record.mac in self._by_mac:
                raise DuplicateMac(record.mac.text)
            self._by_mac[record.mac] = record

    def lookup(self, mac: MacAddress) -> AssetRecord | None:
        """Exact-match lookup on the canonical MAC; None means not registered."""
        return self._by_mac.get(mac)

    def __len__(self) -> int:
        return len(self._by_mac)

    def __contains__(self, mac: MacAddress) -> bool:
        return mac in self._by_mac

    @property
    def records(self) -> list[AssetRecord]:
        return sorted(self._by_mac.values(), key=lambda r: r.mac)

    @property
    def nonconforming_records(self) -> list[AssetRecord]:
        return [r for r in self.records if r.nonconforming]


def lookup_mac(registry: Registry, mac: MacAddress) -> AssetRecord | None:
    return registry.lookup(mac)


def _parse_ipv4(token: str, path: str, line_no: int) -> str:
    try:
        return str(ipaddress.IPv4Address(token))
    except ipaddress.AddressValueError:
        raise MalformedLine(path, line_no, f"not an IPv4 address: {token!r}") from None


def parse_dhcp_conf(path: Path, hostname_pattern: re.Pattern | str | None = None) -> list[AssetRecord]:
    """Parse the dnsmasq-style reservation file.

    Accepted content: blank lines, `#` comments, and reservation lines
    `dhcp-host=<mac>,<ipv4>,<hostname>,<lease>`. Anything else is malformed;
    the file is a controlled artifact, not a general dnsmasq config.
    """
    records: list[AssetRecord] = []
    text = Path(path).read_text(encoding="utf-8")
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if not line.startswith("dhcp-host="):
            raise MalformedLine(str(path), line_no, f"expected dhcp-host= reservation, got {line!r}")
        fields = line[len("dhcp-host=") :].split(",")
        if len(fields) != 4:
            raise MalformedLine(str(path), line_no, f"expected 4 comma fields, got {len(fields)}")
        raw_mac, raw_ip, hostname, lease = (f.strip() for f in fields)
        try:
            mac = MacAddress.parse(raw_mac)
        except MalformedMac as exc:
            raise MalformedLine(str(path), line_no, str(exc)) from None
        ip = _parse_ipv4(raw_ip, str(path), line_no)
        if lease not in LEASE_DURATIONS:
            raise MalformedLine(str(path), line_no, f"lease must be one of {LEASE_DURATIONS}: {lease!r}")
        records.append(
            AssetRecord(
                mac=mac,
                ip=ip,
                hostname=hostname,
                model=None,
                source="dhcp",
                lease=lease,
                parsed=parse_hostname(hostname, hostname_pattern),
            )
        )
    return records


def parse_asset_export(path: Path, hostname_pattern: re.Pattern | str | None = None) -> list[AssetRecord]:
    """Parse the asset-management CSV export (`mac,ip,hostname,model`)."""
    records: list[AssetRecord] = []
    with Path(path).open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedLine(str(path), 1, "missing header row") from None
        if [h.strip().lower() for h in header] != ["mac", "ip", "hostname", "model"]:
            raise MalformedLine(str(path), 1, f"expected header mac,ip,hostname,model, got {header}")
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 4:
                raise MalformedLine(str(path), line_no, f"expected 4 columns, got {len(row)}")
            raw_mac, raw_ip, hostname, model = (cell.strip() for cell in row)
            try:
                mac = MacAddress.parse(raw_mac)
            except MalformedMac as exc:
                raise MalformedLine(str(path), line_no, str(exc)) from None
            ip = _parse_ipv4(raw_ip, str(path), line_no)
            records.append(
                AssetRecord(
                    mac=mac,
                    ip=ip,
                    hostname=hostname,
                    model=model or None,
                    source="glpi",
                    parsed=parse_hostname(hostname, hostname_pattern),
                )
            )
    return records


def load_registry(
    dhcp_conf_path: Path,
    asset_export_path: Path,
    hostname_pattern: re.Pattern | str | None = None,
) -> Registry:
    """Load and merge both sources into one MAC-indexed registry.

    A MAC present in both sources merges into a single record with
    source=both; the DHCP resolver is sovereign, so its ip/hostname win and
    the export contributes the model string. A MAC repeated *within* one
    source is a hard error: duplicates mean the inventory itself is broken
    and must be surfaced loudly, not papered over.
    """
    dhcp_records = parse_dhcp_conf(dhcp_conf_path, hostname_pattern)
    export_records = parse_asset_export(asset_export_path, hostname_pattern)

    merged: dict[MacAddress, AssetRecord] = {}
    for record in dhcp_records:
        if record.mac in merged:
            raise DuplicateMac(record.mac.text, context=str(dhcp_conf_path))
        merged[record.mac] = record
    for record in export_records:
        existing = merged.get(record.mac)
        if existing is None:
            merged[record.mac] = record
        elif existing.source != "dhcp":
            raise DuplicateMac(record.mac.text, context=str(asset_export_path))
        else:
            merged[record.mac] = AssetRecord(
                mac=existing.mac,
                ip=existing.ip,
                hostname=existing.hostname,
                model=record.model,
                source="both",
                lease=existing.lease,
                parsed=existing.parsed,
            )
    return Registry(list(merged.values()))


@dataclass(frozen=True)
class TopoMap:
    """Campus -> distribution switch -> access switch forest, plus servers."""

    campuses: dict[str, dict[str, list[str]]]  # campus -> dist switch -> access switches
    servers: list[dict[str, str]]  # {id, campus, parent}

    @property
    def switch_ids(self) -> list[str]:
        ids: list[str] = []
        for dists in self.campuses.values():
            for dist, accesses in dists.items():
                ids.append(dist)
                ids.extend(accesses)
        return sorted(ids)

    def campus_of(self, switch_id: str) -> str | None:
        for campus, dists in self.campuses.items():
            for dist, accesses in dists.items():
                if switch_id == dist or switch_id in accesses:
                    return campus
        return None

    def tier_of(self, switch_id: str) -> int | None:
        """1 for distribution switches, 2 for access switches, None if unknown.

        Smaller numbers sit closer to the core.
        """
        for dists in self.campuses.values():
            for dist, accesses in dists.items():
                if switch_id == dist:
                    return 1
                if switch_id in accesses:
                    return 2
        return None

    def parent_of(self, access_switch_id: str) -> str | None:
        for dists in self.campuses.values():
            for dist, accesses in dists.items():
                if access_switch_id in accesses:
                    return dist
        return None


def load_topo_map(path: Path) -> TopoMap:
    """Load and validate topo_map.yml.

    Shape: `campuses: {<campus>: {<dist_switch>: [<access_switch>, ...]}}`
    plus `servers: [{id, campus, parent}]`. Every switch id must appear
    exactly once across the whole forest; every server's parent must be a
    known switch.
    """
    data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
    raw_campuses = data.get("campuses") or {}
    campuses: dict[str, dict[str, list[str]]] = {}
    seen: set[str] = set()
    for campus, dists in raw_campuses.items():
        campuses[str(campus)] = {}
        for dist, accesses in (dists or {}).items():
            dist = str(dist)
            if dist in seen:
                raise DuplicateSwitch(dist)
            seen.add(dist)
            members: list[str] = []
            for access in accesses or []:
                access = str(access)
                if access in seen:
                    raise DuplicateSwitch(access)
                seen.add(access)
                members.append(access)
            campuses[str(campus)][dist] = members

    servers: list[dict[str, str]] = []
    for entry in data.get("servers") or []:
        server = {
            "id": str(entry["id"]),
            "campus": str(entry["campus"]),
            "parent": str(entry["parent"]),
        }
        if server["parent"] not in seen:
            raise OrphanServer(server["id"], server["parent"])
        servers.append(server)

    return TopoMap(campuses=campuses, servers=servers)


@dataclass(frozen=True)
class OuiEntry:
    """Vendor prefix row: first three MAC octets -> vendor + device class."""

    prefix: str  # 'aa:bb:cc'
    vendor: str
    device_class: str  # camera | switch | server | nvr | unknown

    DEVICE_CLASSES = ("camera", "switch", "server", "nvr", "unknown")


class OuiDatabase:
    """Prefix-indexed OUI table, loaded from `prefix,vendor,device_class` CSV."""

    def __init__(self, entries: list[OuiEntry]):
        self._by_prefix: dict[str, OuiEntry] = {}
        for entry in entries:
            if entry.prefix in self._by_prefix:
                raise DuplicateMac(entry.prefix, context="oui database prefix")
            self._by_prefix[entry.prefix] = entry

    def lookup(self, mac: MacAddress) -> OuiEntry | None:
        return self._by_prefix.get(mac.oui)

    def __len__(self) -> int:
        return len(self._by_prefix)

    @property
    def entries(self) -> list[OuiEntry]:
        return sorted(self._by_prefix.values(), key=lambda e: e.prefix)


def load_oui_db(path: Path) -> OuiDatabase:
    entries: list[OuiEntry] = []
    with Path(path).open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedLine(str(path), 1, "missing header row") from None
        if [h.strip().lower() for h in header] != ["prefix", "vendor", "device_class"]:
            raise MalformedLine(str(path), 1, f"expected header prefix,vendor,device_class, got {header}")
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 3:
                raise MalformedLine(str(path), line_no, f"expected 3 columns, got {len(row)}")
            raw_prefix, vendor, device_class = (cell.strip() for cell in row)
            try:
                prefix = MacAddress.parse(raw_prefix + ":00:00:00").oui
            except MalformedMac:
                raise MalformedLine(str(path), line_no, f"bad OUI prefix {raw_prefix!r}") from None
            if device_class not in OuiEntry.DEVICE_CLASSES:
                raise MalformedLine(str(path), line_no, f"bad device class {device_class!r}")
            entries.append(OuiEntry(prefix=prefix, vendor=vendor, device_class=device_class))
    return OuiDatabase(entries)

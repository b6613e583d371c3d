"""Vendor CLI dialect table: command strings and transcript parsers.

Three dialects ship in-repo, spanning the output shapes seen on real access
gear: dialect_a (dotted-MAC tabular), dialect_b (colon-MAC columnar),
dialect_c (key=value records). Each dialect is a row in DIALECTS mapping the
four logical sections (mac_table, interfaces, poe, lldp) to the CLI command
that produces them and the parser that reads them back, so supporting a new
vendor means adding one row, nothing else.

Parsers are conservation-honest: every data-candidate line is either accepted
into a row or reported as a skip with its line number. Decoration (headers,
separators, summary lines) is recognized per dialect and is not a row. A
section whose data candidates *all* fail to parse is structurally unreadable
and raises ParseFailure; scattered bad rows are skips, not failures.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable

from .errors import MalformedMac, ParseFailure, UnknownDialect
from .registry import MacAddress

SECTIONS = ("mac_table", "interfaces", "poe", "lldp")


@dataclass(frozen=True)
class SkippedRow:
    section: str
    line_no: int
    reason: str


@dataclass(frozen=True)
class RawMacRow:
    port: str
    mac: MacAddress
    vlan: int


@dataclass(frozen=True)
class RawInterfaceRow:
    port: str
    link_up: bool
    speed_mbps: int


@dataclass(frozen=True)
class RawPoeRow:
    port: str
    capable: bool
    delivering: bool
    power_watts: float
    poe_class: int | None


@dataclass(frozen=True)
class RawLldpRow:
    local_port: str
    neighbor_name: str
    neighbor_port: str


_WS = re.compile(r"\s+")


def _tokens(line: str) -> list[str]:
    return _WS.split(line.strip())


def _is_separator(line: str) -> bool:
    stripped = line.strip()
    return bool(stripped) and set(stripped) <= set("-+= ")


# --------------------------------------------------------------------------
# dialect_a: dotted-MAC tabular (enterprise "show" tables)
# --------------------------------------------------------------------------

_A_PORT_RE = re.compile(r"^(Gi|Te|Fa)\d+/\d+/\d+$")

_A_MAC_DECORATION = ("mac address table", "vlan", "total mac addresses")
_A_IF_DECORATION = ("port",)
_A_POE_DECORATION = ("module", "(watts)", "interface")


def _parse_a_mac_table(text: str) -> tuple[list[RawMacRow], list[SkippedRow]]:
    rows: list[RawMacRow] = []
    skips: list[SkippedRow] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or _is_separator(line) or line.lower().startswith(_A_MAC_DECORATION):
            continue
        toks = _tokens(line)
        if len(toks) != 4:
            skips.append(SkippedRow("mac_table", line_no, f"expected 4 columns, got {len(toks)}"))
            continue
        vlan_tok, mac_tok, _type, port = toks
        try:
            rows.append(RawMacRow(port=port, mac=MacAddress.parse(mac_tok), vlan=int(vlan_tok)))
        except (MalformedMac, ValueError) as exc:
            skips.append(SkippedRow("mac_table", line_no, str(exc)))
    return rows, skips


def _parse_a_interfaces(text: str) -> tuple[list[RawInterfaceRow], list[SkippedRow]]:
    rows: list[RawInterfaceRow] = []
    skips: list[SkippedRow] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or _is_separator(line) or line.lower().startswith(_A_IF_DECORATION):
            continue
        toks = _tokens(line)
        if not _A_PORT_RE.match(toks[0]):
            skips.append(SkippedRow("interfaces", line_no, f"unrecognized port {toks[0]!r}"))
            continue
        status = next((t for t in toks[1:] if t in ("connected", "notconnect", "disabled")), None)
        if status is None or len(toks) < 5:
            skips.append(SkippedRow("interfaces", line_no, "no status column"))
            continue
        speed_tok = toks[-2].removeprefix("a-")
        speed = int(speed_tok) if speed_tok.isdigit() else 0
        rows.append(RawInterfaceRow(port=toks[0], link_up=status == "connected", speed_mbps=speed))
    return rows, skips


def _parse_a_poe(text: str) -> tuple[list[RawPoeRow], list[SkippedRow]]:
    rows: list[RawPoeRow] = []
    skips: list[SkippedRow] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or _is_separator(line) or line.lower().startswith(_A_POE_DECORATION):
            continue
        toks = _tokens(line)
        if toks[0].isdigit():
            # module budget summary row, not a port row
            continue
        if not _A_PORT_RE.match(toks[0]):
            skips.append(SkippedRow("poe", line_no, f"unrecognized port {toks[0]!r}"))
            continue
        if len(toks) < 7:
            skips.append(SkippedRow("poe", line_no, f"expected 7+ columns, got {len(toks)}"))
            continue
        try:
            power = float(toks[3])
            max_watts = float(toks[-1])
        except ValueError as exc:
            skips.append(SkippedRow("poe", line_no, str(exc)))
            continue
        class_tok = toks[-2]
        rows.append(
            RawPoeRow(
                port=toks[0],
                capable=max_watts > 0,
                delivering=toks[2] == "on",
                power_watts=power,
                poe_class=int(class_tok) if class_tok.isdigit() else None,
            )
        )
    return rows, skips


def _parse_a_lldp(text: str) -> tuple[list[RawLldpRow], list[SkippedRow]]:
    rows: list[RawLldpRow] = []
    skips: list[SkippedRow] = []
    local = name = port = None
    block_start = 0
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        lower = line.lower()
        if lower.startswith("local intf:"):
            local = line.split(":", 1)[1].strip()
            block_start = line_no
        elif lower.startswith("port id:"):
            port = line.split(":", 1)[1].strip()
        elif lower.startswith("system name:"):
            name = line.split(":", 1)[1].strip()
        elif not line or _is_separator(line):
            if local and name:
                rows.append(RawLldpRow(local_port=local, neighbor_name=name, neighbor_port=port or ""))
            elif local and not name:
                skips.append(SkippedRow("lldp", block_start, f"neighbor on {local} has no system name"))
            local = name = port = None
    if local and name:
        rows.append(RawLldpRow(local_port=local, neighbor_name=name, neighbor_port=port or ""))
    elif local and not name:
        skips.append(SkippedRow("lldp", block_start, f"neighbor on {local} has no system name"))
    return rows, skips


# --------------------------------------------------------------------------
# dialect_b: colon-MAC columnar ("Status and Counters" style)
# --------------------------------------------------------------------------

_B_DECORATION = ("status and counters", "lldp remote devices", "mac address", "port", "localport")


def _b_is_decoration(line: str) -> bool:
    return _is_separator(line) or line.lower().startswith(_B_DECORATION)


def _parse_b_mac_table(text: str) -> tuple[list[RawMacRow], list[SkippedRow]]:
    rows: list[RawMacRow] = []
    skips: list[SkippedRow] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or _b_is_decoration(line):
            continue
        toks = _tokens(line)
        if len(toks) != 3:
            skips.append(SkippedRow("mac_table", line_no, f"expected 3 columns, got {len(toks)}"))
            continue
        try:
            rows.append(RawMacRow(port=toks[1], mac=MacAddress.parse(toks[0]), vlan=int(toks[2])))
        except (MalformedMac, ValueError) as exc:
            skips.append(SkippedRow("mac_table", line_no, str(exc)))
    return rows, skips


def _parse_b_interfaces(text: str) -> tuple[list[RawInterfaceRow], list[SkippedRow]]:
    rows: list[RawInterfaceRow] = []
    skips: list[SkippedRow] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or _b_is_decoration(line):
            continue
        toks = _tokens(line)
        if not toks[0].isdigit():
            skips.append(SkippedRow("interfaces", line_no, f"unrecognized port {toks[0]!r}"))
            continue
        if len(toks) < 4 or toks[3] not in ("Up", "Down"):
            skips.append(SkippedRow("interfaces", line_no, "no Up/Down status column"))
            continue
        link_up = toks[3] == "Up"
        speed = 0
        if link_up and len(toks) >= 5:
            m = re.match(r"^(\d+)(FDx|HDx)$", toks[4])
            if m:
                speed = int(m.group(1))
        rows.append(RawInterfaceRow(port=toks[0], link_up=link_up, speed_mbps=speed))
    return rows, skips


def _parse_b_poe(text: str) -> tuple[list[RawPoeRow], list[SkippedRow]]:
    rows: list[RawPoeRow] = []
    skips: list[SkippedRow] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or _b_is_decoration(line):
            continue
        toks = _tokens(line)
        if not toks[0].isdigit():
            skips.append(SkippedRow("poe", line_no, f"unrecognized port {toks[0]!r}"))
            continue
        if len(toks) < 5 or toks[-1] != "W":
            skips.append(SkippedRow("poe", line_no, "expected `<draw> W` tail"))
            continue
        try:
            power = float(toks[-2])
        except ValueError as exc:
            skips.append(SkippedRow("poe", line_no, str(exc)))
            continue
        class_tok = toks[-3]
        rows.append(
            RawPoeRow(
                port=toks[0],
                capable=toks[1] == "Yes",
                delivering=toks[2] == "Delivering",
                power_watts=power,
                poe_class=int(class_tok) if class_tok.isdigit() else None,
            )
        )
    return rows, skips


def _parse_b_lldp(text: str) -> tuple[list[RawLldpRow], list[SkippedRow]]:
    rows: list[RawLldpRow] = []
    skips: list[SkippedRow] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or _b_is_decoration(line):
            continue
        toks = _tokens(line)
        if len(toks) < 5 or toks[1] != "|":
            skips.append(SkippedRow("lldp", line_no, "expected `port | chassis portid sysname` row"))
            continue
        rows.append(RawLldpRow(local_port=toks[0], neighbor_name=toks[-1], neighbor_port=toks[3]))
    return rows, skips


# --------------------------------------------------------------------------
# dialect_c: key=value records, one per line
# --------------------------------------------------------------------------


def _kv(line: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for tok in _tokens(line):
        if "=" in tok:
            key, value = tok.split("=", 1)
            out[key] = value
    return out


def _c_rows(text: str, section: str, required: tuple[str, ...]):
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        kv = _kv(line)
        missing = [k for k in required if k not in kv]
        if missing:
            yield line_no, None, SkippedRow(section, line_no, f"missing keys: {', '.join(missing)}")
        else:
            yield line_no, kv, None


def _parse_c_mac_table(text: str) -> tuple[list[RawMacRow], list[SkippedRow]]:
    rows: list[RawMacRow] = []
    skips: list[SkippedRow] = []
    for line_no, kv, skip in _c_rows(text, "mac_table", ("mac", "port", "vlan")):
        if skip:
            skips.append(skip)
            continue
        try:
            rows.append(RawMacRow(port=kv["port"], mac=MacAddress.parse(kv["mac"]), vlan=int(kv["vlan"])))
        except (MalformedMac, ValueError) as exc:
            skips.append(SkippedRow("mac_table", line_no, str(exc)))
    return rows, skips


def _parse_c_interfaces(text: str) -> tuple[list[RawInterfaceRow], list[SkippedRow]]:
    rows: list[RawInterfaceRow] = []
    skips: list[SkippedRow] = []
    for line_no, kv, skip in _c_rows(text, "interfaces", ("port", "link", "speed")):
        if skip:
            skips.append(skip)
            continue
        try:
            rows.append(
                RawInterfaceRow(port=kv["port"], link_up=kv["link"] == "up", speed_mbps=int(kv["speed"]))
            )
        except ValueError as exc:
            skips.append(SkippedRow("interfaces", line_no, str(exc)))
    return rows, skips


def _parse_c_poe(text: str) -> tuple[list[RawPoeRow], list[SkippedRow]]:
    rows: list[RawPoeRow] = []
    skips: list[SkippedRow] = []
    for line_no, kv, skip in _c_rows(text, "poe", ("port", "poe", "power")):
        if skip:
            skips.append(skip)
            continue
        try:
            power = float(kv["power"].removesuffix("W"))
        except ValueError as exc:
            skips.append(SkippedRow("poe", line_no, str(exc)))
            continue
        class_tok = kv.get("class", "-")
        rows.append(
            RawPoeRow(
                port=kv["port"],
                capable=kv["poe"] in ("on", "off"),
                delivering=kv["poe"] == "on",
                power_watts=power,
                poe_class=int(class_tok) if class_tok.isdigit() else None,
            )
        )
    return rows, skips


def _parse_c_lldp(text: str) -> tuple[list[RawLldpRow], list[SkippedRow]]:
    rows: list[RawLldpRow] = []
    skips: list[SkippedRow] = []
    for _line_no, kv, skip in _c_rows(text, "lldp", ("port", "neighbor")):
        if skip:
            skips.append(skip)
            continue
        rows.append(
            RawLldpRow(
                local_port=kv["port"],
                neighbor_name=kv["neighbor"],
                neighbor_port=kv.get("neighbor-port", ""),
            )
        )
    return rows, skips


# --------------------------------------------------------------------------
# dialect table
# --------------------------------------------------------------------------

SectionParser = Callable[[str], tuple[list, list[SkippedRow]]]


@dataclass(frozen=True)
class Dialect:
    name: str
    commands: dict[str, str]  # section -> CLI command producing it
    parsers: dict[str, SectionParser]


DIALECTS: dict[str, Dialect] = {
    "dialect_a": Dialect(
        name="dialect_a",
        commands={
            "mac_table": "show mac address-table",
            "interfaces": "show interfaces status",
            "poe": "show power inline",
            "lldp": "show lldp neighbors detail",
        },
        parsers={
            "mac_table": _parse_a_mac_table,
            "interfaces": _parse_a_interfaces,
            "poe": _parse_a_poe,
            "lldp": _parse_a_lldp,
        },
    ),
    "dialect_b": Dialect(
        name="dialect_b",
        commands={
            "mac_table": "show mac-address",
            "interfaces": "show interfaces brief",
            "poe": "show power-over-ethernet brief",
            "lldp": "show lldp info remote-device",
        },
        parsers={
            "mac_table": _parse_b_mac_table,
            "interfaces": _parse_b_interfaces,
            "poe": _parse_b_poe,
            "lldp": _parse_b_lldp,
        },
    ),
    "dialect_c": Dialect(
        name="dialect_c",
        commands={
            "mac_table": "mac table show",
            "interfaces": "port status show",
            "poe": "poe status show",
            "lldp": "lldp neighbors show",
        },
        parsers={
            "mac_table": _parse_c_mac_table,
            "interfaces": _parse_c_interfaces,
            "poe": _parse_c_poe,
            "lldp": _parse_c_lldp,
        },
    ),
}

# Reverse map used by the replay transport: any dialect's command -> section.
COMMAND_SECTIONS: dict[str, str] = {
    command: section for d in DIALECTS.values() for section, command in d.commands.items()
}


def get_dialect(name: str) -> Dialect:
    try:
        return DIALECTS[name]
    except KeyError:
        raise UnknownDialect(name) from None


def parse_section(dialect: Dialect, section: str, text: str) -> tuple[list, list[SkippedRow]]:
    """Run one section parser and enforce the unreadability rule."""
    rows, skips = dialect.parsers[section](text)
    if not rows and skips:
        first = skips[0]
        raise ParseFailure(section, first.line_no, f"all {len(skips)} data rows unparseable ({first.reason})")
    return rows, skips

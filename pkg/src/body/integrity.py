"""Asset integrity loop: lease progression, MAC surveillance, HIL work orders.

The sovereign DHCP resolver only hands addresses to registered MACs, so the
loop closes through three mechanisms: lease durations that step from 12h to
48h to infinite as an endpoint proves permanence, a surveillance scan that
turns every unregistered visible MAC into a named HIL candidate with full
field context, and structured alert records appended to a line-delimited log
for whatever monitoring sink consumes them. Registration of a discovered
device stays human-gated; nothing here writes to the registry.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import IntEnum
from pathlib import Path

from .canonical import canonical_json, load_json, write_text_if_changed
from .classify import ClassifyConfig, classify_switch
from .collection import SwitchProfile, utc_now_iso
from .registry import MacAddress, Registry, TopoMap

LEASE_STORE_FILENAME = "leases.json"
ALERT_LOG_FILENAME = "alerts.log"

PROMOTION_THRESHOLD = 2  # consecutive renewals per tier before promotion


class LeaseTier(IntEnum):
    H12 = 0
    H24 = 1
    H48 = 2
    STABLE = 3

    @property
    def duration(self) -> str:
        return ("12h", "24h", "48h", "infinite")[self]


EVENTS = ("renewed", "absent", "registered")


@dataclass(frozen=True)
class LeaseState:
    mac: MacAddress
    tier: LeaseTier = LeaseTier.H12
    consecutive_renewals: int = 0
    last_seen: str = ""
    flagged: bool = False


def step_lease(
    state: LeaseState,
    event: str,
    now: str | None = None,
    promotion_threshold: int = PROMOTION_THRESHOLD,
) -> LeaseState:
    """Advance one lease through one observed event.

    renewed: counts toward promotion; at `promotion_threshold` consecutive
    renewals the tier steps one level (H12 -> H24 -> H48 -> STABLE) and the
    counter resets. absent: resets the counter and flags the MAC for
    surveillance unless it already reached STABLE. registered: explicit
    re-registration, back to H12. Tiers never skip and never regress except
    through `registered`.
    """
    if event not in EVENTS:
        raise ValueError(f"unknown lease event {event!r}")
    now = now or utc_now_iso()
    if event == "registered":
        return LeaseState(mac=state.mac, tier=LeaseTier.H12, consecutive_renewals=0, last_seen=now)
    if event == "absent":
        return replace(
            state,
            consecutive_renewals=0,
            flagged=state.tier < LeaseTier.STABLE,
        )
    # renewed
    if state.tier == LeaseTier.STABLE:
        return replace(state, consecutive_renewals=0, last_seen=now, flagged=False)
    count = state.consecutive_renewals + 1
    if count >= promotion_threshold:
        return LeaseState(
            mac=state.mac,
            tier=LeaseTier(state.tier + 1),
            consecutive_renewals=0,
            last_seen=now,
        )
    return replace(state, consecutive_renewals=count, last_seen=now, flagged=False)


class LeaseStore:
    """Single-writer canonical JSON store at `<state_dir>/leases.json`."""

    def __init__(self, state_dir: Path):
        self.path = Path(state_dir) / LEASE_STORE_FILENAME
        self.states: dict[MacAddress, LeaseState] = {}
        if self.path.is_file():
            for mac_text, entry in load_json(self.path).items():
                mac = MacAddress(mac_text)
                self.states[mac] = LeaseState(
                    mac=mac,
                    tier=LeaseTier[entry["tier"]],
                    consecutive_renewals=entry["consecutive_renewals"],
                    last_seen=entry["last_seen"],
                    flagged=entry["flagged"],
                )

    def save(self) -> Path:
        payload = {
            state.mac.text: {
                "tier": state.tier.name,
                "consecutive_renewals": state.consecutive_renewals,
                "last_seen": state.last_seen,
                "flagged": state.flagged,
            }
            for state in self.states.values()
        }
        write_text_if_changed(self.path, canonical_json(payload))
        return self.path

    def step(self, mac: MacAddress, event: str, now: str | None = None) -> LeaseState:
        state = self.states.get(mac, LeaseState(mac=mac))
        updated = step_lease(state, event, now)
        self.states[mac] = updated
        return updated


def observe_leases(
    store: LeaseStore,
    registry: Registry,
    visible_macs: set[MacAddress],
    now: str | None = None,
) -> dict[str, int]:
    """Apply one observation round: every registered MAC renews or goes absent."""
    counts = {"renewed": 0, "absent": 0, "registered": 0}
    for record in registry.records:
        if record.mac not in store.states:
            store.step(record.mac, "registered", now)
            counts["registered"] += 1
        if record.mac in visible_macs:
            store.step(record.mac, "renewed", now)
            counts["renewed"] += 1
        else:
            store.step(record.mac, "absent", now)
            counts["absent"] += 1
    return counts


def emit_dhcp_reservations(registry: Registry, store: LeaseStore | None = None) -> str:
    """Render the reservation file the sovereign resolver serves.

    Absence of a reservation *is* the denial mechanism: unregistered MACs
    simply never appear here. Lease durations mirror the current tier when
    the lease store knows the MAC, else the registered duration, else 12h.
    """
    lines = ["# generated reservations: absence of a line denies the MAC an address"]
    for record in registry.records:
        state = store.states.get(record.mac) if store else None
        duration = state.tier.duration if state else (record.lease or "12h")
        lines.append(f"dhcp-host={record.mac},{record.ip},{record.hostname},{duration}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class HilCandidate:
    """One field-visit work item, with every known bit of context attached."""

    mac: MacAddress | None
    oui_vendor: str
    port: str
    parent_switch: str
    reason: str  # unregistered | unknown_oui | ambiguous_uplink
    floor_hint: int | None = None
    also_seen: tuple[str, ...] = ()  # "switch/port" of duplicate sightings

    def to_dict(self) -> dict:
        return {
            "mac": self.mac.text if self.mac else None,
            "oui_vendor": self.oui_vendor,
            "port": self.port,
            "parent_switch": self.parent_switch,
            "reason": self.reason,
            "floor_hint": self.floor_hint,
            "also_seen": list(self.also_seen),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "HilCandidate":
        return cls(
            mac=MacAddress(data["mac"]) if data["mac"] else None,
            oui_vendor=data["oui_vendor"],
            port=data["port"],
            parent_switch=data["parent_switch"],
            reason=data["reason"],
            floor_hint=data["floor_hint"],
            also_seen=tuple(data["also_seen"]),
        )


def _floor_hint(resolutions, port: str) -> int | None:
    """Most common floor among resolved neighbors on the same port."""
    floors = [r.floor for r in resolutions if r.port == port and r.floor is not None]
    if not floors:
        return None
    counts: dict[int, int] = {}
    for floor in floors:
        counts[floor] = counts.get(floor, 0) + 1
    best = max(counts.values())
    return min(f for f, n in counts.items() if n == best)


def scan_unregistered(
    profiles: list[SwitchProfile],
    registry: Registry,
    topo_map: TopoMap,
    config: ClassifyConfig,
) -> list[HilCandidate]:
    """Sweep every profile for MACs the registry does not know.

    One candidate per MAC: the first switch (sorted) that sees it wins, later
    sightings accumulate in also_seen. Switches whose uplink could not be
    anchored come out as ambiguous_uplink candidates so they reach the same
    work queue.
    """
    by_mac: dict[MacAddress, HilCandidate] = {}
    ambiguous: list[HilCandidate] = []
    for profile in sorted(profiles, key=lambda p: p.switch_id):
        result = classify_switch(profile, registry, topo_map, config)
        if result.needs_uplink_hil:
            ambiguous.append(
                HilCandidate(
                    mac=None,
                    oui_vendor="unknown",
                    port="|".join(result.ambiguous_ports),
                    parent_switch=profile.switch_id,
                    reason="ambiguous_uplink",
                )
            )
            continue
        for resolution in result.hil_resolutions:
            sighting = f"{profile.switch_id}/{resolution.port}"
            existing = by_mac.get(resolution.mac)
            if existing is not None:
                by_mac[resolution.mac] = replace(
                    existing, also_seen=existing.also_seen + (sighting,)
                )
                continue
            by_mac[resolution.mac] = HilCandidate(
                mac=resolution.mac,
                oui_vendor=resolution.oui.vendor if resolution.oui else "unknown",
                port=resolution.port,
                parent_switch=profile.switch_id,
                reason="unregistered" if resolution.oui else "unknown_oui",
                floor_hint=_floor_hint(result.resolutions, resolution.port),
            )
    return _sorted_candidates(list(by_mac.values()) + ambiguous)


def _sorted_candidates(candidates: list[HilCandidate]) -> list[HilCandidate]:
    return sorted(
        candidates, key=lambda c: (c.parent_switch, c.port, c.mac.text if c.mac else "")
    )


def hil_report(candidates: list[HilCandidate], format: str = "text") -> str:
    """Render the work-order list; ordering is stable regardless of scan order."""
    candidates = _sorted_candidates(candidates)
    if format == "json":
        return canonical_json({"candidates": [c.to_dict() for c in candidates]})
    if not candidates:
        return "HIL: 0 candidates, registry covers every visible endpoint MAC\n"
    lines = [f"HIL: {len(candidates)} candidate(s) requiring field identification"]
    for c in candidates:
        floor = f" floor~{c.floor_hint}" if c.floor_hint is not None else ""
        extra = f" (also seen: {', '.join(c.also_seen)})" if c.also_seen else ""
        mac = c.mac.text if c.mac else "-"
        lines.append(
            f"  {mac}  vendor={c.oui_vendor}  switch={c.parent_switch} "
            f"port={c.port}{floor}  reason={c.reason}{extra}"
        )
    return "\n".join(lines) + "\n"


def parse_hil_report(text: str) -> list[HilCandidate]:
    """Inverse of hil_report(format=json)."""
    data = json.loads(text)
    return [HilCandidate.from_dict(entry) for entry in data["candidates"]]


def append_alerts(
    candidates: list[HilCandidate], log_path: Path, now: str | None = None
) -> int:
    """Append one structured record per candidate to the alert log."""
    now = now or utc_now_iso()
    log_path = Path(log_path)
    log_path.parent.mkdir(parents=True, exist_ok=True)
    with log_path.open("a", encoding="utf-8") as fh:
        for c in _sorted_candidates(candidates):
            record = {
                "ts": now,
                "mac": c.mac.text if c.mac else None,
                "reason": c.reason,
                "switch": c.parent_switch,
                "port": c.port,
            }
            fh.write(json.dumps(record, sort_keys=True) + "\n")
    return len(candidates)

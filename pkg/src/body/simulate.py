"""Seeded synthetic-campus generator and ground-truth oracle.

A CampusSpec (plus its seed) fully determines a world: the campus/switch
hierarchy, every camera with its conforming hostname and MAC, the mini-switch
cascade segments, optional unregistered devices and stale registrations, the
registry files, per-switch CLI transcripts in the switch's dialect, a verdict
feed, and the ground truth to score against. Same spec + same seed is
byte-identical output, which is what makes corpus regeneration and the
pipeline determinism checks meaningful.

Two modes share one builder. Random mode samples counts from the spec's
ranges (property tests, oracle-soundness sweeps). Plan mode pins per-campus
counts, per-switch dialects and cascade totals exactly, which is how the
shipped corpus reproduces its published-shape marginals.

Physical notes baked into the generator: server and infrastructure MACs
surface only on uplink ports (they live upstream of the access layer), every
cascade group sits on one floor (a PoE hub serves nearby drops), and the
uplink port always carries strictly more MACs than any local port because it
aggregates the rest of the fabric.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .canonical import canonical_json, load_json, write_text_if_changed
from .errors import SwitchSetMismatch
from .graph import TopologyNode
from .registry import PositionalHostname

DIALECT_NAMES = ("dialect_a", "dialect_b", "dialect_c")

OVERLAY_VLAN = 100

# Vendor prefix table shipped with generated corpora (registry/oui.csv).
OUI_TABLE = (
    ("00:1a:3f", "Intelbras", "camera"),
    ("c0:51:7e", "Hikvision", "camera"),
    ("3c:ef:8c", "Dahua", "camera"),
    ("9c:3d:cf", "HP ProCurve", "switch"),
    ("f0:9f:c2", "Ubiquiti", "switch"),
    ("c8:3a:35", "Tenda", "switch"),
    ("d0:94:66", "Dell", "server"),
    ("3c:ec:ef", "Supermicro", "server"),
    ("bc:ad:28", "Hanwha", "nvr"),
    ("00:02:d1", "Vivotek", "nvr"),
)

_CAMERA_PREFIXES = tuple(p for p, _, cls in OUI_TABLE if cls == "camera")
_SWITCH_PREFIXES = tuple(p for p, _, cls in OUI_TABLE if cls == "switch")
_SERVER_PREFIXES = tuple(p for p, _, cls in OUI_TABLE if cls == "server")
_NVR_PREFIXES = tuple(p for p, _, cls in OUI_TABLE if cls == "nvr")

# model -> (vendor prefix pool, wattage envelope)
CAMERA_MODELS = {
    "VIP-3230-B": ("00:1a:3f", (4.0, 8.0)),
    "VIP-5450-Z": ("00:1a:3f", (6.0, 12.0)),
    "DS-2CD2043": ("c0:51:7e", (5.0, 9.0)),
    "DS-2DE4225": ("c0:51:7e", (9.0, 16.0)),
    "IPC-HDW2431": ("3c:ef:8c", (3.5, 7.5)),
}

SWITCH_MODELS = {
    "dialect_a": ("SW-5200-52P", 52, "Gi1/0/{n}"),
    "dialect_b": ("AccessHub 48G", 48, "{n}"),
    "dialect_c": ("EdgePoint-48", 48, "eth{n}"),
}

CORE_SWITCH_NAME = "camp-uff-core-sw"


@dataclass
class PinnedSwitch:
    switch_id: str
    campus: str
    dialect: str
    cameras: int
    cascade_ports: int
    cascade_cameras: int


@dataclass
class CampusPlan:
    id: str
    access_switches: int
    registered_visible: int
    registered_absent: int = 0
    unregistered: list[str] = field(default_factory=list)  # device classes
    servers: int = 1
    shared_building_pairs: int = 0


@dataclass
class CampusSpec:
    """Generator knobs; `plan` pins everything, otherwise ranges + rng decide."""

    seed: int
    name: str = "sim"
    campuses: int = 2
    switches_per_campus: tuple[int, int] = (1, 3)
    cameras_per_switch: tuple[int, int] = (5, 30)
    servers_per_campus: tuple[int, int] = (1, 3)
    cascade_fraction: float = 0.6
    unregistered_fraction: float = 0.0
    absent_fraction: float = 0.0
    dialect_mix: dict[str, float] = field(
        default_factory=lambda: {"dialect_a": 1.0, "dialect_b": 1.0, "dialect_c": 1.0}
    )
    verdict_mix: dict[str, float] = field(
        default_factory=lambda: {"ok": 0.95, "warning": 0.04, "critical": 0.01}
    )
    cascade_total: int | None = None
    plan: list[CampusPlan] | None = None
    pinned_switches: list[PinnedSwitch] = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {
            "seed": self.seed,
            "name": self.name,
            "campuses": self.campuses,
            "switches_per_campus": list(self.switches_per_campus),
            "cameras_per_switch": list(self.cameras_per_switch),
            "servers_per_campus": list(self.servers_per_campus),
            "cascade_fraction": self.cascade_fraction,
            "unregistered_fraction": self.unregistered_fraction,
            "absent_fraction": self.absent_fraction,
            "dialect_mix": dict(self.dialect_mix),
            "verdict_mix": dict(self.verdict_mix),
        }
        if self.cascade_total is not None:
            out["cascade_total"] = self.cascade_total
        if self.plan is not None:
            out["plan"] = {
                "campuses": [
                    {
                        "id": c.id,
                        "access_switches": c.access_switches,
                        "registered_visible": c.registered_visible,
                        "registered_absent": c.registered_absent,
                        "unregistered": list(c.unregistered),
                        "servers": c.servers,
                        "shared_building_pairs": c.shared_building_pairs,
                    }
                    for c in self.plan
                ],
                "pinned_switches": [
                    {
                        "switch_id": p.switch_id,
                        "campus": p.campus,
                        "dialect": p.dialect,
                        "cameras": p.cameras,
                        "cascade_ports": p.cascade_ports,
                        "cascade_cameras": p.cascade_cameras,
                    }
                    for p in self.pinned_switches
                ],
            }
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "CampusSpec":
        plan = None
        pinned: list[PinnedSwitch] = []
        if "plan" in data and data["plan"]:
            plan = [CampusPlan(**entry) for entry in data["plan"].get("campuses", [])]
            pinned = [PinnedSwitch(**entry) for entry in data["plan"].get("pinned_switches", [])]
        return cls(
            seed=int(data["seed"]),
            name=str(data.get("name", "sim")),
            campuses=int(data.get("campuses", 2)),
            switches_per_campus=tuple(data.get("switches_per_campus", (1, 3))),
            cameras_per_switch=tuple(data.get("cameras_per_switch", (5, 30))),
            servers_per_campus=tuple(data.get("servers_per_campus", (1, 3))),
            cascade_fraction=float(data.get("cascade_fraction", 0.6)),
            unregistered_fraction=float(data.get("unregistered_fraction", 0.0)),
            absent_fraction=float(data.get("absent_fraction", 0.0)),
            dialect_mix=dict(data.get("dialect_mix", {d: 1.0 for d in DIALECT_NAMES})),
            verdict_mix=dict(
                data.get("verdict_mix", {"ok": 0.95, "warning": 0.04, "critical": 0.01})
            ),
            cascade_total=data.get("cascade_total"),
            plan=plan,
            pinned_switches=pinned,
        )

    @classmethod
    def load(cls, path: Path) -> "CampusSpec":
        return cls.from_dict(yaml.safe_load(Path(path).read_text(encoding="utf-8")))


# ---------------------------------------------------------------------------
# Ground truth
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TruthEndpoint:
    mac: str
    switch: str
    port: str
    registered: bool
    device_class: str  # camera | switch | nvr
    hostname: str | None = None
    floor_key: str | None = None
    behind_cascade: bool = False

    def to_dict(self) -> dict:
        return {
            "mac": self.mac,
            "switch": self.switch,
            "port": self.port,
            "registered": self.registered,
            "device_class": self.device_class,
            "hostname": self.hostname,
            "floor_key": self.floor_key,
            "behind_cascade": self.behind_cascade,
        }


@dataclass
class GroundTruth:
    endpoints: list[TruthEndpoint]
    switches: dict[str, dict]  # switch_id -> {campus, tier, dialect}
    servers: dict[str, dict]  # server_id -> {campus, parent, stream_count}
    absent_registered: list[dict]  # {mac, hostname}

    def to_dict(self) -> dict:
        return {
            "endpoints": [e.to_dict() for e in sorted(self.endpoints, key=lambda e: e.mac)],
            "switches": self.switches,
            "servers": self.servers,
            "absent_registered": sorted(self.absent_registered, key=lambda a: a["mac"]),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GroundTruth":
        return cls(
            endpoints=[TruthEndpoint(**e) for e in data["endpoints"]],
            switches=data["switches"],
            servers=data["servers"],
            absent_registered=data["absent_registered"],
        )

    @classmethod
    def load(cls, path: Path) -> "GroundTruth":
        return cls.from_dict(load_json(path))

    @property
    def registered_visible(self) -> list[TruthEndpoint]:
        return [e for e in self.endpoints if e.registered]

    @property
    def unregistered_visible(self) -> list[TruthEndpoint]:
        return [e for e in self.endpoints if not e.registered]


@dataclass
class GeneratedWorld:
    spec: CampusSpec
    files: dict[str, str]  # corpus-relative path -> text
    switch_files: dict[str, dict[str, str]]  # switch_id -> filename -> text
    truth: GroundTruth


# ---------------------------------------------------------------------------
# Internal build structures
# ---------------------------------------------------------------------------


@dataclass
class _Port:
    name: str
    link_up: bool = False
    speed: int = 0
    poe_capable: bool = False
    poe_delivering: bool = False
    poe_watts: float = 0.0
    poe_class: int | None = None
    macs: list[tuple[str, int]] = field(default_factory=list)  # (mac, vlan)


@dataclass
class _SwitchBuild:
    switch_id: str
    campus: str
    tier: int  # 1 dist, 2 access
    dialect: str
    model: str
    ports: list[_Port]
    lldp: list[tuple[str, str, str]] = field(default_factory=list)  # local, name, remote port
    firmware: str = ""
    serial: str = ""
    chassis_mac: str = ""

    def port(self, name: str) -> _Port:
        return next(p for p in self.ports if p.name == name)

    @property
    def uplink_port(self) -> _Port:
        return self.ports[-1]


class _MacPool:
    def __init__(self, rng: random.Random):
        self.rng = rng
        self.used: set[str] = set()

    def take(self, prefix: str) -> str:
        while True:
            tail = ":".join(f"{self.rng.randrange(256):02x}" for _ in range(3))
            mac = f"{prefix}:{tail}"
            if mac not in self.used:
                self.used.add(mac)
                return mac


def _allocate_exact(weights: list[int], total: int, caps: list[int]) -> list[int]:
    """Integer allocation: sums to `total`, respects caps, no allocation of 1.

    Largest-remainder first, then deterministic repair passes. Allocation of
    exactly 1 is repaired away because a single-camera cascade port would be
    indistinguishable from a direct camera port.
    """
    if total == 0 or not weights:
        return [0] * len(weights)
    assert total <= sum(caps), "cascade target exceeds camera population"
    weight_sum = sum(weights) or 1
    quotas = [w * total / weight_sum for w in weights]
    alloc = [min(int(q), cap) for q, cap in zip(quotas, caps)]
    remainder = total - sum(alloc)
    order = sorted(range(len(weights)), key=lambda i: (-(quotas[i] - int(quotas[i])), i))
    while remainder > 0:
        progress = False
        for i in order:
            if remainder == 0:
                break
            if alloc[i] < caps[i]:
                alloc[i] += 1
                remainder -= 1
                progress = True
        assert progress, "caps too tight for cascade target"
    for i in range(len(alloc)):
        if alloc[i] == 1:
            moved = False
            for j in range(len(alloc)):
                if j != i and 2 <= alloc[j] < caps[j]:
                    alloc[j] += 1
                    alloc[i] = 0
                    moved = True
                    break
            if not moved:
                for j in range(len(alloc)):
                    if j != i and alloc[j] >= 3:
                        alloc[j] -= 1
                        alloc[i] = 2 if caps[i] >= 2 else 0
                        moved = True
                        break
            if not moved:
                alloc[i] = 0  # give up one unit rather than emit a 1-camera cascade
    return alloc


def _cascade_groups(count: int, rng: random.Random, forced_ports: int | None = None) -> list[int]:
    """Split a cascade camera count into per-port group sizes (each >= 2)."""
    if count == 0:
        return []
    if forced_ports:
        base = count // forced_ports
        sizes = [base] * forced_ports
        for i in range(count - base * forced_ports):
            sizes[i] += 1
        return sizes
    sizes = []
    remaining = count
    while remaining > 0:
        if remaining <= 8:
            sizes.append(remaining)
            break
        size = rng.randint(3, 8)
        if remaining - size == 1:
            size = size - 1 if size > 3 else size + 1
        sizes.append(size)
        remaining -= size
    return sizes


def _derive_plan(spec: CampusSpec, rng: random.Random) -> list[CampusPlan]:
    if spec.plan is not None:
        return spec.plan
    letters = "abcdefghijklmnopqrstuvwxyz"
    plan = []
    for i in range(spec.campuses):
        campus_id = letters[i % 26] + ("" if i < 26 else str(i // 26))
        n_switches = rng.randint(*spec.switches_per_campus)
        visible = sum(rng.randint(*spec.cameras_per_switch) for _ in range(n_switches))
        n_unreg = round(spec.unregistered_fraction * visible)
        unreg = [rng.choice(("switch", "camera", "nvr")) for _ in range(n_unreg)]
        plan.append(
            CampusPlan(
                id=campus_id,
                access_switches=n_switches,
                registered_visible=visible,
                registered_absent=round(spec.absent_fraction * visible),
                unregistered=unreg,
                servers=rng.randint(*spec.servers_per_campus),
            )
        )
    return plan


def _pick_dialect(rng: random.Random, mix: dict[str, float]) -> str:
    names = [d for d in DIALECT_NAMES if mix.get(d, 0) > 0]
    weights = [mix[d] for d in names]
    return rng.choices(names, weights=weights, k=1)[0]


# ---------------------------------------------------------------------------
# Generation
# ---------------------------------------------------------------------------


def generate_campus(spec: CampusSpec) -> GeneratedWorld:
    rng = random.Random(spec.seed)
    macs = _MacPool(rng)
    plan = _derive_plan(spec, rng)

    pinned_by_campus: dict[str, list[PinnedSwitch]] = {}
    for pin in spec.pinned_switches:
        pinned_by_campus.setdefault(pin.campus, []).append(pin)

    switches: list[_SwitchBuild] = []
    truth_endpoints: list[TruthEndpoint] = []
    registry_rows: list[dict] = []  # mac, ip, hostname, model
    absent_rows: list[dict] = []
    topo_campuses: dict[str, dict[str, list[str]]] = {}
    servers: dict[str, dict] = {}
    idx_counter: dict[tuple[str, str, str, int], int] = {}
    camera_hostnames: list[str] = []

    core_mac = macs.take(_SWITCH_PREFIXES[0])

    def next_index(campus: str, inst: str, bld: str, floor: int) -> int:
        key = (campus, inst, bld, floor)
        idx_counter[key] = idx_counter.get(key, 0) + 1
        return idx_counter[key]

    for campus_idx, campus in enumerate(plan, start=1):
        dist_id = PositionalHostname(campus.id, "net", "sw", "dist", 0).render()
        topo_campuses[campus.id] = {dist_id: []}

        # Lay out the access switches: pinned ones first (they declare their
        # own identity), the rest pick fresh buildings in sequence.
        pins = pinned_by_campus.get(campus.id, [])
        used_buildings = set()
        access_plans: list[dict] = []
        for pin in pins:
            from .registry import parse_hostname as _ph

            parsed = _ph(pin.switch_id)
            assert parsed is not None, f"pinned switch id not grammar-conforming: {pin.switch_id}"
            used_buildings.add(parsed.building)
            access_plans.append(
                {
                    "id": pin.switch_id,
                    "inst": parsed.institute,
                    "bld": parsed.building,
                    "floors": (0, 1, 2),
                    "cameras": pin.cameras,
                    "dialect": pin.dialect,
                    "pin": pin,
                }
            )
        n_generic = campus.access_switches - len(pins)
        letters = [c for c in "abcdefghijklmnopqrstuvwxyz" if c not in used_buildings]
        shared = campus.shared_building_pairs
        generic_buildings: list[tuple[str, tuple[int, ...]]] = []
        li = 0
        i = 0
        while i < n_generic:
            if shared > 0 and i >= n_generic - 2 * shared:
                # A shared-building pair: two switches, same building,
                # overlapping floor coverage, distinct switch floors.
                bld = letters[li]
                li += 1
                generic_buildings.append((bld, (0, 1)))
                generic_buildings.append((bld, (1, 2)))
                shared -= 1
                i += 2
            else:
                generic_buildings.append((letters[li], (0, 1, 2)))
                li += 1
                i += 1
        pair_floor = {}
        for n, (bld, floors) in enumerate(generic_buildings):
            switch_floor = pair_floor.get(bld, 0)
            pair_floor[bld] = switch_floor + 1
            access_plans.append(
                {
                    "id": PositionalHostname(campus.id, "a", "sw", bld, switch_floor).render(),
                    "inst": "a",
                    "bld": bld,
                    "floors": floors,
                    "cameras": 0,  # filled below
                    "dialect": _pick_dialect(rng, spec.dialect_mix),
                    "pin": None,
                }
            )

        # Camera counts: pinned fixed, remainder split near-equally.
        fixed = sum(a["cameras"] for a in access_plans if a["pin"])
        generic = [a for a in access_plans if not a["pin"]]
        remainder = campus.registered_visible - fixed
        assert remainder >= 0, f"campus {campus.id}: pinned cameras exceed plan"
        if generic:
            base = remainder // len(generic)
            extra = remainder % len(generic)
            for n, a in enumerate(generic):
                a["cameras"] = base + (1 if n < extra else 0)
        else:
            assert remainder == 0, f"campus {campus.id}: no switches for {remainder} cameras"

        for a in access_plans:
            topo_campuses[campus.id][dist_id].append(a["id"])

        # Cascade allocation across this campus's switches happens globally
        # below; stash what we need.
        for order, a in enumerate(access_plans):
            a["campus"] = campus.id
            a["campus_idx"] = campus_idx
            a["switch_idx"] = order + 1
            a["dist_id"] = dist_id

        campus.access_plans = access_plans  # type: ignore[attr-defined]

        # Servers: parented to the distribution switch.
        for k in range(1, campus.servers + 1):
            server_id = PositionalHostname(campus.id, "net", "srv", "dc", 0, k).render()
            servers[server_id] = {"campus": campus.id, "parent": dist_id, "stream_count": 0}

    # Global cascade target.
    all_access = [a for campus in plan for a in campus.access_plans]  # type: ignore[attr-defined]
    total_visible = sum(a["cameras"] for a in all_access)
    if spec.cascade_total is not None:
        cascade_target = spec.cascade_total
    else:
        cascade_target = round(spec.cascade_fraction * total_visible)
    pinned_cascade = sum(a["pin"].cascade_cameras for a in all_access if a["pin"])
    generic_access = [a for a in all_access if not a["pin"]]
    alloc = _allocate_exact(
        [a["cameras"] for a in generic_access],
        max(cascade_target - pinned_cascade, 0),
        [a["cameras"] for a in generic_access],
    )
    for a, cascade_cameras in zip(generic_access, alloc):
        a["cascade_cameras"] = cascade_cameras
    for a in all_access:
        if a["pin"]:
            a["cascade_cameras"] = a["pin"].cascade_cameras

    # Distribute unregistered devices: hubs need a switch with cascades.
    for campus in plan:
        access_plans = campus.access_plans  # type: ignore[attr-defined]
        for a in access_plans:
            a["unregistered"] = []
        for cls_idx, device_class in enumerate(campus.unregistered):
            if device_class == "switch":
                hosts = [a for a in access_plans if a["cascade_cameras"] >= 2] or access_plans
            else:
                hosts = access_plans
            hosts[cls_idx % len(hosts)]["unregistered"].append(device_class)

    # Build each access switch.
    for a in all_access:
        build = _build_access_switch(a, spec, rng, macs, registry_rows, truth_endpoints, camera_hostnames, next_index)
        switches.append(build)

    # Absent registrations: records without presence.
    for campus_idx, campus in enumerate(plan, start=1):
        access_plans = campus.access_plans  # type: ignore[attr-defined]
        for k in range(campus.registered_absent):
            host_plan = access_plans[k % len(access_plans)]
            floor = rng.choice(host_plan["floors"])
            index = next_index(campus.id, host_plan["inst"], host_plan["bld"], floor)
            hostname = PositionalHostname(
                campus.id, host_plan["inst"], "cam", host_plan["bld"], floor, index
            ).render()
            model = rng.choice(sorted(CAMERA_MODELS))
            mac = macs.take(CAMERA_MODELS[model][0])
            ip = f"10.{campus_idx}.240.{k + 1}"
            registry_rows.append({"mac": mac, "ip": ip, "hostname": hostname, "model": model})
            absent_rows.append({"mac": mac, "hostname": hostname})

    # Build distribution switches now that access MAC tables exist.
    builds_by_id = {b.switch_id: b for b in switches}
    dist_builds: list[_SwitchBuild] = []
    for campus_idx, campus in enumerate(plan, start=1):
        dist_id = next(iter(topo_campuses[campus.id]))
        dist_builds.append(
            _build_dist_switch(
                dist_id,
                campus.id,
                [builds_by_id[sid] for sid in topo_campuses[campus.id][dist_id]],
                [b for b in switches if b.campus != campus.id],
                spec,
                rng,
                macs,
                core_mac,
            )
        )
    switches.extend(dist_builds)

    # Server stream counts: campus camera totals round-robined over servers.
    for campus in plan:
        campus_servers = sorted(s for s, meta in servers.items() if meta["campus"] == campus.id)
        if not campus_servers:
            continue
        visible = campus.registered_visible
        base, extra = divmod(visible, len(campus_servers))
        for n, server_id in enumerate(campus_servers):
            servers[server_id]["stream_count"] = base + (1 if n < extra else 0)

    truth = GroundTruth(
        endpoints=sorted(truth_endpoints, key=lambda e: e.mac),
        switches={
            b.switch_id: {"campus": b.campus, "tier": b.tier, "dialect": b.dialect}
            for b in sorted(switches, key=lambda s: s.switch_id)
        },
        servers=servers,
        absent_registered=absent_rows,
    )

    files = _render_registry_files(spec, plan, topo_campuses, servers, registry_rows)
    files["verdicts.json"] = _render_verdicts(rng, spec, camera_hostnames)
    files["ground_truth.json"] = canonical_json(truth.to_dict())
    files["_spec.yml"] = yaml.safe_dump(spec.to_dict(), sort_keys=True)

    switch_files = {b.switch_id: _render_switch_files(b) for b in switches}
    return GeneratedWorld(spec=spec, files=files, switch_files=switch_files, truth=truth)


def _build_access_switch(
    a: dict,
    spec: CampusSpec,
    rng: random.Random,
    macs: _MacPool,
    registry_rows: list[dict],
    truth_endpoints: list[TruthEndpoint],
    camera_hostnames: list[str],
    next_index,
) -> _SwitchBuild:
    dialect = a["dialect"]
    model, port_count, port_format = SWITCH_MODELS[dialect]
    ports = [_Port(name=port_format.format(n=n)) for n in range(1, port_count + 1)]
    build = _SwitchBuild(
        switch_id=a["id"],
        campus=a["campus"],
        tier=2,
        dialect=dialect,
        model=model,
        ports=ports,
        firmware=f"v{rng.randint(1, 4)}.{rng.randint(0, 9)}.{rng.randint(0, 20)}",
        serial="".join(rng.choice("0123456789ABCDEF") for _ in range(10)),
        chassis_mac=macs.take(rng.choice(_SWITCH_PREFIXES)),
    )

    campus, inst, bld = a["campus"], a["inst"], a["bld"]
    campus_idx, switch_idx = a["campus_idx"], a["switch_idx"]
    ip_counter = 0

    def new_camera(floor: int) -> tuple[str, str, str, str]:
        nonlocal ip_counter
        ip_counter += 1
        index = next_index(campus, inst, bld, floor)
        hostname = PositionalHostname(campus, inst, "cam", bld, floor, index).render()
        model_name = rng.choice(sorted(CAMERA_MODELS))
        mac = macs.take(CAMERA_MODELS[model_name][0])
        ip = f"10.{campus_idx}.{switch_idx}.{ip_counter}"
        registry_rows.append({"mac": mac, "ip": ip, "hostname": hostname, "model": model_name})
        camera_hostnames.append(hostname)
        return hostname, mac, ip, model_name

    cascade_cameras = a["cascade_cameras"]
    direct_cameras = a["cameras"] - cascade_cameras
    forced_ports = a["pin"].cascade_ports if a["pin"] else None
    groups = _cascade_groups(cascade_cameras, rng, forced_ports)

    port_cursor = 0

    def take_port() -> _Port:
        nonlocal port_cursor
        port = ports[port_cursor]
        port_cursor += 1
        return port

    # Direct camera ports: one powered port per camera.
    for _ in range(direct_cameras):
        floor = rng.choice(a["floors"])
        hostname, mac, ip, model_name = new_camera(floor)
        envelope = CAMERA_MODELS[model_name][1]
        port = take_port()
        port.link_up = True
        port.speed = 1000
        port.poe_capable = True
        port.poe_delivering = True
        port.poe_watts = round(rng.uniform(envelope[0] + 0.2, envelope[1] - 0.2), 1)
        port.poe_class = rng.choice((2, 3))
        port.macs.append((mac, OVERLAY_VLAN))
        truth_endpoints.append(
            TruthEndpoint(
                mac=mac,
                switch=build.switch_id,
                port=port.name,
                registered=True,
                device_class="camera",
                hostname=hostname,
                floor_key=f"bld{bld}-flr{floor}",
                behind_cascade=False,
            )
        )

    # Cascade ports: one mini-switch hub per group, all drops on one floor.
    cascade_ports: list[_Port] = []
    for size in groups:
        floor = rng.choice(a["floors"])
        port = take_port()
        port.link_up = True
        port.speed = 1000
        port.poe_capable = True
        port.poe_delivering = True
        port.poe_watts = round(rng.uniform(15.0, 28.0), 1)
        port.poe_class = 4
        cascade_ports.append(port)
        for _ in range(size):
            hostname, mac, ip, model_name = new_camera(floor)
            port.macs.append((mac, OVERLAY_VLAN))
            truth_endpoints.append(
                TruthEndpoint(
                    mac=mac,
                    switch=build.switch_id,
                    port=port.name,
                    registered=True,
                    device_class="camera",
                    hostname=hostname,
                    floor_key=f"bld{bld}-flr{floor}",
                    behind_cascade=True,
                )
            )

    # Unregistered devices.
    for device_class in a["unregistered"]:
        if device_class == "switch" and cascade_ports:
            # The hub's own chassis MAC surfaces on its cascade port.
            port = cascade_ports[0]
            mac = macs.take(rng.choice(_SWITCH_PREFIXES))
            port.macs.append((mac, OVERLAY_VLAN))
            truth_endpoints.append(
                TruthEndpoint(
                    mac=mac,
                    switch=build.switch_id,
                    port=port.name,
                    registered=False,
                    device_class="switch",
                )
            )
        elif device_class == "camera":
            port = take_port()
            port.link_up = True
            port.speed = 1000
            port.poe_capable = True
            port.poe_delivering = True
            port.poe_watts = round(rng.uniform(4.2, 7.8), 1)
            port.poe_class = 2
            mac = macs.take(rng.choice(_CAMERA_PREFIXES))
            port.macs.append((mac, OVERLAY_VLAN))
            truth_endpoints.append(
                TruthEndpoint(
                    mac=mac,
                    switch=build.switch_id,
                    port=port.name,
                    registered=False,
                    device_class="camera",
                )
            )
        else:  # nvr: non-gigabit, no PoE negotiation -> unknown-class port
            port = take_port()
            port.link_up = True
            port.speed = 100
            port.poe_capable = True
            port.poe_delivering = False
            mac = macs.take(rng.choice(_NVR_PREFIXES))
            port.macs.append((mac, OVERLAY_VLAN))
            truth_endpoints.append(
                TruthEndpoint(
                    mac=mac,
                    switch=build.switch_id,
                    port=port.name,
                    registered=False,
                    device_class="nvr",
                )
            )

    # Uplink: the last port, strictly more MACs than any local port.
    uplink = ports[-1]
    uplink.link_up = True
    uplink.speed = 1000
    max_local = max((len(p.macs) for p in ports[:-1]), default=0)
    infra_count = max_local + 1 + rng.randint(1, 4)
    for _ in range(infra_count):
        uplink.macs.append((macs.take(rng.choice(_SERVER_PREFIXES)), OVERLAY_VLAN))
    build.lldp.append((uplink.name, a["dist_id"], "dn-" + build.switch_id[-6:]))

    return build


def _build_dist_switch(
    dist_id: str,
    campus: str,
    members: list[_SwitchBuild],
    other_switches: list[_SwitchBuild],
    spec: CampusSpec,
    rng: random.Random,
    macs: _MacPool,
    core_mac: str,
) -> _SwitchBuild:
    dialect = _pick_dialect(rng, spec.dialect_mix)
    model, port_count, port_format = SWITCH_MODELS[dialect]
    ports = [_Port(name=port_format.format(n=n)) for n in range(1, port_count + 1)]
    build = _SwitchBuild(
        switch_id=dist_id,
        campus=campus,
        tier=1,
        dialect=dialect,
        model=model,
        ports=ports,
        firmware=f"v{rng.randint(1, 4)}.{rng.randint(0, 9)}.{rng.randint(0, 20)}",
        serial="".join(rng.choice("0123456789ABCDEF") for _ in range(10)),
        chassis_mac=macs.take(rng.choice(_SWITCH_PREFIXES)),
    )

    # One downlink per member access switch, aggregating its whole subtree.
    for n, member in enumerate(sorted(members, key=lambda m: m.switch_id)):
        port = ports[n]
        port.link_up = True
        port.speed = 1000
        port.macs.append((member.chassis_mac, OVERLAY_VLAN))
        for member_port in member.ports[:-1]:  # everything but the member's uplink
            for mac, vlan in member_port.macs:
                port.macs.append((mac, vlan))
        build.lldp.append((port.name, member.switch_id, "up-" + member.switch_id[-6:]))

    # Uplink carries the rest of the fabric.
    uplink = ports[-1]
    uplink.link_up = True
    uplink.speed = 1000
    uplink.macs.append((core_mac, OVERLAY_VLAN))
    for other in sorted(other_switches, key=lambda s: s.switch_id):
        uplink.macs.append((other.chassis_mac, OVERLAY_VLAN))
        for other_port in other.ports[:-1]:
            for mac, vlan in other_port.macs:
                uplink.macs.append((mac, vlan))
    max_local = max(len(p.macs) for p in ports[:-1])
    while len(uplink.macs) <= max_local:
        uplink.macs.append((macs.take(rng.choice(_SERVER_PREFIXES)), OVERLAY_VLAN))
    build.lldp.append((uplink.name, CORE_SWITCH_NAME, "agg-" + campus))

    return build


# ---------------------------------------------------------------------------
# File rendering
# ---------------------------------------------------------------------------


def _render_registry_files(spec, plan, topo_campuses, servers, registry_rows) -> dict[str, str]:
    rows = sorted(registry_rows, key=lambda r: r["hostname"])
    dhcp_lines = [f"# sovereign reservations for corpus {spec.name}"]
    for row in rows:
        dhcp_lines.append(f"dhcp-host={row['mac']},{row['ip']},{row['hostname']},infinite")
    csv_lines = ["mac,ip,hostname,model"]
    for row in rows:
        csv_lines.append(f"{row['mac']},{row['ip']},{row['hostname']},{row['model']}")

    topo = {
        "campuses": {
            campus: {dist: sorted(accesses) for dist, accesses in dists.items()}
            for campus, dists in sorted(topo_campuses.items())
        },
        "servers": [
            {"id": server_id, "campus": meta["campus"], "parent": meta["parent"]}
            for server_id, meta in sorted(servers.items())
        ],
    }

    oui_lines = ["prefix,vendor,device_class"]
    for prefix, vendor, cls in OUI_TABLE:
        oui_lines.append(f"{prefix},{vendor},{cls}")

    wattage_lines = ["model,min_w,max_w"]
    for model_name in sorted(CAMERA_MODELS):
        low, high = CAMERA_MODELS[model_name][1]
        wattage_lines.append(f"{model_name},{low},{high}")

    classify_config = {
        "overlay_vlan": OVERLAY_VLAN,
        "uplink_name_patterns": ["*core*"],
        "cascade_name_patterns": [],
        "oui_csv": "registry/oui.csv",
        "wattage_profiles": "registry/wattage_profiles.csv",
    }

    return {
        "registry/dnsmasq.conf": "\n".join(dhcp_lines) + "\n",
        "registry/assets.csv": "\n".join(csv_lines) + "\n",
        "registry/topo_map.yml": yaml.safe_dump(topo, sort_keys=True),
        "registry/oui.csv": "\n".join(oui_lines) + "\n",
        "registry/wattage_profiles.csv": "\n".join(wattage_lines) + "\n",
        "classify_config.yml": yaml.safe_dump(classify_config, sort_keys=True),
    }


def _render_verdicts(rng: random.Random, spec: CampusSpec, camera_hostnames: list[str]) -> str:
    warn = spec.verdict_mix.get("warning", 0.0)
    crit = spec.verdict_mix.get("critical", 0.0)
    feed = {}
    for hostname in sorted(camera_hostnames):
        u = rng.random()
        if u < crit:
            feed[hostname] = "CRITICAL"
        elif u < crit + warn:
            feed[hostname] = "WARNING"
        else:
            feed[hostname] = "OK"
    return canonical_json(feed)


def _render_switch_files(build: _SwitchBuild) -> dict[str, str]:
    render = {
        "dialect_a": (_render_a_mac, _render_a_interfaces, _render_a_poe, _render_a_lldp),
        "dialect_b": (_render_b_mac, _render_b_interfaces, _render_b_poe, _render_b_lldp),
        "dialect_c": (_render_c_mac, _render_c_interfaces, _render_c_poe, _render_c_lldp),
    }[build.dialect]
    budget = math.ceil(sum(p.poe_watts for p in build.ports if p.poe_delivering)) + 60
    meta = {
        "switch_id": build.switch_id,
        "dialect": build.dialect,
        "model": build.model,
        "firmware": build.firmware,
        "serial": build.serial,
        "poe_budget_watts": float(budget),
    }
    return {
        "mac_table.txt": render[0](build),
        "interfaces.txt": render[1](build),
        "poe.txt": render[2](build),
        "lldp.txt": render[3](build),
        "meta.yml": yaml.safe_dump(meta, sort_keys=True),
    }


def _dotted(mac: str) -> str:
    digits = mac.replace(":", "")
    return f"{digits[0:4]}.{digits[4:8]}.{digits[8:12]}"


def _dashed(mac: str) -> str:
    return mac.replace(":", "-").upper()


def _render_a_mac(build: _SwitchBuild) -> str:
    lines = [
        "          Mac Address Table",
        "-------------------------------------------",
        "",
        "Vlan    Mac Address       Type        Ports",
        "----    -----------       --------    -----",
    ]
    total = 0
    for port in build.ports:
        for mac, vlan in port.macs:
            lines.append(f" {vlan:<7}{_dotted(mac):<18}DYNAMIC     {port.name}")
            total += 1
    lines.append(f"Total Mac Addresses for this criterion: {total}")
    return "\n".join(lines) + "\n"


def _render_a_interfaces(build: _SwitchBuild) -> str:
    lines = [
        "Port         Name  Status       Vlan  Duplex   Speed  Type",
        "-----------  ----  -----------  ----  -------  -----  ----------------",
    ]
    for port in build.ports:
        status = "connected" if port.link_up else "notconnect"
        speed = f"a-{port.speed}" if port.link_up else "auto"
        duplex = "a-full" if port.link_up else "auto"
        lines.append(
            f"{port.name:<13}      {status:<13}{OVERLAY_VLAN:<6}{duplex:<9}{speed:<7}10/100/1000BaseTX"
        )
    return "\n".join(lines) + "\n"


def _render_a_poe(build: _SwitchBuild) -> str:
    budget = math.ceil(sum(p.poe_watts for p in build.ports if p.poe_delivering)) + 60
    used = sum(p.poe_watts for p in build.ports if p.poe_delivering)
    lines = [
        "Module   Available     Used     Remaining",
        "          (Watts)     (Watts)    (Watts)",
        "------   ---------   --------   ---------",
        f"1        {float(budget):<12.1f}{used:<11.1f}{budget - used:.1f}",
        "Interface Admin  Oper       Power   Device              Class Max",
        "--------- ------ ---------- ------- ------------------- ----- ----",
    ]
    for port in build.ports:
        if not port.poe_capable:
            continue
        oper = "on" if port.poe_delivering else "off"
        device = "Ieee PD" if port.poe_delivering else "n/a"
        cls = str(port.poe_class) if port.poe_class is not None else "n/a"
        lines.append(
            f"{port.name:<10}auto   {oper:<11}{port.poe_watts:<8.1f}{device:<20}{cls:<6}30.0"
        )
    return "\n".join(lines) + "\n"


def _render_a_lldp(build: _SwitchBuild) -> str:
    lines = []
    for local, name, remote in build.lldp:
        lines.extend(
            [
                "------------------------------------------------",
                f"Local Intf: {local}",
                f"Chassis id: {_dotted(build.chassis_mac)}",
                f"Port id: {remote}",
                f"System Name: {name}",
                "",
            ]
        )
    lines.append(f"Total entries displayed: {len(build.lldp)}")
    return "\n".join(lines) + "\n"


def _render_b_mac(build: _SwitchBuild) -> str:
    lines = [
        "  Status and Counters - Port Address Table",
        "",
        "  MAC Address       Port    VLAN",
        "  ----------------- ------- ----",
    ]
    for port in build.ports:
        for mac, vlan in port.macs:
            lines.append(f"  {mac} {port.name:<7} {vlan}")
    return "\n".join(lines) + "\n"


def _render_b_interfaces(build: _SwitchBuild) -> str:
    lines = [
        "  Status and Counters - Port Status",
        "",
        "  Port  Type       Enabled Status Mode",
        "  ----- ---------- ------- ------ --------",
    ]
    for port in build.ports:
        if port.link_up:
            lines.append(f"  {port.name:<5} 100/1000T  Yes     Up     {port.speed}FDx")
        else:
            lines.append(f"  {port.name:<5} 100/1000T  Yes     Down")
    return "\n".join(lines) + "\n"


def _render_b_poe(build: _SwitchBuild) -> str:
    lines = [
        "  Status and Counters - Port Power Status",
        "",
        "  Port  Power Enable  Detection Status  Power Class  Power Draw",
        "  ----- ------------- ----------------- ------------ -----------",
    ]
    for port in build.ports:
        enable = "Yes" if port.poe_capable else "No"
        if port.poe_delivering:
            status = "Delivering"
        elif port.poe_capable:
            status = "Searching"
        else:
            status = "Disabled"
        cls = str(port.poe_class) if port.poe_class is not None else "n/a"
        lines.append(f"  {port.name:<5} {enable:<13} {status:<17} {cls:<12} {port.poe_watts:.1f} W")
    return "\n".join(lines) + "\n"


def _render_b_lldp(build: _SwitchBuild) -> str:
    lines = [
        "  LLDP Remote Devices Information",
        "",
        "  LocalPort | ChassisId          PortId  SysName",
        "  --------- + ------------------ ------- ----------------------",
    ]
    for local, name, remote in build.lldp:
        lines.append(f"  {local:<9} | {build.chassis_mac}  {remote:<7} {name}")
    return "\n".join(lines) + "\n"


def _render_c_mac(build: _SwitchBuild) -> str:
    lines = ["# mac table"]
    for port in build.ports:
        for mac, vlan in port.macs:
            lines.append(f"mac={_dashed(mac)} port={port.name} vlan={vlan}")
    return "\n".join(lines) + "\n"


def _render_c_interfaces(build: _SwitchBuild) -> str:
    lines = ["# port status"]
    for port in build.ports:
        link = "up" if port.link_up else "down"
        lines.append(f"port={port.name} link={link} speed={port.speed}")
    return "\n".join(lines) + "\n"


def _render_c_poe(build: _SwitchBuild) -> str:
    lines = ["# poe status"]
    for port in build.ports:
        if not port.poe_capable:
            state = "na"
        elif port.poe_delivering:
            state = "on"
        else:
            state = "off"
        cls = str(port.poe_class) if port.poe_class is not None else "-"
        lines.append(f"port={port.name} poe={state} power={port.poe_watts:.2f}W class={cls}")
    return "\n".join(lines) + "\n"


def _render_c_lldp(build: _SwitchBuild) -> str:
    lines = ["# lldp neighbors"]
    for local, name, remote in build.lldp:
        lines.append(f"port={local} neighbor={name} neighbor-port={remote}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Corpus output
# ---------------------------------------------------------------------------


def write_corpus(world: GeneratedWorld, out_dir: Path) -> list[Path]:
    """Write the whole corpus; unchanged files are left untouched."""
    out_dir = Path(out_dir)
    written = []
    for rel_path, text in sorted(world.files.items()):
        if write_text_if_changed(out_dir / rel_path, text):
            written.append(out_dir / rel_path)
    for switch_id, files in sorted(world.switch_files.items()):
        for filename, text in sorted(files.items()):
            if write_text_if_changed(out_dir / switch_id / filename, text):
                written.append(out_dir / switch_id / filename)
    return written


# ---------------------------------------------------------------------------
# Scoring
# ---------------------------------------------------------------------------


@dataclass
class TopologyDiff:
    accuracy_on_registered: float
    accuracy_on_visible: float
    correct: int
    registered_total: int
    visible_total: int
    mismatches: list[dict]


@dataclass(frozen=True)
class _Placement:
    switch: str
    port: str | None
    floor_key: str | None
    behind_cascade: bool
    quarantined: bool


def _tree_placements(switch_id: str, tree: TopologyNode) -> dict[str, _Placement]:
    placements: dict[str, _Placement] = {}

    def walk(node: TopologyNode, floor_key: str | None, cascade: bool, quarantined: bool):
        if node.kind == "floor_group":
            floor_key = node.label
        elif node.kind == "mini_switch":
            cascade = True
        elif node.kind == "quarantine_block":
            quarantined = True
        mac = node.metadata.get("mac")
        if mac and node.kind in ("camera", "unresolved_mac"):
            placements[mac] = _Placement(
                switch=switch_id,
                port=node.metadata.get("port"),
                floor_key=floor_key,
                behind_cascade=cascade,
                quarantined=quarantined,
            )
        for child in node.children:
            walk(child, floor_key, cascade, quarantined)

    walk(tree, None, False, False)
    return placements


def diff_topology(trees: dict[str, TopologyNode], truth: GroundTruth) -> TopologyDiff:
    """Score inferred per-switch trees against the generated ground truth.

    Correct for a registered endpoint means: present, not quarantined, right
    switch, right floor group, right port, right cascade-ness. Correct for an
    unregistered MAC means: exposed in that switch's quarantine block. The
    registered-denominator accuracy covers registered-and-visible endpoints;
    the visible denominator divides the same numerator by every visible MAC.
    """
    truth_switches = set(truth.switches)
    tree_switches = set(trees)
    if truth_switches != tree_switches:
        raise SwitchSetMismatch(
            missing=sorted(truth_switches - tree_switches),
            unexpected=sorted(tree_switches - truth_switches),
        )

    placements: dict[str, _Placement] = {}
    for switch_id, tree in trees.items():
        placements.update(_tree_placements(switch_id, tree))

    mismatches: list[dict] = []
    correct = 0
    for endpoint in truth.endpoints:
        got = placements.get(endpoint.mac)
        if endpoint.registered:
            expected = {
                "switch": endpoint.switch,
                "port": endpoint.port,
                "floor_key": endpoint.floor_key,
                "behind_cascade": endpoint.behind_cascade,
                "quarantined": False,
            }
            if (
                got is not None
                and not got.quarantined
                and got.switch == endpoint.switch
                and got.port == endpoint.port
                and got.floor_key == endpoint.floor_key
                and got.behind_cascade == endpoint.behind_cascade
            ):
                correct += 1
            else:
                mismatches.append(
                    {
                        "mac": endpoint.mac,
                        "expected": expected,
                        "got": got.__dict__ if got else None,
                    }
                )
        else:
            if got is None or not got.quarantined:
                mismatches.append(
                    {
                        "mac": endpoint.mac,
                        "expected": {"switch": endpoint.switch, "quarantined": True},
                        "got": got.__dict__ if got else None,
                    }
                )

    registered_total = len(truth.registered_visible)
    visible_total = len(truth.endpoints)
    return TopologyDiff(
        accuracy_on_registered=correct / registered_total if registered_total else 1.0,
        accuracy_on_visible=correct / visible_total if visible_total else 1.0,
        correct=correct,
        registered_total=registered_total,
        visible_total=visible_total,
        mismatches=mismatches,
    )


def uff_like_spec() -> CampusSpec:
    """The shipped corpus plan: marginals pinned to the published deployment shape."""
    return CampusSpec(
        seed=49017,
        name="uff-like",
        dialect_mix={"dialect_a": 2.0, "dialect_b": 1.0, "dialect_c": 1.0},
        verdict_mix={"ok": 0.93, "warning": 0.05, "critical": 0.02},
        cascade_total=339,
        plan=[
            CampusPlan(
                id="g",
                access_switches=6,
                registered_visible=315,
                registered_absent=5,
                unregistered=["switch", "switch", "camera", "nvr"],
                servers=10,
                shared_building_pairs=1,
            ),
            CampusPlan(
                id="p",
                access_switches=4,
                registered_visible=104,
                registered_absent=6,
                unregistered=["switch", "switch", "camera"],
                servers=6,
            ),
            CampusPlan(
                id="r",
                access_switches=3,
                registered_visible=60,
                unregistered=["switch", "camera"],
                servers=5,
            ),
            CampusPlan(
                id="v",
                access_switches=2,
                registered_visible=20,
                unregistered=["switch"],
                servers=4,
            ),
            CampusPlan(id="n", access_switches=1, registered_visible=0, servers=1),
            CampusPlan(
                id="aux1",
                access_switches=2,
                registered_visible=20,
                unregistered=["nvr"],
                servers=2,
            ),
            CampusPlan(id="aux2", access_switches=1, registered_visible=11, servers=2),
        ],
        pinned_switches=[
            PinnedSwitch(
                switch_id="camp-g-inst-a-sw-bldb-flr0",
                campus="g",
                dialect="dialect_a",
                cameras=35,
                cascade_ports=1,
                cascade_cameras=8,
            )
        ],
    )

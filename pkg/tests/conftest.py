from __future__ import annotations

import random
from pathlib import Path

import pytest

from body.classify import ClassifyConfig
from body.cli import (
    StatePaths,
    build_server_tree,
    build_trees,
    classify_all,
    collect_switches,
    import_fixture_inputs,
    load_state,
)
from body.collection import InterfaceState, LldpNeighbor, MacTableEntry, PoeState, SwitchProfile
from body.graph import TopologyNode
from body.registry import MacAddress, OuiDatabase, OuiEntry
from body.simulate import CampusSpec, GeneratedWorld, write_corpus

REPO_ROOT = Path(__file__).resolve().parent.parent
UFF_FIXTURES = REPO_ROOT / "fixtures" / "uff-like"

PINNED_SWITCH = "camp-g-inst-a-sw-bldb-flr0"


@pytest.fixture(scope="session")
def uff_fixtures() -> Path:
    assert UFF_FIXTURES.is_dir(), "shipped corpus missing; run `body simulate --spec uff-like --out fixtures/uff-like`"
    return UFF_FIXTURES


@pytest.fixture(scope="session")
def uff_state(uff_fixtures, tmp_path_factory):
    """Collected + classified + built pipeline state over the shipped corpus."""
    state_dir = tmp_path_factory.mktemp("uff-state")
    state = StatePaths(state_dir)
    import_fixture_inputs(uff_fixtures, state)
    collect_switches(state, uff_fixtures)
    loaded = load_state(state_dir)
    results = classify_all(loaded)
    trees = build_trees(loaded, results)
    server_tree = build_server_tree(loaded, results)
    return {
        "state": state,
        "loaded": loaded,
        "results": results,
        "trees": trees,
        "server_tree": server_tree,
    }


def small_spec(seed: int, **overrides) -> CampusSpec:
    spec = CampusSpec(
        seed=seed,
        name=f"sim-{seed}",
        campuses=2,
        switches_per_campus=(1, 3),
        cameras_per_switch=(4, 18),
        servers_per_campus=(1, 2),
        cascade_fraction=0.55,
    )
    for key, value in overrides.items():
        setattr(spec, key, value)
    return spec


def run_world(world: GeneratedWorld, workdir: Path) -> dict:
    """Full pipeline over a generated world under `workdir`."""
    corpus = workdir / "corpus"
    write_corpus(world, corpus)
    state_dir = workdir / "state"
    state = StatePaths(state_dir)
    import_fixture_inputs(corpus, state)
    collect_switches(state, corpus)
    loaded = load_state(state_dir)
    results = classify_all(loaded)
    trees = build_trees(loaded, results)
    return {"corpus": corpus, "state": state, "loaded": loaded, "results": results, "trees": trees}


# ---------------------------------------------------------------------------
# Random structure builders for property-style tests
# ---------------------------------------------------------------------------

TEST_OUI_DB = OuiDatabase(
    [
        OuiEntry("00:1a:3f", "Intelbras", "camera"),
        OuiEntry("c0:51:7e", "Hikvision", "camera"),
        OuiEntry("9c:3d:cf", "HP ProCurve", "switch"),
        OuiEntry("d0:94:66", "Dell", "server"),
        OuiEntry("bc:ad:28", "Hanwha", "nvr"),
    ]
)


def mk_iface(port, link_up=True, speed=1000, capable=False, delivering=False, watts=0.0, cls=None):
    return InterfaceState(
        port=port,
        link_up=link_up,
        speed_mbps=speed,
        poe=PoeState(capable=capable, delivering=delivering, power_watts=watts, poe_class=cls),
    )


def mk_profile(switch_id, interfaces, mac_table, lldp=(), dialect="dialect_b", budget=500.0):
    return SwitchProfile(
        switch_id=switch_id,
        vendor_dialect=dialect,
        model="AccessHub 48G",
        firmware="v1.0.0",
        serial="TEST00000",
        poe_budget_watts=budget,
        interfaces=list(interfaces),
        mac_table=list(mac_table),
        lldp_neighbors=list(lldp),
        collected_at="2026-08-10T00:00:00Z",
    ).validate()


def rand_mac(rng: random.Random, prefix: str = "02:00:00") -> MacAddress:
    tail = ":".join(f"{rng.randrange(256):02x}" for _ in range(3))
    return MacAddress(f"{prefix}:{tail}")


def random_profile(rng: random.Random, switch_id: str = "camp-t-inst-a-sw-blda-flr0") -> SwitchProfile:
    """A structurally valid random access-switch profile with a decidable uplink."""
    n_ports = rng.randint(6, 20)
    interfaces = []
    mac_table = []
    used = set()

    def fresh_mac(prefix):
        while True:
            mac = rand_mac(rng, prefix)
            if mac not in used:
                used.add(mac)
                return mac

    endpoint_count = 0
    for n in range(1, n_ports):
        port = str(n)
        style = rng.random()
        if style < 0.30:  # direct camera
            interfaces.append(mk_iface(port, capable=True, delivering=True, watts=round(rng.uniform(3, 9), 1), cls=2))
            mac_table.append(MacTableEntry(port=port, mac=fresh_mac("00:1a:3f"), vlan=100))
            endpoint_count += 1
        elif style < 0.50:  # cascade
            interfaces.append(mk_iface(port, capable=True, delivering=True, watts=round(rng.uniform(12, 25), 1), cls=4))
            for _ in range(rng.randint(2, 6)):
                mac_table.append(MacTableEntry(port=port, mac=fresh_mac("c0:51:7e"), vlan=100))
                endpoint_count += 1
        elif style < 0.60:  # unknown device, non-PoE
            interfaces.append(mk_iface(port, speed=100, capable=True))
            mac_table.append(MacTableEntry(port=port, mac=fresh_mac("bc:ad:28"), vlan=100))
            endpoint_count += 1
        else:  # empty
            interfaces.append(mk_iface(port, link_up=False, speed=0))

    uplink = str(n_ports)
    interfaces.append(mk_iface(uplink))
    lldp = []
    if rng.random() < 0.8:
        lldp.append(LldpNeighbor(local_port=uplink, neighbor_name="camp-t-core-sw", neighbor_port="49"))
    local_max = max(
        (sum(1 for e in mac_table if e.port == i.port) for i in interfaces), default=0
    )
    for _ in range(local_max + 1 + rng.randint(0, 3)):
        mac_table.append(MacTableEntry(port=uplink, mac=fresh_mac("d0:94:66"), vlan=100))

    return mk_profile(switch_id, interfaces, mac_table, lldp)


def mk_config(**overrides) -> ClassifyConfig:
    cfg = ClassifyConfig(overlay_vlan=100, oui_db=TEST_OUI_DB)
    for key, value in overrides.items():
        setattr(cfg, key, value)
    return cfg


def random_tree(rng: random.Random, switch_idx: int = 0) -> tuple[TopologyNode, list[str]]:
    """Random per-switch topology tree plus the hostnames that can be fed."""
    switch_id = f"camp-t-inst-a-sw-bld{chr(97 + switch_idx)}-flr0"
    root = TopologyNode(id=switch_id, kind="access_switch", label=switch_id, metadata={"campus": "t", "hostname": switch_id})
    hostnames = [switch_id]
    serial = 0
    for f in range(rng.randint(1, 4)):
        key = f"bld{chr(97 + switch_idx)}-flr{f}"
        group = root.add(TopologyNode(id=f"{switch_id}/{key}", kind="floor_group", label=key, metadata={}))
        parents = [group]
        if rng.random() < 0.4:
            mini = group.add(
                TopologyNode(id=f"{switch_id}/{key}/mini-9", kind="mini_switch", label="mini", metadata={"port": "9"})
            )
            parents.append(mini)
        for parent in parents:
            for _ in range(rng.randint(1, 5)):
                serial += 1
                hostname = f"camp-t-inst-a-cam-bld{chr(97 + switch_idx)}-flr{f}-{serial}"
                parent.add(
                    TopologyNode(
                        id=hostname,
                        kind="camera",
                        label=hostname,
                        metadata={"hostname": hostname, "mac": f"02:00:00:00:{switch_idx:02x}:{serial:02x}"},
                    )
                )
                hostnames.append(hostname)
    if rng.random() < 0.5:
        block = root.add(TopologyNode(id=f"{switch_id}/others", kind="quarantine_block", label="others", metadata={}))
        for k in range(rng.randint(1, 3)):
            serial += 1
            mac = f"02:00:00:ff:{switch_idx:02x}:{serial:02x}"
            block.add(
                TopologyNode(
                    id=f"{switch_id}/others/{mac}",
                    kind="unresolved_mac",
                    label=mac,
                    metadata={"mac": mac, "port": str(k), "oui_vendor": "unknown", "parent_switch": switch_id},
                )
            )
    return root.sort(), hostnames


def random_feed(rng: random.Random, hostnames: list[str]) -> dict:
    from body.health import Level

    feed = {}
    for hostname in hostnames:
        u = rng.random()
        if u < 0.10:
            feed[hostname] = Level.RED
        elif u < 0.25:
            feed[hostname] = Level.AMBER
        elif u < 0.70:
            feed[hostname] = Level.GREEN
        # else: absent from feed
    return feed

from __future__ import annotations

import itertools
import json
import random

import pytest

from body.integrity import (
    EVENTS,
    HilCandidate,
    LeaseState,
    LeaseStore,
    LeaseTier,
    append_alerts,
    emit_dhcp_reservations,
    hil_report,
    observe_leases,
    parse_hil_report,
    scan_unregistered,
    step_lease,
)
from body.registry import MacAddress, Registry, TopoMap

from conftest import mk_config, mk_iface, mk_profile

# ---------------------------------------------------------------------------
# Independent lease-machine oracle: a literal transition table, written from
# the rules, not from the implementation. States are (tier, counter, flagged);
# with a promotion threshold of 2 the counter only ever holds 0 or 1.
# ---------------------------------------------------------------------------

_RENEWED = {
    ("H12", 0): ("H12", 1),
    ("H12", 1): ("H24", 0),
    ("H24", 0): ("H24", 1),
    ("H24", 1): ("H48", 0),
    ("H48", 0): ("H48", 1),
    ("H48", 1): ("STABLE", 0),
    ("STABLE", 0): ("STABLE", 0),
    ("STABLE", 1): ("STABLE", 0),
}


def oracle_step(state: tuple[str, int, bool], event: str) -> tuple[str, int, bool]:
    tier, counter, flagged = state
    if event == "registered":
        return ("H12", 0, False)
    if event == "absent":
        return (tier, 0, tier != "STABLE")
    tier, counter = _RENEWED[(tier, counter)]
    return (tier, counter, False)


def _as_tuple(state: LeaseState) -> tuple[str, int, bool]:
    return (state.tier.name, state.consecutive_renewals, state.flagged)


MAC = MacAddress.parse("00:1a:3f:00:00:01")


class TestStepLease:
    def test_second_renewal_promotes(self):
        state = LeaseState(mac=MAC, tier=LeaseTier.H12, consecutive_renewals=1)
        out = step_lease(state, "renewed", now="2026-08-10T00:00:00Z")
        assert out.tier == LeaseTier.H24 and out.consecutive_renewals == 0

    def test_stable_absent_keeps_stable_unflagged(self):
        state = LeaseState(mac=MAC, tier=LeaseTier.STABLE)
        out = step_lease(state, "absent")
        assert out.tier == LeaseTier.STABLE and not out.flagged

    def test_absent_below_stable_flags(self):
        state = LeaseState(mac=MAC, tier=LeaseTier.H24, consecutive_renewals=1)
        out = step_lease(state, "absent")
        assert out.flagged and out.consecutive_renewals == 0 and out.tier == LeaseTier.H24

    def test_registered_resets(self):
        state = LeaseState(mac=MAC, tier=LeaseTier.STABLE, flagged=False)
        out = step_lease(state, "registered", now="2026-08-10T00:00:00Z")
        assert out.tier == LeaseTier.H12 and out.consecutive_renewals == 0

    def test_unknown_event(self):
        with pytest.raises(ValueError):
            step_lease(LeaseState(mac=MAC), "vanished")

    def test_exhaustive_six_step_oracle_equivalence(self):
        for sequence in itertools.product(EVENTS, repeat=6):
            state = LeaseState(mac=MAC)
            oracle = ("H12", 0, False)
            for event in sequence:
                state = step_lease(state, event, now="2026-08-10T00:00:00Z")
                oracle = oracle_step(oracle, event)
                assert _as_tuple(state) == oracle, f"diverged on {sequence} at {event}"

    def test_tier_never_skips(self):
        order = [LeaseTier.H12, LeaseTier.H24, LeaseTier.H48, LeaseTier.STABLE]
        rng = random.Random(3)
        for _ in range(200):
            state = LeaseState(mac=MAC)
            trace = [state.tier]
            for _ in range(12):
                state = step_lease(state, rng.choice(EVENTS), now="2026-08-10T00:00:00Z")
                trace.append(state.tier)
            for prev, cur in zip(trace, trace[1:]):
                assert cur in (prev, LeaseTier.H12) or order.index(cur) == order.index(prev) + 1


class TestLeaseStore:
    def test_round_trip(self, tmp_path):
        store = LeaseStore(tmp_path)
        store.step(MAC, "registered", now="2026-08-10T00:00:00Z")
        store.step(MAC, "renewed", now="2026-08-10T01:00:00Z")
        store.save()
        reloaded = LeaseStore(tmp_path)
        assert _as_tuple(reloaded.states[MAC]) == _as_tuple(store.states[MAC])

    def test_observe_round(self, tmp_path):
        from body.registry import AssetRecord

        other = MacAddress.parse("00:1a:3f:00:00:02")
        registry = Registry(
            [
                AssetRecord(mac=MAC, ip="10.0.0.1", hostname="a", model=None, source="dhcp"),
                AssetRecord(mac=other, ip="10.0.0.2", hostname="b", model=None, source="dhcp"),
            ]
        )
        store = LeaseStore(tmp_path)
        counts = observe_leases(store, registry, visible_macs={MAC}, now="2026-08-10T00:00:00Z")
        assert counts == {"renewed": 1, "absent": 1, "registered": 2}
        assert store.states[MAC].consecutive_renewals == 1
        assert store.states[other].flagged

    def test_emit_dhcp_denies_by_absence(self, tmp_path):
        from body.registry import AssetRecord

        registry = Registry(
            [AssetRecord(mac=MAC, ip="10.0.0.1", hostname="cam-a", model=None, source="dhcp")]
        )
        store = LeaseStore(tmp_path)
        store.step(MAC, "registered", now="x")
        text = emit_dhcp_reservations(registry, store)
        assert f"dhcp-host={MAC},10.0.0.1,cam-a,12h" in text
        assert "00:1a:3f:00:00:99" not in text  # unregistered MAC: no line, no lease

    def test_emit_reflects_tier(self, tmp_path):
        from body.registry import AssetRecord

        registry = Registry(
            [AssetRecord(mac=MAC, ip="10.0.0.1", hostname="cam-a", model=None, source="dhcp")]
        )
        store = LeaseStore(tmp_path)
        store.states[MAC] = LeaseState(mac=MAC, tier=LeaseTier.STABLE)
        assert ",infinite" in emit_dhcp_reservations(registry, store)


def _world_profiles(registry_records, rogue_port="7"):
    """Two small switches, one carrying a rogue MAC on a dedicated port."""
    from body.collection import LldpNeighbor, MacTableEntry

    cam1 = MacAddress.parse("00:1a:3f:00:00:01")
    cam2 = MacAddress.parse("00:1a:3f:00:00:02")
    rogue = MacAddress.parse("c0:51:7e:ff:00:01")
    p1 = mk_profile(
        "camp-t-inst-a-sw-blda-flr0",
        [
            mk_iface("1", capable=True, delivering=True, watts=6.0, cls=2),
            mk_iface(rogue_port, capable=True, delivering=True, watts=5.0, cls=2),
            mk_iface("48"),
        ],
        [
            MacTableEntry(port="1", mac=cam1, vlan=100),
            MacTableEntry(port=rogue_port, mac=rogue, vlan=100),
            MacTableEntry(port="48", mac=MacAddress.parse("d0:94:66:00:00:01"), vlan=100),
            MacTableEntry(port="48", mac=MacAddress.parse("d0:94:66:00:00:02"), vlan=100),
            MacTableEntry(port="48", mac=MacAddress.parse("d0:94:66:00:00:03"), vlan=100),
        ],
        lldp=[LldpNeighbor("48", "camp-t-core-sw", "1")],
    )
    p2 = mk_profile(
        "camp-t-inst-a-sw-bldb-flr0",
        [mk_iface("1", capable=True, delivering=True, watts=6.0, cls=2), mk_iface("48")],
        [
            MacTableEntry(port="1", mac=cam2, vlan=100),
            MacTableEntry(port="48", mac=MacAddress.parse("d0:94:66:00:00:04"), vlan=100),
            MacTableEntry(port="48", mac=MacAddress.parse("d0:94:66:00:00:05"), vlan=100),
        ],
        lldp=[LldpNeighbor("48", "camp-t-core-sw", "1")],
    )
    return [p1, p2], (cam1, cam2, rogue)


class TestScanUnregistered:
    def _registry(self, *macs):
        from body.registry import AssetRecord, parse_hostname

        return Registry(
            [
                AssetRecord(
                    mac=mac,
                    ip=f"10.0.0.{n + 1}",
                    hostname=f"camp-t-inst-a-cam-blda-flr0-{n + 1}",
                    model=None,
                    source="dhcp",
                    parsed=parse_hostname(f"camp-t-inst-a-cam-blda-flr0-{n + 1}"),
                )
                for n, mac in enumerate(macs)
            ]
        )

    def test_all_registered_is_empty(self):
        profiles, (cam1, cam2, rogue) = _world_profiles(None)
        registry = self._registry(cam1, cam2, rogue)
        topo = TopoMap(campuses={}, servers=[])
        assert scan_unregistered(profiles, registry, topo, mk_config()) == []

    def test_injected_rogue_names_its_port(self):
        profiles, (cam1, cam2, rogue) = _world_profiles(None, rogue_port="7")
        registry = self._registry(cam1, cam2)
        topo = TopoMap(campuses={}, servers=[])
        candidates = scan_unregistered(profiles, registry, topo, mk_config())
        assert len(candidates) == 1
        candidate = candidates[0]
        assert candidate.mac == rogue
        assert candidate.port == "7"
        assert candidate.parent_switch == "camp-t-inst-a-sw-blda-flr0"
        assert candidate.reason == "unregistered"
        assert candidate.oui_vendor == "Hikvision"

    def test_corpus_yields_11_candidates(self, uff_state):
        loaded = uff_state["loaded"]
        profiles = [loaded.store.load(sid) for sid in loaded.store.list_ids()]
        candidates = scan_unregistered(profiles, loaded.registry, loaded.topo_map, loaded.config)
        assert len(candidates) == 11
        assert all(c.reason == "unregistered" for c in candidates)  # all OUIs known

    def test_dedup_with_also_seen(self):
        from body.collection import LldpNeighbor, MacTableEntry

        dup = MacAddress.parse("c0:51:7e:ff:00:01")

        def switch(switch_id, bld):
            return mk_profile(
                switch_id,
                [mk_iface("1", capable=True, delivering=True, watts=5.0, cls=2), mk_iface("48")],
                [
                    MacTableEntry(port="1", mac=dup, vlan=100),
                    MacTableEntry(port="48", mac=MacAddress.parse(f"d0:94:66:00:0{bld}:01"), vlan=100),
                    MacTableEntry(port="48", mac=MacAddress.parse(f"d0:94:66:00:0{bld}:02"), vlan=100),
                ],
                lldp=[LldpNeighbor("48", "camp-t-core-sw", "1")],
            )

        profiles = [switch("camp-t-inst-a-sw-bldz-flr0", 1), switch("camp-t-inst-a-sw-blda-flr0", 2)]
        candidates = scan_unregistered(profiles, self._registry(), TopoMap(campuses={}, servers=[]), mk_config())
        assert len(candidates) == 1
        assert candidates[0].parent_switch == "camp-t-inst-a-sw-blda-flr0"  # sorted first wins
        assert candidates[0].also_seen == ("camp-t-inst-a-sw-bldz-flr0/1",)

    def test_ambiguous_uplink_becomes_candidate(self):
        from body.collection import MacTableEntry

        profile = mk_profile(
            "camp-t-inst-a-sw-blda-flr0",
            [mk_iface("1"), mk_iface("2")],
            [
                MacTableEntry(port="1", mac=MacAddress.parse("00:00:00:00:00:01"), vlan=100),
                MacTableEntry(port="2", mac=MacAddress.parse("00:00:00:00:00:02"), vlan=100),
            ],
        )
        candidates = scan_unregistered([profile], self._registry(), TopoMap(campuses={}, servers=[]), mk_config())
        assert len(candidates) == 1
        assert candidates[0].reason == "ambiguous_uplink"
        assert candidates[0].mac is None
        assert candidates[0].port == "1|2"

    def test_floor_hint_from_cascade_siblings(self, uff_state):
        loaded = uff_state["loaded"]
        profiles = [loaded.store.load(sid) for sid in loaded.store.list_ids()]
        candidates = scan_unregistered(profiles, loaded.registry, loaded.topo_map, loaded.config)
        hub_riders = [c for c in candidates if c.floor_hint is not None]
        assert hub_riders, "cascade hub riders should carry a floor hint"


class TestHilReport:
    def _candidates(self):
        return [
            HilCandidate(
                mac=MacAddress.parse("c0:51:7e:ff:00:01"),
                oui_vendor="Hikvision",
                port="7",
                parent_switch="camp-t-inst-a-sw-blda-flr0",
                reason="unregistered",
                floor_hint=2,
            ),
            HilCandidate(
                mac=None,
                oui_vendor="unknown",
                port="1|2",
                parent_switch="camp-t-inst-a-sw-bldb-flr0",
                reason="ambiguous_uplink",
            ),
        ]

    def test_empty_report(self):
        assert "0 candidates" in hil_report([], "text")

    def test_text_report_lists_context(self):
        text = hil_report(self._candidates(), "text")
        assert "2 candidate(s)" in text
        assert "vendor=Hikvision" in text and "port=7" in text and "floor~2" in text

    def test_json_round_trip(self):
        candidates = self._candidates()
        parsed = parse_hil_report(hil_report(candidates, "json"))
        assert parsed == sorted(candidates, key=lambda c: (c.parent_switch, c.port, c.mac.text if c.mac else ""))

    def test_stable_ordering(self):
        candidates = self._candidates()
        assert hil_report(candidates, "json") == hil_report(list(reversed(candidates)), "json")

    def test_corpus_report_has_11_entries(self, uff_state):
        loaded = uff_state["loaded"]
        profiles = [loaded.store.load(sid) for sid in loaded.store.list_ids()]
        candidates = scan_unregistered(profiles, loaded.registry, loaded.topo_map, loaded.config)
        payload = json.loads(hil_report(candidates, "json"))
        assert len(payload["candidates"]) == 11

    def test_alert_log_is_line_delimited_json(self, tmp_path):
        log = tmp_path / "alerts.log"
        append_alerts(self._candidates(), log, now="2026-08-10T00:00:00Z")
        append_alerts(self._candidates()[:1], log, now="2026-08-10T01:00:00Z")
        lines = log.read_text().splitlines()
        assert len(lines) == 3
        for line in lines:
            record = json.loads(line)
            assert set(record) == {"ts", "mac", "reason", "switch", "port"}

from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from body.errors import DuplicateMac, DuplicateSwitch, MalformedLine, MalformedMac, OrphanServer
from body.registry import (
    MacAddress,
    PositionalHostname,
    Registry,
    load_oui_db,
    load_registry,
    load_topo_map,
    lookup_mac,
    parse_hostname,
    extract_floor,
)

TOKEN = st.from_regex(r"[a-z0-9]{1,8}", fullmatch=True)

hostnames = st.builds(
    PositionalHostname,
    campus=TOKEN,
    institute=TOKEN,
    role=st.sampled_from(("sw", "cam", "srv", "nvr")),
    building=TOKEN,
    floor=st.integers(min_value=0, max_value=99),
    index=st.one_of(st.none(), st.integers(min_value=0, max_value=999)),
)


class TestHostnameGrammar:
    def test_reference_switch_name(self):
        parsed = parse_hostname("camp-g-inst-a-sw-bldb-flr0")
        assert parsed == PositionalHostname("g", "a", "sw", "b", 0, None)

    def test_nonconforming_is_a_value(self):
        assert parse_hostname("DESKTOP-7XK2") is None

    def test_indexed_camera_round_trip(self):
        # Derived by rendering the structured form and parsing it back.
        h = PositionalHostname("p", "c", "cam", "q", 3, 17)
        assert h.render() == "camp-p-inst-c-cam-bldq-flr3-17"
        assert parse_hostname(h.render()) == h

    @given(hostnames)
    def test_round_trip(self, h):
        assert parse_hostname(h.render()) == h

    @pytest.mark.parametrize(
        "raw",
        [
            "camp-g-inst-a-sw-bldb-flr01",  # leading zero breaks canonical uniqueness
            "camp-g-inst-a-xx-bldb-flr0",  # unknown role
            "camp-G-inst-a-sw-bldb-flr0",  # uppercase token
            "camp-g-inst-a-sw-bldb",  # missing floor
            "camp-g-inst-a-sw-bldb-flr0-",  # dangling index separator
            "",
        ],
    )
    def test_grammar_mismatches(self, raw):
        assert parse_hostname(raw) is None

    def test_floor_recoverable_without_registry(self):
        assert extract_floor("camp-p-inst-c-cam-bldq-flr3-17") == 3
        assert extract_floor("not-a-name") is None

    def test_floor_key(self):
        assert parse_hostname("camp-g-inst-a-cam-bldb-flr2-4").floor_key == "bldb-flr2"

    def test_custom_pattern(self):
        parsed = parse_hostname(
            "cam.g.a.b.3.17",
            r"^cam\.(?P<campus>[a-z0-9]+)\.(?P<institute>[a-z0-9]+)\.(?P<building>[a-z0-9]+)"
            r"\.(?P<floor>\d+)\.(?P<index>\d+)$",
        )
        # Custom patterns may omit the role group; they still must yield a
        # structured value, so the dataclass defaults are not negotiable.
        assert parsed is None  # no role group -> nonconforming under this pattern


class TestMacAddress:
    @pytest.mark.parametrize(
        "raw",
        ["aa:bb:cc:dd:ee:ff", "AA-BB-CC-DD-EE-FF", "aabb.ccdd.eeff", "aabbccddeeff"],
    )
    def test_parse_accepted_formats(self, raw):
        assert MacAddress.parse(raw).text == "aa:bb:cc:dd:ee:ff"

    @pytest.mark.parametrize("raw", ["zz:bb:cc:dd:ee:ff", "aa:bb:cc:dd:ee", "aabb.ccdd", "", "aa bb cc dd ee ff"])
    def test_malformed(self, raw):
        with pytest.raises(MalformedMac):
            MacAddress.parse(raw)

    def test_round_trip_identity(self):
        mac = MacAddress.parse("aa:bb:cc:dd:ee:ff")
        assert MacAddress.parse(mac.text) == mac

    @given(st.lists(st.binary(min_size=6, max_size=6), min_size=2, max_size=20))
    def test_total_order_is_byte_lexicographic(self, blobs):
        macs = [MacAddress(":".join(f"{b:02x}" for b in blob)) for blob in blobs]
        by_text = sorted(macs)
        by_bytes = sorted(macs, key=lambda m: bytes(int(o, 16) for o in m.text.split(":")))
        assert by_text == by_bytes

    def test_oui_prefix(self):
        assert MacAddress.parse("AABB.CCDD.EEFF").oui == "aa:bb:cc"


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadRegistry:
    def test_empty_sources(self, tmp_path):
        dhcp = _write(tmp_path / "dnsmasq.conf", "")
        export = _write(tmp_path / "assets.csv", "mac,ip,hostname,model\n")
        assert len(load_registry(dhcp, export)) == 0

    def test_single_dhcp_line(self, tmp_path):
        dhcp = _write(
            tmp_path / "dnsmasq.conf",
            "# comment\ndhcp-host=aa:bb:cc:dd:ee:ff,10.1.1.2,camp-g-inst-a-cam-bldb-flr0-1,24h\n",
        )
        export = _write(tmp_path / "assets.csv", "mac,ip,hostname,model\n")
        registry = load_registry(dhcp, export)
        assert len(registry) == 1
        record = registry.lookup(MacAddress.parse("aa:bb:cc:dd:ee:ff"))
        assert record.source == "dhcp"
        assert record.lease == "24h"
        assert not record.nonconforming

    def test_merge_both_sources(self, tmp_path):
        dhcp = _write(
            tmp_path / "d.conf",
            "dhcp-host=aa:bb:cc:dd:ee:01,10.1.1.2,camp-g-inst-a-cam-bldb-flr0-1,infinite\n",
        )
        export = _write(
            tmp_path / "a.csv",
            "mac,ip,hostname,model\nAA-BB-CC-DD-EE-01,10.1.1.2,camp-g-inst-a-cam-bldb-flr0-1,VIP-3230-B\n"
            "aa:bb:cc:dd:ee:02,10.1.1.3,camp-g-inst-a-cam-bldb-flr0-2,VIP-3230-B\n",
        )
        registry = load_registry(dhcp, export)
        assert len(registry) == 2
        merged = registry.lookup(MacAddress.parse("aa:bb:cc:dd:ee:01"))
        assert merged.source == "both"
        assert merged.model == "VIP-3230-B"
        assert merged.lease == "infinite"
        assert registry.lookup(MacAddress.parse("aa:bb:cc:dd:ee:02")).source == "glpi"

    def test_duplicate_mac_within_source_is_hard_error(self, tmp_path):
        dhcp = _write(
            tmp_path / "d.conf",
            "dhcp-host=aa:bb:cc:dd:ee:01,10.1.1.2,x,12h\ndhcp-host=aa:bb:cc:dd:ee:01,10.1.1.3,y,12h\n",
        )
        export = _write(tmp_path / "a.csv", "mac,ip,hostname,model\n")
        with pytest.raises(DuplicateMac):
            load_registry(dhcp, export)

    @pytest.mark.parametrize(
        "line",
        [
            "dhcp-range=10.1.1.0,10.1.1.200",  # not a reservation
            "dhcp-host=aa:bb:cc:dd:ee:ff,10.1.1.2,host",  # missing lease
            "dhcp-host=nope,10.1.1.2,host,12h",  # bad mac
            "dhcp-host=aa:bb:cc:dd:ee:ff,999.1.1.2,host,12h",  # bad ip
            "dhcp-host=aa:bb:cc:dd:ee:ff,10.1.1.2,host,36h",  # bad lease tier
        ],
    )
    def test_malformed_lines(self, tmp_path, line):
        dhcp = _write(tmp_path / "d.conf", line + "\n")
        export = _write(tmp_path / "a.csv", "mac,ip,hostname,model\n")
        with pytest.raises(MalformedLine) as exc:
            load_registry(dhcp, export)
        assert exc.value.line_no == 1

    def test_nonconforming_hostname_retained_and_flagged(self, tmp_path):
        dhcp = _write(tmp_path / "d.conf", "dhcp-host=aa:bb:cc:dd:ee:ff,10.1.1.2,PC-LEGACY,12h\n")
        export = _write(tmp_path / "a.csv", "mac,ip,hostname,model\n")
        registry = load_registry(dhcp, export)
        record = registry.lookup(MacAddress.parse("aa:bb:cc:dd:ee:ff"))
        assert record is not None and record.nonconforming
        assert registry.nonconforming_records == [record]

    def test_conservation_against_line_count(self, uff_fixtures):
        dhcp = uff_fixtures / "registry" / "dnsmasq.conf"
        export = uff_fixtures / "registry" / "assets.csv"
        reservation_lines = [
            line
            for line in dhcp.read_text().splitlines()
            if line.strip() and not line.startswith("#")
        ]
        registry = load_registry(dhcp, export)
        assert len(registry) == len(reservation_lines)

    def test_shipped_corpus_has_541_records(self, uff_fixtures):
        registry = load_registry(
            uff_fixtures / "registry" / "dnsmasq.conf", uff_fixtures / "registry" / "assets.csv"
        )
        assert len(registry) == 541
        assert len({r.mac for r in registry.records}) == 541
        assert registry.nonconforming_records == []


class TestLookup:
    def test_lookup_hits_and_misses(self, tmp_path):
        dhcp = _write(tmp_path / "d.conf", "dhcp-host=aa:bb:cc:dd:ee:ff,10.1.1.2,host-x,12h\n")
        export = _write(tmp_path / "a.csv", "mac,ip,hostname,model\n")
        registry = load_registry(dhcp, export)
        hit = lookup_mac(registry, MacAddress.parse("aa:bb:cc:dd:ee:ff"))
        assert hit is not None and hit.hostname == "host-x"
        assert lookup_mac(registry, MacAddress.parse("00:00:00:00:00:01")) is None

    def test_lookup_after_upstream_normalization(self, tmp_path):
        from body.collection import normalize_mac

        dhcp = _write(tmp_path / "d.conf", "dhcp-host=aa:bb:cc:dd:ee:ff,10.1.1.2,host-x,12h\n")
        export = _write(tmp_path / "a.csv", "mac,ip,hostname,model\n")
        registry = load_registry(dhcp, export)
        assert lookup_mac(registry, normalize_mac("AABB.CCDD.EEFF")) == lookup_mac(
            registry, normalize_mac("aa:bb:cc:dd:ee:ff")
        )

    def test_repeated_lookup_identical(self, tmp_path):
        dhcp = _write(tmp_path / "d.conf", "dhcp-host=aa:bb:cc:dd:ee:ff,10.1.1.2,host-x,12h\n")
        export = _write(tmp_path / "a.csv", "mac,ip,hostname,model\n")
        registry = load_registry(dhcp, export)
        mac = MacAddress.parse("aa:bb:cc:dd:ee:ff")
        assert lookup_mac(registry, mac) is lookup_mac(registry, mac)


class TestTopoMap:
    def test_minimal_forest(self, tmp_path):
        path = _write(
            tmp_path / "topo.yml",
            "campuses:\n  g:\n    dist-1:\n      - acc-1\n      - acc-2\nservers: []\n",
        )
        topo = load_topo_map(path)
        assert topo.switch_ids == ["acc-1", "acc-2", "dist-1"]
        assert topo.tier_of("dist-1") == 1
        assert topo.tier_of("acc-1") == 2
        assert topo.parent_of("acc-2") == "dist-1"
        assert topo.campus_of("acc-1") == "g"

    def test_duplicate_switch(self, tmp_path):
        path = _write(
            tmp_path / "topo.yml",
            "campuses:\n  g:\n    dist-1:\n      - acc-1\n  p:\n    dist-2:\n      - acc-1\nservers: []\n",
        )
        with pytest.raises(DuplicateSwitch):
            load_topo_map(path)

    def test_orphan_server(self, tmp_path):
        path = _write(
            tmp_path / "topo.yml",
            "campuses:\n  g:\n    dist-1: []\nservers:\n  - {id: srv-1, campus: g, parent: nowhere}\n",
        )
        with pytest.raises(OrphanServer):
            load_topo_map(path)

    def test_shipped_map_has_26_switches(self, uff_fixtures):
        topo = load_topo_map(uff_fixtures / "registry" / "topo_map.yml")
        assert len(topo.switch_ids) == 26
        assert len(topo.campuses) == 7  # 5 campuses + 2 auxiliary units


class TestOuiDatabase:
    def test_load_and_lookup(self, tmp_path):
        path = _write(
            tmp_path / "oui.csv",
            "prefix,vendor,device_class\n00:1a:3f,Intelbras,camera\n9c:3d:cf,HP,switch\n",
        )
        db = load_oui_db(path)
        assert len(db) == 2
        entry = db.lookup(MacAddress.parse("00:1a:3f:01:02:03"))
        assert entry.vendor == "Intelbras" and entry.device_class == "camera"
        assert db.lookup(MacAddress.parse("ff:ff:ff:00:00:00")) is None

    def test_duplicate_prefix_rejected(self, tmp_path):
        path = _write(
            tmp_path / "oui.csv",
            "prefix,vendor,device_class\n00:1a:3f,A,camera\n00:1a:3f,B,switch\n",
        )
        with pytest.raises(DuplicateMac):
            load_oui_db(path)

    def test_bad_device_class(self, tmp_path):
        path = _write(tmp_path / "oui.csv", "prefix,vendor,device_class\n00:1a:3f,A,toaster\n")
        with pytest.raises(MalformedLine):
            load_oui_db(path)


def test_registry_rejects_cross_source_conflicts():
    from body.registry import AssetRecord

    mac = MacAddress.parse("aa:bb:cc:dd:ee:ff")
    record = AssetRecord(mac=mac, ip="10.0.0.1", hostname="x", model=None, source="dhcp")
    with pytest.raises(DuplicateMac):
        Registry([record, record])

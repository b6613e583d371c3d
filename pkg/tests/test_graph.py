from __future__ import annotations

import json

from body.canonical import canonical_json
from body.graph import (
    TREE_FILENAME,
    TopologyNode,
    build_server_graph,
    build_switch_tree,
    build_switch_tree_from,
    campus_fill_map,
    export_view,
    load_tree,
    persist_tree,
    tree_dir,
)
from body.health import Level, propagate_colors
from body.registry import TopoMap

from conftest import PINNED_SWITCH


class TestBuildSwitchTree:
    def test_zero_endpoints(self):
        tree = build_switch_tree("camp-g-inst-a-sw-blda-flr0", [], [])
        assert tree.kind == "access_switch"
        assert tree.children == []
        assert tree.metadata["campus"] == "g"

    def test_pinned_fixture_switch_structure(self, uff_state):
        tree = uff_state["trees"][PINNED_SWITCH]
        kinds = {}
        for node in tree.walk():
            kinds.setdefault(node.kind, []).append(node)
        assert len(kinds["floor_group"]) >= 1
        assert len(kinds["mini_switch"]) == 1  # exactly one cascade on this switch
        assert len(kinds["quarantine_block"]) == 1
        assert kinds["quarantine_block"][0].label == "others"
        cameras = kinds["camera"]
        assert len(cameras) == 35
        # Every camera leaf carries the tooltip identity fields.
        for camera in cameras:
            assert {"mac", "ip", "port", "hostname"} <= set(camera.metadata)

    def test_tree_invariants_over_corpus(self, uff_state):
        allowed_floor_children = {"camera", "mini_switch", "unresolved_mac"}
        for tree in uff_state["trees"].values():
            ids = [n.id for n in tree.walk()]
            assert len(ids) == len(set(ids)), "node appears twice"
            for node in tree.walk():
                if node.kind == "floor_group":
                    assert {c.kind for c in node.children} <= allowed_floor_children
                if node.kind == "quarantine_block":
                    assert {c.kind for c in node.children} == {"unresolved_mac"}
                if node.kind == "unresolved_mac":
                    assert {"port", "oui_vendor", "parent_switch"} <= set(node.metadata)
                    assert node.metadata["oui_vendor"]
                # Children are sorted canonically.
                keys = [(c.kind, c.id) for c in node.children]
                from body.graph import _KIND_ORDER

                assert keys == sorted(keys, key=lambda t: (_KIND_ORDER[t[0]], t[1]))

    def test_hil_exposure_complete(self, uff_state):
        # Every *_HIL resolution surfaces as exactly one unresolved_mac node.
        for switch_id, result in uff_state["results"].items():
            tree = uff_state["trees"][switch_id]
            quarantined = [n for n in tree.walk() if n.kind == "unresolved_mac"]
            hil_macs = sorted(r.mac.text for r in result.hil_resolutions)
            assert sorted(n.metadata["mac"] for n in quarantined) == hil_macs

    def test_same_floor_two_blocks(self, uff_state):
        # The shared-building pair: one physical floor served by two switches
        # produces two independent floor groups, one per switch tree.
        labels = {}
        for switch_id, tree in uff_state["trees"].items():
            for node in tree.walk():
                if node.kind == "floor_group":
                    labels.setdefault(node.label, set()).add(switch_id)
        shared = {label: switches for label, switches in labels.items() if len(switches) > 1}
        assert shared, "corpus should contain at least one floor served by two switches"

    def test_resolved_nonconforming_goes_to_quarantine(self):
        from body.classify import classify_switch
        from body.registry import AssetRecord, MacAddress, Registry, TopoMap, parse_hostname
        from conftest import mk_config, mk_iface, mk_profile
        from body.collection import LldpNeighbor, MacTableEntry

        mac = MacAddress.parse("00:1a:3f:00:00:77")
        registry = Registry(
            [
                AssetRecord(
                    mac=mac, ip="10.0.0.5", hostname="LEGACY-CAM-7", model=None, source="dhcp",
                    parsed=parse_hostname("LEGACY-CAM-7"),
                )
            ]
        )
        profile = mk_profile(
            "camp-g-inst-a-sw-blda-flr0",
            [mk_iface("1", capable=True, delivering=True, watts=6.0, cls=2), mk_iface("28")],
            [MacTableEntry(port="1", mac=mac, vlan=100)],
            lldp=[LldpNeighbor("28", "camp-g-core-sw", "1")],
        )
        result = classify_switch(profile, registry, TopoMap(campuses={}, servers=[]), mk_config())
        assert result.resolutions[0].status.is_resolved
        tree = build_switch_tree_from(result)
        quarantined = [n for n in tree.walk() if n.kind == "unresolved_mac"]
        assert len(quarantined) == 1
        assert quarantined[0].metadata["hostname"] == "LEGACY-CAM-7"
        assert not any(n.kind == "floor_group" for n in tree.walk())


class TestServerGraph:
    def test_single_chain(self):
        topo = TopoMap(
            campuses={"g": {"dist-1": ["acc-1"]}},
            servers=[{"id": "srv-1", "campus": "g", "parent": "dist-1"}],
        )
        tree = build_server_graph(topo, {"srv-1": {"stream_count": 12}})
        kinds = [n.kind for n in tree.walk()]
        assert kinds == ["core", "campus", "distribution_switch", "access_switch", "server"]
        server = tree.find("srv-1")
        assert server.metadata["stream_count"] == 12

    def test_corpus_server_graph(self, uff_state):
        tree = uff_state["server_tree"]
        campus_nodes = [n for n in tree.walk() if n.kind == "campus"]
        servers = [n for n in tree.walk() if n.kind == "server"]
        assert len(campus_nodes) >= 5
        assert len(servers) == 30
        assert sum(n.metadata["stream_count"] for n in servers) == 530


class TestPersistTree:
    def test_idempotent_and_canonical(self, uff_state, tmp_path):
        tree = uff_state["trees"][PINNED_SWITCH]
        first = persist_tree(tree, tmp_path)
        assert first, "first persist writes files"
        second = persist_tree(tree, tmp_path)
        assert second == []  # zero bytes written on re-run

    def test_tree_json_round_trip(self, uff_state, tmp_path):
        tree = uff_state["trees"][PINNED_SWITCH]
        persist_tree(tree, tmp_path)
        loaded = load_tree(tree_dir(tree, tmp_path))
        assert loaded.to_dict() == tree.to_dict()

    def test_directory_mirrors_internal_nodes(self, uff_state, tmp_path):
        tree = uff_state["trees"][PINNED_SWITCH]
        persist_tree(tree, tmp_path)
        base = tree_dir(tree, tmp_path)
        floor_dirs = [p.name for p in base.iterdir() if p.is_dir()]
        floor_labels = [n.label for n in tree.children if n.children]
        assert sorted(floor_dirs) == sorted(floor_labels)

    def test_prune_removes_stale_leaves(self, uff_state, tmp_path):
        tree = uff_state["trees"][PINNED_SWITCH]
        persist_tree(tree, tmp_path)
        base = tree_dir(tree, tmp_path)
        before = {p for p in base.rglob("*.json")}
        pruned = TopologyNode.from_dict(tree.to_dict())
        removed_group = pruned.children[0]
        pruned.children = pruned.children[1:]
        persist_tree(pruned, tmp_path)
        after = {p for p in base.rglob("*.json")}
        assert after < before
        assert not (base / removed_group.label).exists()

    def test_corpus_tree_count(self, uff_state, tmp_path):
        for tree in uff_state["trees"].values():
            persist_tree(tree, tmp_path)
        tree_files = list((tmp_path / "topology").rglob(TREE_FILENAME))
        assert len(tree_files) == 26


class TestExportView:
    def test_empty_tree(self):
        root = TopologyNode(id="sw", kind="access_switch", label="sw", metadata={})
        view = export_view(root)
        assert len(view["nodes"]) == 1 and view["edges"] == []

    def test_tree_edge_law(self, uff_state):
        for tree in uff_state["trees"].values():
            view = export_view(tree)
            assert len(view["edges"]) == len(view["nodes"]) - 1

    def test_unresolved_tooltips(self, uff_state):
        tree = uff_state["trees"][PINNED_SWITCH]
        view = export_view(tree)
        unresolved = [n for n in view["nodes"] if n["kind"] == "unresolved_mac"]
        assert unresolved
        for node in unresolved:
            assert node["tooltip"]["oui_vendor"]
            assert node["tooltip"]["parent_switch"] == PINNED_SWITCH

    def test_srv_fill_is_campus_palette(self, uff_state):
        tree = uff_state["server_tree"]
        fills = campus_fill_map(uff_state["loaded"].topo_map.campuses.keys())
        view = export_view(tree, view="srv", campus_fills=fills)
        by_id = {n["id"]: n for n in view["nodes"]}
        for campus, fill in fills.items():
            assert by_id[f"campus-{campus}"]["fill"] == fill

    def test_recoloring_preserves_structure(self, uff_state):
        tree = uff_state["trees"][PINNED_SWITCH]
        plain = export_view(tree)
        camera = next(n for n in tree.walk() if n.kind == "camera")
        colored = propagate_colors(tree, {camera.metadata["hostname"]: Level.RED})
        red = export_view(tree, colored)
        strip = lambda view: [
            {k: v for k, v in node.items() if k in ("id", "kind", "label")} for node in view["nodes"]
        ]
        assert strip(plain) == strip(red)
        assert plain["edges"] == red["edges"]
        assert plain != red  # colors did change

    def test_view_json_is_canonicalizable(self, uff_state):
        view = export_view(uff_state["server_tree"], view="srv")
        payload = canonical_json(view)
        assert json.loads(payload) == view

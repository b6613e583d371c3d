from __future__ import annotations

import pytest

from body.errors import SwitchSetMismatch
from body.graph import TopologyNode
from body.simulate import (
    CampusSpec,
    diff_topology,
    generate_campus,
    uff_like_spec,
    write_corpus,
)

from conftest import run_world, small_spec


class TestDeterminism:
    def test_same_seed_byte_identical(self):
        a = generate_campus(small_spec(seed=101, unregistered_fraction=0.05))
        b = generate_campus(small_spec(seed=101, unregistered_fraction=0.05))
        assert a.files == b.files
        assert a.switch_files == b.switch_files

    def test_different_seed_differs(self):
        a = generate_campus(small_spec(seed=101))
        b = generate_campus(small_spec(seed=102))
        assert a.files != b.files

    def test_write_corpus_idempotent(self, tmp_path):
        world = generate_campus(small_spec(seed=103))
        first = write_corpus(world, tmp_path)
        assert first
        assert write_corpus(world, tmp_path) == []

    def test_shipped_corpus_matches_generator(self, uff_fixtures, tmp_path):
        # Regenerating from the embedded plan must reproduce the committed
        # corpus byte for byte; this guards fixture drift.
        world = generate_campus(uff_like_spec())
        write_corpus(world, tmp_path)
        ours = {p.relative_to(tmp_path) for p in tmp_path.rglob("*") if p.is_file()}
        shipped = {p.relative_to(uff_fixtures) for p in uff_fixtures.rglob("*") if p.is_file()}
        assert ours == shipped
        for rel in sorted(ours):
            assert (tmp_path / rel).read_bytes() == (uff_fixtures / rel).read_bytes(), rel

    def test_spec_round_trip(self, tmp_path):
        spec = uff_like_spec()
        path = tmp_path / "spec.yml"
        import yaml

        path.write_text(yaml.safe_dump(spec.to_dict(), sort_keys=True))
        assert CampusSpec.load(path).to_dict() == spec.to_dict()


class TestGeneratedWorlds:
    def test_zero_unregistered_fraction(self):
        world = generate_campus(small_spec(seed=104, unregistered_fraction=0.0))
        assert world.truth.unregistered_visible == []
        assert all(e.registered for e in world.truth.endpoints)

    def test_conforming_hostnames_and_parseable_transcripts(self):
        from body.registry import parse_hostname

        world = generate_campus(small_spec(seed=105, unregistered_fraction=0.08))
        for endpoint in world.truth.registered_visible:
            assert parse_hostname(endpoint.hostname) is not None
        for endpoint in world.truth.unregistered_visible:
            assert endpoint.hostname is None

    def test_uff_marginals(self):
        world = generate_campus(uff_like_spec())
        truth = world.truth
        assert len(truth.switches) == 26
        assert len(truth.endpoints) == 541
        assert len(truth.registered_visible) == 530
        assert len(truth.unregistered_visible) == 11
        assert len(truth.absent_registered) == 11
        cascade = sum(1 for e in truth.registered_visible if e.behind_cascade)
        assert cascade == 339 and len(truth.registered_visible) - cascade == 191
        assert len(truth.servers) == 30
        campuses = {meta["campus"] for meta in truth.switches.values()}
        assert len(campuses) == 7

    def test_registry_size_is_541(self):
        world = generate_campus(uff_like_spec())
        reservations = [
            line
            for line in world.files["registry/dnsmasq.conf"].splitlines()
            if line.startswith("dhcp-host=")
        ]
        assert len(reservations) == 541


class TestDiffTopology:
    def test_pipeline_reconstructs_truth(self, tmp_path):
        world = generate_campus(small_spec(seed=106, unregistered_fraction=0.06))
        run = run_world(world, tmp_path)
        diff = diff_topology(run["trees"], world.truth)
        assert diff.accuracy_on_registered == 1.0
        assert diff.mismatches == []

    def test_single_perturbation_single_mismatch(self, tmp_path):
        world = generate_campus(small_spec(seed=107))
        run = run_world(world, tmp_path)
        trees = run["trees"]
        # Move one camera leaf into a different floor group of its own tree.
        victim_tree = None
        for tree in trees.values():
            groups = [n for n in tree.children if n.kind == "floor_group"]
            if len(groups) >= 2 and any(c.kind == "camera" for c in groups[0].children):
                victim_tree = tree
                break
        assert victim_tree is not None, "need a tree with two floor groups"
        mutated = TopologyNode.from_dict(victim_tree.to_dict())
        groups = [n for n in mutated.children if n.kind == "floor_group"]
        camera = next(c for c in groups[0].children if c.kind == "camera")
        groups[0].children.remove(camera)
        groups[1].children.append(camera)
        trees = dict(trees)
        trees[mutated.id] = mutated
        diff = diff_topology(trees, world.truth)
        assert len(diff.mismatches) == 1
        assert diff.mismatches[0]["mac"] == camera.metadata["mac"]
        assert diff.correct == diff.registered_total - 1

    def test_switch_set_mismatch(self, tmp_path):
        world = generate_campus(small_spec(seed=108))
        run = run_world(world, tmp_path)
        trees = dict(run["trees"])
        trees.pop(sorted(trees)[0])
        with pytest.raises(SwitchSetMismatch):
            diff_topology(trees, world.truth)

    def test_visible_denominator(self, tmp_path):
        world = generate_campus(small_spec(seed=109, unregistered_fraction=0.1))
        run = run_world(world, tmp_path)
        diff = diff_topology(run["trees"], world.truth)
        visible = len(world.truth.endpoints)
        registered = len(world.truth.registered_visible)
        assert diff.accuracy_on_visible == pytest.approx(registered / visible)
        assert diff.accuracy_on_registered == 1.0

    def test_unregistered_conservation(self, tmp_path):
        from body.integrity import scan_unregistered

        world = generate_campus(small_spec(seed=110, unregistered_fraction=0.1))
        run = run_world(world, tmp_path)
        loaded = run["loaded"]
        profiles = [loaded.store.load(sid) for sid in loaded.store.list_ids()]
        candidates = scan_unregistered(profiles, loaded.registry, loaded.topo_map, loaded.config)
        reported = {c.mac.text for c in candidates if c.mac}
        injected = {e.mac for e in world.truth.unregistered_visible}
        assert injected == reported

"""Operator command surface: the `body` CLI and the pipeline it drives.

Stages are pure functions over the state directory: `collect` materializes
profiles from a transport, everything after that (classify, build, color,
export, report) reads only `state/`, which is what makes the whole topology
rebuildable offline and byte-identical across runs. Classification is cheap
at fleet scale, so derived stages recompute it from profiles instead of
persisting intermediate results.

Exit codes: 0 ok, 1 hard error, 2 bad configuration. HIL candidates are a
normal outcome, not an error.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
import urllib.request
from dataclasses import dataclass
from pathlib import Path

from .canonical import canonical_json, load_json, write_text_if_changed
from .classify import (
    ClassifyConfig,
    ResolutionStatus,
    SwitchClassification,
    classify_switch,
    identify_uplink,
)
from .collection import (
    ProfileStore,
    ReplayTransport,
    SwitchProfile,
    assemble_profile,
    parse_cli_bundle,
    utc_now_iso,
)
from .dialects import SECTIONS, get_dialect
from .errors import AmbiguousUplink, BodyError, ConfigError
from .graph import (
    TREE_FILENAME,
    build_server_graph,
    build_switch_tree_from,
    campus_fill_map,
    export_view,
    persist_tree,
    TopologyNode,
)
from .health import Level, parse_verdict_feed, propagate_colors
from .integrity import (
    ALERT_LOG_FILENAME,
    LeaseStore,
    append_alerts,
    emit_dhcp_reservations,
    hil_report,
    observe_leases,
    scan_unregistered,
)
from .registry import Registry, TopoMap, load_registry, load_topo_map
from . import simulate as sim

logger = logging.getLogger(__name__)

REGISTRY_DIRNAME = "registry"
CONFIG_FILENAME = "classify_config.yml"
FEED_FILENAME = "feeds/verdicts.json"
VIEWS_DIRNAME = "views"
REPORTS_DIRNAME = "reports"
ONBOARD_SIDECAR = "onboard.json"

_REGISTRY_FILES = ("dnsmasq.conf", "assets.csv", "topo_map.yml", "oui.csv", "wattage_profiles.csv")


@dataclass
class StatePaths:
    root: Path

    @property
    def registry_dir(self) -> Path:
        return self.root / REGISTRY_DIRNAME

    @property
    def config_path(self) -> Path:
        return self.root / CONFIG_FILENAME

    @property
    def feed_path(self) -> Path:
        return self.root / FEED_FILENAME

    @property
    def views_dir(self) -> Path:
        return self.root / VIEWS_DIRNAME

    @property
    def reports_dir(self) -> Path:
        return self.root / REPORTS_DIRNAME


@dataclass
class LoadedState:
    paths: StatePaths
    registry: Registry
    topo_map: TopoMap
    config: ClassifyConfig
    store: ProfileStore


def import_fixture_inputs(
    fixtures_dir: Path, state: StatePaths, config_override: Path | None = None
) -> None:
    """Copy the canonical input files from a corpus into the state store.

    After this, no stage needs the fixtures directory again: `state/` holds
    everything required to rebuild the topology offline. A config override
    replaces the corpus' classify config; table paths inside it are resolved
    relative to the config's resting place in the state dir, so they must be
    absolute or match the `registry/...` layout.
    """
    fixtures_dir = Path(fixtures_dir)
    src_registry = fixtures_dir / REGISTRY_DIRNAME
    if not src_registry.is_dir():
        raise ConfigError(f"fixtures corpus has no registry/ directory: {fixtures_dir}")
    for name in _REGISTRY_FILES:
        src = src_registry / name
        if src.is_file():
            write_text_if_changed(state.registry_dir / name, src.read_text(encoding="utf-8"))
    config_src = Path(config_override) if config_override else fixtures_dir / CONFIG_FILENAME
    if config_override and not config_src.is_file():
        raise ConfigError(f"classify config not found: {config_src}")
    if config_src.is_file():
        write_text_if_changed(state.config_path, config_src.read_text(encoding="utf-8"))
        try:
            ClassifyConfig.load(state.config_path)
        except OSError as exc:
            raise ConfigError(f"classify config references unreadable tables: {exc}") from None
    verdicts_src = fixtures_dir / "verdicts.json"
    if verdicts_src.is_file():
        write_text_if_changed(state.feed_path, verdicts_src.read_text(encoding="utf-8"))


def load_state(state_dir: Path, config_path: Path | None = None) -> LoadedState:
    paths = StatePaths(Path(state_dir))
    dhcp = paths.registry_dir / "dnsmasq.conf"
    export = paths.registry_dir / "assets.csv"
    topo = paths.registry_dir / "topo_map.yml"
    for required in (dhcp, export, topo):
        if not required.is_file():
            raise ConfigError(f"state dir not initialized, missing {required}")
    if config_path is not None:
        if not Path(config_path).is_file():
            raise ConfigError(f"classify config not found: {config_path}")
        config = ClassifyConfig.load(Path(config_path))
    elif paths.config_path.is_file():
        config = ClassifyConfig.load(paths.config_path)
    else:
        config = ClassifyConfig()
    registry = load_registry(dhcp, export, config.hostname_pattern)
    topo_map = load_topo_map(topo)
    return LoadedState(
        paths=paths,
        registry=registry,
        topo_map=topo_map,
        config=config,
        store=ProfileStore(paths.root),
    )


def collect_switches(
    state: StatePaths, fixtures_dir: Path, only_switch: str | None = None
) -> list[str]:
    transport = ReplayTransport(Path(fixtures_dir))
    store = ProfileStore(state.root)
    switch_ids = [only_switch] if only_switch else transport.list_switches()
    if not switch_ids:
        raise ConfigError(f"no switch fixtures under {fixtures_dir}")
    collected = []
    for switch_id in sorted(switch_ids):
        profile, skipped = assemble_profile(switch_id, None, transport, store)
        collected.append(profile.switch_id)
        for skip in skipped:
            print(f"  warn {switch_id}: {skip.section} line {skip.line_no}: {skip.reason}")
    return collected


def _operator_uplink(store: ProfileStore, switch_id: str) -> str | None:
    sidecar = store.path(switch_id).parent / ONBOARD_SIDECAR
    if sidecar.is_file():
        return load_json(sidecar).get("confirmed_uplink")
    return None


def classify_all(
    loaded: LoadedState, only_switch: str | None = None
) -> dict[str, SwitchClassification]:
    ids = [only_switch] if only_switch else loaded.store.list_ids()
    results: dict[str, SwitchClassification] = {}
    for switch_id in sorted(ids):
        profile = loaded.store.load(switch_id)
        results[switch_id] = classify_switch(
            profile,
            loaded.registry,
            loaded.topo_map,
            loaded.config,
            operator_uplink=_operator_uplink(loaded.store, switch_id),
        )
    return results


def build_trees(
    loaded: LoadedState, results: dict[str, SwitchClassification]
) -> dict[str, TopologyNode]:
    trees: dict[str, TopologyNode] = {}
    for switch_id, result in sorted(results.items()):
        campus = loaded.topo_map.campus_of(switch_id)
        trees[switch_id] = build_switch_tree_from(
            result, campus=campus, hostname_pattern=loaded.config.hostname_pattern
        )
        persist_tree(trees[switch_id], loaded.paths.root)
    return trees


def _server_stream_counts(
    loaded: LoadedState, results: dict[str, SwitchClassification]
) -> dict[str, dict]:
    """Per-server metadata: campus camera totals split round-robin.

    The production source for stream counts is the VMS; offline, the resolved
    camera population of a campus distributed across its servers is the
    deterministic stand-in.
    """
    per_campus: dict[str, int] = {}
    for result in results.values():
        campus = loaded.topo_map.campus_of(result.switch_id) or "unknown"
        cameras = sum(
            1
            for r in result.resolved
            if r.identity is not None and (r.identity.parsed is None or r.identity.parsed.role in ("cam", "nvr"))
        )
        per_campus[campus] = per_campus.get(campus, 0) + cameras

    metadata: dict[str, dict] = {}
    by_campus: dict[str, list[str]] = {}
    for server in loaded.topo_map.servers:
        by_campus.setdefault(server["campus"], []).append(server["id"])
    for campus, server_ids in sorted(by_campus.items()):
        server_ids.sort()
        total = per_campus.get(campus, 0)
        base, extra = divmod(total, len(server_ids))
        for n, server_id in enumerate(server_ids):
            metadata[server_id] = {"stream_count": base + (1 if n < extra else 0)}
    return metadata


def build_server_tree(
    loaded: LoadedState, results: dict[str, SwitchClassification]
) -> TopologyNode:
    server_tree = build_server_graph(loaded.topo_map, _server_stream_counts(loaded, results))
    persist_tree(server_tree, loaded.paths.root)
    return server_tree


def load_built_trees(state: StatePaths) -> tuple[TopologyNode | None, dict[str, TopologyNode]]:
    from .graph import TOPOLOGY_DIRNAME, SERVER_GRAPH_DIRNAME, load_tree

    base = state.root / TOPOLOGY_DIRNAME
    server_tree = None
    if (base / SERVER_GRAPH_DIRNAME / TREE_FILENAME).is_file():
        server_tree = load_tree(base / SERVER_GRAPH_DIRNAME)
    trees: dict[str, TopologyNode] = {}
    for tree_file in sorted(base.glob(f"*/*/{TREE_FILENAME}")):
        if tree_file.parent.parent.name == SERVER_GRAPH_DIRNAME:
            continue
        tree = load_tree(tree_file.parent)
        trees[tree.id] = tree
    return server_tree, trees


def fetch_feed(source: str | Path) -> dict[str, Level]:
    text = str(source)
    if text.startswith("http://") or text.startswith("https://"):
        with urllib.request.urlopen(text, timeout=10) as response:
            return parse_verdict_feed(response.read())
    return parse_verdict_feed(Path(source))


def color_and_export(
    state: StatePaths,
    topo_map: TopoMap,
    verdicts: dict[str, Level],
    server_tree: TopologyNode | None,
    trees: dict[str, TopologyNode],
) -> tuple[list[Path], list[str]]:
    """Project verdicts onto every tree and write the view exports.

    Returns the written paths plus feed hostnames that matched no node in any
    tree: those are stale monitoring entries worth surfacing, not dropping.
    """
    fills = campus_fill_map(topo_map.campuses.keys())
    written = []
    level_names = {Level.GREEN: "OK", Level.AMBER: "WARNING", Level.RED: "CRITICAL"}
    feed_payload = {host: level_names[level] for host, level in sorted(verdicts.items())}
    if write_text_if_changed(state.feed_path, canonical_json(feed_payload)):
        written.append(state.feed_path)

    unknown = set(verdicts)
    manifest = []
    if server_tree is not None:
        colored = propagate_colors(server_tree, verdicts)
        unknown &= set(colored.unmatched)
        view = export_view(server_tree, colored, view="srv", campus_fills=fills)
        path = state.views_dir / "view_srv.json"
        manifest.append({"id": "srv", "file": path.name, "label": "servers & infrastructure"})
        if write_text_if_changed(path, canonical_json(view)):
            written.append(path)
    for switch_id, tree in sorted(trees.items()):
        colored = propagate_colors(tree, verdicts)
        unknown &= set(colored.unmatched)
        view = export_view(tree, colored, view="sw", campus_fills=fills)
        path = state.views_dir / f"view_sw_{switch_id}.json"
        manifest.append({"id": f"sw:{switch_id}", "file": path.name, "label": switch_id})
        if write_text_if_changed(path, canonical_json(view)):
            written.append(path)
    index_path = state.views_dir / "index.json"
    if write_text_if_changed(index_path, canonical_json({"views": manifest})):
        written.append(index_path)
    return written, sorted(unknown)


# ---------------------------------------------------------------------------
# Resolution report (the per-campus table)
# ---------------------------------------------------------------------------


def _truncate_pct(numerator: int, denominator: int) -> float:
    if denominator == 0:
        return 0.0
    return int(numerator / denominator * 10000) / 100


def _campus_label(campus_id: str) -> str:
    if campus_id.startswith("aux"):
        return f"Auxiliary {campus_id.upper()}"
    return f"Campus {campus_id.upper()}"


def resolution_report(
    loaded: LoadedState, results: dict[str, SwitchClassification]
) -> dict:
    """Aggregate the per-campus registered/resolved table plus class counts."""
    registered: dict[str, int] = {}
    for record in loaded.registry.records:
        campus = record.parsed.campus if record.parsed else "nonconforming"
        registered[campus] = registered.get(campus, 0) + 1

    seen_macs: set[str] = set()
    resolved: dict[str, int] = {}
    classes = {status.value: 0 for status in ResolutionStatus}
    ambiguous = []
    for switch_id, result in sorted(results.items()):
        if result.needs_uplink_hil:
            ambiguous.append(switch_id)
            continue
        for resolution in result.resolutions:
            if resolution.mac.text in seen_macs:
                continue
            seen_macs.add(resolution.mac.text)
            classes[resolution.status.value] += 1
            if resolution.status.is_resolved and resolution.identity is not None:
                parsed = resolution.identity.parsed
                campus = parsed.campus if parsed else "nonconforming"
                resolved[campus] = resolved.get(campus, 0) + 1

    campuses = []
    ordered = sorted(set(registered) | set(resolved), key=lambda c: (c.startswith("aux"), c))
    for campus in ordered:
        reg = registered.get(campus, 0)
        res = resolved.get(campus, 0)
        if reg == 0 and res == 0:
            continue
        campuses.append(
            {
                "id": campus,
                "label": _campus_label(campus),
                "registered": reg,
                "resolved": res,
                "accuracy_pct": _truncate_pct(res, reg) if reg else 0.0,
            }
        )
    total_registered = sum(c["registered"] for c in campuses)
    total_resolved = sum(c["resolved"] for c in campuses)
    return {
        "campuses": campuses,
        "totals": {
            "registered": total_registered,
            "resolved": total_resolved,
            "accuracy_pct": _truncate_pct(total_resolved, total_registered),
        },
        "classes": {
            "resolved_direct_poe": classes[ResolutionStatus.RESOLVED_DIRECT_POE.value],
            "resolved_not_poe": classes[ResolutionStatus.RESOLVED_NOT_POE.value],
            "unregistered_hil": classes[ResolutionStatus.UNREGISTERED_HIL.value],
            "unknown_hil": classes[ResolutionStatus.UNKNOWN_HIL.value],
            "visible_macs": len(seen_macs),
        },
        "ambiguous_uplink_switches": ambiguous,
    }


def render_report_text(report: dict) -> str:
    lines = [
        f"{'Campus Unit':<22}{'Registered':>11}{'Resolved':>10}{'Accuracy':>10}",
        "-" * 53,
    ]
    for campus in report["campuses"]:
        lines.append(
            f"{campus['label']:<22}{campus['registered']:>11}{campus['resolved']:>10}"
            f"{campus['accuracy_pct']:>9.2f}%"
        )
    totals = report["totals"]
    lines.append("-" * 53)
    lines.append(
        f"{'Total Ecosystem':<22}{totals['registered']:>11}{totals['resolved']:>10}"
        f"{totals['accuracy_pct']:>9.2f}%"
    )
    classes = report["classes"]
    lines.extend(
        [
            "",
            "Endpoint resolution:",
            f"  Resolved, direct PoE        {classes['resolved_direct_poe']:>6}",
            f"  Resolved, not PoE           {classes['resolved_not_poe']:>6}",
            f"  Unregistered devices (HIL)  {classes['unregistered_hil']:>6}",
            f"  Unknown devices (HIL)       {classes['unknown_hil']:>6}",
            f"  Total visible MACs          {classes['visible_macs']:>6}",
        ]
    )
    if report["ambiguous_uplink_switches"]:
        lines.append("")
        lines.append("Switches awaiting uplink confirmation (HIL):")
        for switch_id in report["ambiguous_uplink_switches"]:
            lines.append(f"  {switch_id}")
    return "\n".join(lines) + "\n"


def write_report(state: StatePaths, report: dict) -> None:
    write_text_if_changed(state.reports_dir / "resolution.json", canonical_json(report))
    write_text_if_changed(state.reports_dir / "resolution.txt", render_report_text(report))


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_simulate(args) -> int:
    spec = sim.uff_like_spec() if args.spec == "uff-like" else sim.CampusSpec.load(Path(args.spec))
    if args.seed is not None:
        spec.seed = args.seed
    world = sim.generate_campus(spec)
    written = sim.write_corpus(world, Path(args.out))
    endpoints = len(world.truth.endpoints)
    print(
        f"corpus {spec.name!r} (seed {spec.seed}): {len(world.switch_files)} switches, "
        f"{endpoints} visible endpoint MACs, {len(written)} file(s) written to {args.out}"
    )
    return 0


def cmd_collect(args) -> int:
    state = StatePaths(Path(args.state_dir))
    import_fixture_inputs(Path(args.fixtures), state, config_override=args.config)
    collected = collect_switches(state, Path(args.fixtures), args.switch)
    print(f"collected {len(collected)} switch profile(s) into {state.root}")
    return 0


def cmd_onboard(args) -> int:
    state = StatePaths(Path(args.state_dir))
    import_fixture_inputs(Path(args.fixtures), state, config_override=args.config)
    loaded = load_state(state.root)
    transport = ReplayTransport(Path(args.fixtures))

    hardware = transport.describe(args.switch)
    dialect = get_dialect(hardware.dialect)
    transport.open(args.switch)
    raw = {section: transport.run(dialect.commands[section]) for section in SECTIONS}
    bundle = parse_cli_bundle(dialect, raw)
    profile = SwitchProfile(
        switch_id=args.switch,
        vendor_dialect=dialect.name,
        model=hardware.model,
        firmware=hardware.firmware,
        serial=hardware.serial,
        poe_budget_watts=hardware.poe_budget_watts,
        interfaces=bundle.interfaces,
        mac_table=bundle.mac_table,
        lldp_neighbors=bundle.lldp_neighbors,
        collected_at=utc_now_iso(),
    ).validate()

    try:
        uplink, evidence = identify_uplink(profile, loaded.config, loaded.topo_map)
        print(f"inferred uplink for {args.switch}: port {uplink} (evidence: {', '.join(evidence)})")
        if args.yes:
            if evidence != ("lldp_name",):
                raise ConfigError("--yes requires lldp_name uplink evidence; confirm interactively")
            confirmed = uplink
        else:
            answer = input(f"confirm uplink port {uplink}? [y/N] ").strip().lower()
            if answer not in ("y", "yes"):
                print("onboarding aborted; profile not committed")
                return 1
            confirmed = uplink
    except AmbiguousUplink as exc:
        if args.yes:
            raise ConfigError("--yes is invalid: uplink is ambiguous, confirm interactively") from None
        print(f"uplink ambiguous on {args.switch}: candidates {', '.join(exc.ports) or 'none'}")
        confirmed = input("enter uplink port to commit (empty aborts): ").strip()
        if not confirmed:
            print("onboarding aborted; profile not committed")
            return 1
        if profile.interface(confirmed) is None:
            raise ConfigError(f"no such port on {args.switch}: {confirmed}") from None

    loaded.store.store(profile)
    sidecar = loaded.store.path(args.switch).parent / ONBOARD_SIDECAR
    write_text_if_changed(
        sidecar,
        canonical_json(
            {"confirmed_uplink": confirmed, "confirmed_at": utc_now_iso(), "switch_id": args.switch}
        ),
    )
    print(f"onboarded {args.switch}: uplink {confirmed} committed")
    return 0


def cmd_build(args) -> int:
    loaded = load_state(Path(args.state_dir), args.config)
    results = classify_all(loaded, args.switch)
    trees = build_trees(loaded, results)
    if not args.switch:
        build_server_tree(loaded, results)
    print(f"built {len(trees)} switch tree(s)" + ("" if args.switch else " + server graph"))
    return 0


def _resolve_feed(args, state: StatePaths) -> dict[str, Level]:
    if args.feed:
        return fetch_feed(args.feed)
    if state.feed_path.is_file():
        return parse_verdict_feed(state.feed_path)
    return {}


def _warn_unknown_feed_hosts(unknown: list[str]) -> None:
    if unknown:
        head = ", ".join(unknown[:5]) + ("..." if len(unknown) > 5 else "")
        print(f"warn: {len(unknown)} feed hostname(s) match no topology node: {head}")


def cmd_color(args) -> int:
    loaded = load_state(Path(args.state_dir), args.config)
    server_tree, trees = load_built_trees(loaded.paths)
    if server_tree is None and not trees:
        raise ConfigError("no built topology; run `body build` first")
    verdicts = _resolve_feed(args, loaded.paths)
    written, unknown = color_and_export(loaded.paths, loaded.topo_map, verdicts, server_tree, trees)
    print(f"colored {len(trees)} switch view(s) + server view; {len(written)} file(s) changed")
    _warn_unknown_feed_hosts(unknown)
    return 0


def cmd_report(args) -> int:
    loaded = load_state(Path(args.state_dir), args.config)
    results = classify_all(loaded)
    report = resolution_report(loaded, results)
    write_report(loaded.paths, report)
    if args.format == "json":
        print(canonical_json(report), end="")
    else:
        print(render_report_text(report), end="")
    return 0


def cmd_hil(args) -> int:
    loaded = load_state(Path(args.state_dir), args.config)
    profiles = [loaded.store.load(sid) for sid in loaded.store.list_ids()]
    candidates = scan_unregistered(profiles, loaded.registry, loaded.topo_map, loaded.config)
    print(hil_report(candidates, args.format), end="")
    write_text_if_changed(
        loaded.paths.reports_dir / "hil.json", hil_report(candidates, "json")
    )
    if candidates:
        append_alerts(candidates, loaded.paths.root / ALERT_LOG_FILENAME, args.now)

    if args.step_leases:
        store = LeaseStore(loaded.paths.root)
        visible = {
            entry.mac
            for profile in profiles
            for entry in profile.mac_table
        }
        counts = observe_leases(store, loaded.registry, visible, args.now)
        store.save()
        print(
            f"leases: {counts['registered']} registered, {counts['renewed']} renewed, "
            f"{counts['absent']} absent -> {store.path}"
        )
    if args.emit_dhcp:
        store = LeaseStore(loaded.paths.root)
        text = emit_dhcp_reservations(loaded.registry, store)
        write_text_if_changed(Path(args.emit_dhcp), text)
        print(f"wrote reservations for {len(loaded.registry)} registered MAC(s) to {args.emit_dhcp}")
    return 0


def cmd_run(args) -> int:
    started = time.monotonic()
    state = StatePaths(Path(args.state_dir))
    stage = "collect"
    try:
        import_fixture_inputs(Path(args.fixtures), state, config_override=args.config)
        collect_switches(state, Path(args.fixtures), args.switch)
        stage = "classify"
        loaded = load_state(state.root)
        results = classify_all(loaded, args.switch)
        stage = "build"
        trees = build_trees(loaded, results)
        server_tree = None if args.switch else build_server_tree(loaded, results)
        stage = "color"
        verdicts = _resolve_feed(args, state)
        _, unknown_hosts = color_and_export(state, loaded.topo_map, verdicts, server_tree, trees)
        stage = "report"
        report = resolution_report(loaded, results)
        write_report(state, report)
    except ConfigError:
        raise
    except BodyError as exc:
        raise BodyError(f"{stage} stage failed: {exc}") from exc

    if args.format == "json":
        print(canonical_json(report), end="")
    else:
        print(render_report_text(report), end="")
        _warn_unknown_feed_hosts(unknown_hosts)
        elapsed = time.monotonic() - started
        print(f"pipeline complete in {elapsed:.2f}s; state in {state.root}")
    return 0


def cmd_serve(args) -> int:
    import http.server

    state = StatePaths(Path(args.state_dir))
    views_dir = state.views_dir
    frontend_dir = Path(args.frontend) if args.frontend else None

    def confine(root: Path, relative: str) -> str:
        # Keep resolved targets inside their root; traversal turns into 404.
        candidate = (root / relative).resolve()
        if not str(candidate).startswith(str(root.resolve()) + "/") and candidate != root.resolve():
            return str(root / "_denied_")
        return str(candidate)

    class Handler(http.server.SimpleHTTPRequestHandler):
        def translate_path(self, path: str) -> str:
            path = path.split("?", 1)[0].split("#", 1)[0]
            if path.startswith("/views/"):
                return confine(views_dir, path[len("/views/") :])
            if frontend_dir is not None:
                return confine(frontend_dir, path.lstrip("/") or "index.html")
            return confine(views_dir, path.lstrip("/"))

        def log_message(self, fmt, *log_args):
            logger.info("serve: " + fmt, *log_args)

        def end_headers(self):
            self.send_header("Access-Control-Allow-Origin", "*")
            super().end_headers()

    server = http.server.ThreadingHTTPServer((args.bind, args.port), Handler)
    print(f"serving views from {views_dir} on http://{args.bind}:{args.port}/views/")
    if frontend_dir:
        print(f"serving viewer from {frontend_dir} on http://{args.bind}:{args.port}/")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="body",
        description="Deterministic layer-2 topology inference over switch CLI state",
    )
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_state(p):
        p.add_argument("--state-dir", default="state", help="state directory (default: ./state)")
        p.add_argument("--config", default=None, metavar="PATH", help="classify config override")

    p = sub.add_parser("simulate", help="generate a synthetic campus corpus")
    p.add_argument("--spec", required=True, help="spec YAML path, or 'uff-like' for the shipped plan")
    p.add_argument("--out", required=True, help="corpus output directory")
    p.add_argument("--seed", type=int, default=None, help="override the spec seed")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("collect", help="collect switch profiles from a fixtures corpus")
    add_state(p)
    p.add_argument("--fixtures", required=True)
    p.add_argument("--switch", default=None, help="collect a single switch")
    p.set_defaults(func=cmd_collect)

    p = sub.add_parser("onboard", help="collect one switch with interactive uplink confirmation")
    add_state(p)
    p.add_argument("--fixtures", required=True)
    p.add_argument("--switch", required=True)
    p.add_argument("--yes", action="store_true", help="skip the prompt (lldp_name evidence only)")
    p.set_defaults(func=cmd_onboard)

    p = sub.add_parser("build", help="build topology trees from persisted state")
    add_state(p)
    p.add_argument("--switch", default=None)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("color", help="apply a verdict feed and export view JSON")
    add_state(p)
    p.add_argument("--feed", default=None, help="feed path or http(s) URL")
    p.set_defaults(func=cmd_color)

    p = sub.add_parser("report", help="print the per-campus resolution table")
    add_state(p)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("hil", help="scan for unresolved MACs and render the work order")
    add_state(p)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--step-leases", action="store_true", help="apply one lease observation round")
    p.add_argument("--emit-dhcp", default=None, metavar="PATH", help="write the reservation file")
    p.add_argument("--now", default=None, help="timestamp override for deterministic output")
    p.set_defaults(func=cmd_hil)

    p = sub.add_parser("run", help="full pipeline: collect, classify, build, color, export, report")
    add_state(p)
    p.add_argument("--fixtures", required=True)
    p.add_argument("--switch", default=None)
    p.add_argument("--feed", default=None)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("serve", help="serve view JSON (and the viewer, if built) over HTTP")
    add_state(p)
    p.add_argument("--port", type=int, default=8087)
    p.add_argument("--bind", default="127.0.0.1")
    p.add_argument("--frontend", default=None, help="directory with built viewer assets")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except BodyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

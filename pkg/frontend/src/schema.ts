// Validation of everything that crosses the wire. Errors are thrown with a
// path-qualified message and nothing is consumed half-parsed: a payload is
// either fully valid or rejected.

import type { PositionsFile, ViewIndex, ViewPayload } from "./types.js";

export class SchemaError extends Error {}

function fail(path: string, expected: string, got: unknown): never {
  throw new SchemaError(`${path}: expected ${expected}, got ${JSON.stringify(got)?.slice(0, 80)}`);
}

function asObject(value: unknown, path: string): Record<string, unknown> {
  if (typeof value !== "object" || value === null || Array.isArray(value)) {
    fail(path, "an object", value);
  }
  return value as Record<string, unknown>;
}

function asArray(value: unknown, path: string): unknown[] {
  if (!Array.isArray(value)) fail(path, "an array", value);
  return value;
}

function asString(value: unknown, path: string): string {
  if (typeof value !== "string" || value.length === 0) fail(path, "a non-empty string", value);
  return value;
}

export function validateView(data: unknown): ViewPayload {
  const root = asObject(data, "view");
  const nodes = asArray(root.nodes, "view.nodes").map((raw, i) => {
    const node = asObject(raw, `view.nodes[${i}]`);
    const tooltipRaw = asObject(node.tooltip ?? {}, `view.nodes[${i}].tooltip`);
    const tooltip: Record<string, string | number> = {};
    for (const [key, value] of Object.entries(tooltipRaw)) {
      if (typeof value !== "string" && typeof value !== "number") {
        fail(`view.nodes[${i}].tooltip.${key}`, "a string or number", value);
      }
      tooltip[key] = value;
    }
    return {
      id: asString(node.id, `view.nodes[${i}].id`),
      kind: asString(node.kind, `view.nodes[${i}].kind`),
      label: asString(node.label, `view.nodes[${i}].label`),
      fill: asString(node.fill, `view.nodes[${i}].fill`),
      border: asString(node.border, `view.nodes[${i}].border`),
      tooltip,
    };
  });

  const ids = new Set<string>();
  for (const node of nodes) {
    if (ids.has(node.id)) throw new SchemaError(`view.nodes: duplicate id ${node.id}`);
    ids.add(node.id);
  }

  const edges = asArray(root.edges, "view.edges").map((raw, i) => {
    const edge = asObject(raw, `view.edges[${i}]`);
    const source = asString(edge.source, `view.edges[${i}].source`);
    const target = asString(edge.target, `view.edges[${i}].target`);
    if (!ids.has(source)) fail(`view.edges[${i}].source`, "a known node id", source);
    if (!ids.has(target)) fail(`view.edges[${i}].target`, "a known node id", target);
    return { source, target };
  });

  return { nodes, edges };
}

export function validateViewIndex(data: unknown): ViewIndex {
  const root = asObject(data, "index");
  const views = asArray(root.views, "index.views").map((raw, i) => {
    const entry = asObject(raw, `index.views[${i}]`);
    return {
      id: asString(entry.id, `index.views[${i}].id`),
      file: asString(entry.file, `index.views[${i}].file`),
      label: asString(entry.label, `index.views[${i}].label`),
    };
  });
  return { views };
}

export function validatePositionsFile(data: unknown): PositionsFile {
  const root = asObject(data, "positions file");
  const viewId = asString(root.view_id, "positions file.view_id");
  const raw = asObject(root.positions, "positions file.positions");
  const positions: Record<string, [number, number]> = {};
  for (const [nodeId, value] of Object.entries(raw)) {
    const pair = asArray(value, `positions[${nodeId}]`);
    if (pair.length !== 2 || typeof pair[0] !== "number" || typeof pair[1] !== "number" ||
        !Number.isFinite(pair[0]) || !Number.isFinite(pair[1])) {
      fail(`positions[${nodeId}]`, "a finite [x, y] pair", value);
    }
    positions[nodeId] = [pair[0], pair[1]];
  }
  return { view_id: viewId, positions };
}

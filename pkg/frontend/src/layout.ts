// S/E/I/R layout persistence: Save to local storage, Export to a positions
// file, Import one back, Reset to the automatic layout. Positions are the
// only client-side state; they live per view id and never touch the view
// JSON itself.

import { validatePositionsFile } from "./schema.js";
import type { ImportResult, Position, PositionsFile } from "./types.js";

const STORAGE_PREFIX = "body-viewer.layout.v1:";

type StorageLike = Pick<Storage, "getItem" | "setItem" | "removeItem">;

function defaultStorage(): StorageLike | null {
  try {
    return globalThis.localStorage ?? null;
  } catch {
    return null;
  }
}

export function savePositions(
  viewId: string,
  positions: Record<string, Position>,
  storage: StorageLike | null = defaultStorage(),
): boolean {
  if (!storage) return false;
  try {
    storage.setItem(STORAGE_PREFIX + viewId, JSON.stringify(exportPositions(viewId, positions)));
    return true;
  } catch (error) {
    console.warn("failed to save layout:", error);
    return false;
  }
}

export function loadPositions(
  viewId: string,
  storage: StorageLike | null = defaultStorage(),
): Record<string, Position> | null {
  if (!storage) return null;
  try {
    const stored = storage.getItem(STORAGE_PREFIX + viewId);
    if (!stored) return null;
    const file = validatePositionsFile(JSON.parse(stored));
    return file.view_id === viewId ? file.positions : null;
  } catch (error) {
    console.warn("ignoring unreadable saved layout:", error);
    return null;
  }
}

export function clearPositions(viewId: string, storage: StorageLike | null = defaultStorage()): void {
  storage?.removeItem(STORAGE_PREFIX + viewId);
}

export function exportPositions(viewId: string, positions: Record<string, Position>): PositionsFile {
  const ordered: Record<string, Position> = {};
  for (const nodeId of Object.keys(positions).sort()) {
    const [x, y] = positions[nodeId];
    ordered[nodeId] = [x, y];
  }
  return { view_id: viewId, positions: ordered };
}

/**
 * Apply a positions file to the current node set. The file is validated as a
 * whole before anything is applied: a malformed file changes nothing. Node
 * ids the view does not know are skipped and reported, never silently eaten.
 */
export function importPositions(data: unknown, knownNodeIds: Iterable<string>): ImportResult {
  const file = validatePositionsFile(data);
  const known = new Set(knownNodeIds);
  const applied: Record<string, Position> = {};
  const ignored: string[] = [];
  for (const [nodeId, position] of Object.entries(file.positions)) {
    if (known.has(nodeId)) {
      applied[nodeId] = position;
    } else {
      ignored.push(nodeId);
    }
  }
  ignored.sort();
  return { applied, ignored };
}

// Shapes of the payloads this viewer consumes and produces. The view JSON is
// produced by the pipeline's export step and is read-only here: rendering,
// tooltips and layout persistence never write back into it.

export interface ViewNode {
  id: string;
  kind: string;
  label: string;
  fill: string;
  border: string;
  tooltip: Record<string, string | number>;
}

export interface ViewEdge {
  source: string;
  target: string;
}

export interface ViewPayload {
  nodes: ViewNode[];
  edges: ViewEdge[];
}

export interface ViewDescriptor {
  id: string; // "srv" or "sw:<switch_id>"
  file: string;
  label: string;
}

export interface ViewIndex {
  views: ViewDescriptor[];
}

export type Position = [number, number];

// The S/E/I/R interchange format: one file per view.
export interface PositionsFile {
  view_id: string;
  positions: Record<string, Position>;
}

export interface ImportResult {
  applied: Record<string, Position>;
  ignored: string[]; // node ids in the file that the current view does not have
}

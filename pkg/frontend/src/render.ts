// Cytoscape wiring. The view JSON is mapped onto elements once per load;
// every later action (coloring toggles elsewhere, layout moves here) only
// touches presentation state. Quarantined MACs render inside their "others"
// compound box instead of dangling on edges, mini-switch cascades keep their
// distinctive purple diamond, servers show their active stream count.

import type { Position, ViewNode, ViewPayload } from "./types.js";

// Loaded as a plain <script> (UMD build served next to the app).
declare const cytoscape: any;

export interface RenderedView {
  cy: any;
  nodeIds: string[];
}

const SHAPES: Record<string, string> = {
  core: "round-rectangle",
  campus: "round-rectangle",
  distribution_switch: "rectangle",
  access_switch: "rectangle",
  floor_group: "round-rectangle",
  camera: "ellipse",
  mini_switch: "diamond",
  server: "barrel",
  unresolved_mac: "octagon",
};

function nodeLabel(node: ViewNode): string {
  if (node.kind === "server" && "stream_count" in node.tooltip) {
    return `${node.label}\n${node.tooltip.stream_count} streams`;
  }
  return node.label;
}

function toElements(view: ViewPayload) {
  const quarantineBlocks = new Set(
    view.nodes.filter((n) => n.kind === "quarantine_block").map((n) => n.id),
  );
  const parentOf = new Map<string, string>();
  for (const edge of view.edges) {
    if (quarantineBlocks.has(edge.source)) {
      parentOf.set(edge.target, edge.source);
    }
  }
  const elements: any[] = view.nodes.map((node) => ({
    group: "nodes",
    data: {
      id: node.id,
      label: nodeLabel(node),
      kind: node.kind,
      fill: node.fill,
      border: node.border,
      parent: parentOf.get(node.id),
      node,
    },
  }));
  for (const edge of view.edges) {
    if (quarantineBlocks.has(edge.source)) continue; // drawn as containment
    elements.push({
      group: "edges",
      data: { id: `${edge.source}->${edge.target}`, source: edge.source, target: edge.target },
    });
  }
  return elements;
}

const STYLE = [
  {
    selector: "node",
    style: {
      "background-color": "data(fill)",
      "border-color": "data(border)",
      "border-width": 3,
      label: "data(label)",
      "font-size": 9,
      "text-wrap": "wrap",
      "text-valign": "bottom",
      "text-margin-y": 4,
      width: 26,
      height: 26,
    },
  },
  ...Object.entries(SHAPES).map(([kind, shape]) => ({
    selector: `node[kind = "${kind}"]`,
    style: { shape },
  })),
  {
    selector: 'node[kind = "mini_switch"]',
    style: { "background-color": "#7b1fa2", width: 30, height: 30 },
  },
  {
    selector: 'node[kind = "quarantine_block"]',
    style: {
      shape: "round-rectangle",
      "background-color": "#fbe9e7",
      "background-opacity": 0.55,
      "border-style": "dashed",
      "border-color": "#bf360c",
      "text-valign": "top",
      "font-size": 12,
    },
  },
  {
    selector: 'node[kind = "unresolved_mac"]',
    style: { width: 20, height: 20, "font-size": 7 },
  },
  {
    selector: 'node[kind = "core"], node[kind = "access_switch"], node[kind = "distribution_switch"]',
    style: { width: 42, height: 24, "font-size": 10 },
  },
  {
    selector: "edge",
    style: {
      width: 1.5,
      "line-color": "#b0bec5",
      "curve-style": "bezier",
      "target-arrow-shape": "triangle",
      "target-arrow-color": "#b0bec5",
      "arrow-scale": 0.8,
    },
  },
];

function autoLayout(cy: any): void {
  cy.layout({
    name: "breadthfirst",
    directed: true,
    spacingFactor: 1.1,
    padding: 24,
    animate: false,
  }).run();
}

export function renderView(container: HTMLElement, view: ViewPayload): RenderedView {
  const cy = cytoscape({
    container,
    elements: toElements(view),
    style: STYLE,
    wheelSensitivity: 0.2,
  });
  autoLayout(cy);
  return { cy, nodeIds: view.nodes.map((n) => n.id) };
}

export function currentPositions(rendered: RenderedView): Record<string, Position> {
  const out: Record<string, Position> = {};
  rendered.cy.nodes().forEach((node: any) => {
    const { x, y } = node.position();
    out[node.id()] = [Math.round(x * 100) / 100, Math.round(y * 100) / 100];
  });
  return out;
}

export function applyPositions(rendered: RenderedView, positions: Record<string, Position>): void {
  rendered.cy.batch(() => {
    for (const [nodeId, [x, y]] of Object.entries(positions)) {
      const node = rendered.cy.getElementById(nodeId);
      if (node.nonempty() && !node.isParent()) {
        node.position({ x, y });
      }
    }
  });
  rendered.cy.fit(undefined, 24);
}

export function resetLayout(rendered: RenderedView): void {
  autoLayout(rendered.cy);
  rendered.cy.fit(undefined, 24);
}

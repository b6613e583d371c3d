// Tooltip content and click-through navigation. Field order mirrors what an
// operator scans for: identity first, then location, then classification
// context. Redaction masks addresses for screenshots and wall displays; the
// underlying JSON keeps full values.

import type { ViewNode } from "./types.js";

const FIELD_ORDER = [
  "hostname",
  "ip",
  "mac",
  "model",
  "port",
  "oui_vendor",
  "parent_switch",
  "stream_count",
  "status",
  "role",
] as const;

const FIELD_LABELS: Record<string, string> = {
  hostname: "name",
  ip: "ip",
  mac: "mac",
  model: "model",
  port: "port",
  oui_vendor: "vendor",
  parent_switch: "switch",
  stream_count: "streams",
  status: "status",
  role: "role",
};

export function redactValue(field: string, value: string | number): string {
  const text = String(value);
  if (field === "ip") {
    return text.replace(/^(\d+\.\d+)\.\d+\.\d+$/, "$1.x.x");
  }
  if (field === "mac") {
    return text.replace(/^(([0-9a-f]{2}:){2})([0-9a-f]{2}:){3}([0-9a-f]{2})$/, "$1xx:xx:xx:$4");
  }
  return text;
}

export function tooltipFields(node: ViewNode, redact = false): Array<[string, string]> {
  const rows: Array<[string, string]> = [];
  for (const field of FIELD_ORDER) {
    if (field in node.tooltip) {
      const value = node.tooltip[field];
      rows.push([FIELD_LABELS[field], redact ? redactValue(field, value) : String(value)]);
    }
  }
  if (rows.length === 0) {
    rows.push(["id", node.id]);
  }
  return rows;
}

/** Hosts an operator can click through to the monitoring platform. */
export function navigationTarget(node: ViewNode, urlTemplate: string | null): string | null {
  if (!urlTemplate || !urlTemplate.includes("{host}")) return null;
  if (node.kind !== "camera" && node.kind !== "server") return null;
  const hostname = node.tooltip.hostname;
  if (typeof hostname !== "string" || hostname.length === 0) return null;
  return urlTemplate.replaceAll("{host}", encodeURIComponent(hostname));
}

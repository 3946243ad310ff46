// Export of a finished message: a JSON file carrying exactly the render
// response, and plain text with parts in canonical structure order.

import type { RenderResponse } from "./api.js";
import { CANONICAL_PART_ORDER } from "./state.js";

export function exportFileName(templateId: string): string {
  return `${templateId}.message.json`;
}

export function exportJson(render: RenderResponse): string {
  return JSON.stringify(render, null, 2);
}

export function exportPlainText(render: RenderResponse): string {
  const order = new Map(CANONICAL_PART_ORDER.map((kind, i) => [kind as string, i]));
  const parts = [...render.parts].sort(
    (a, b) => (order.get(a.kind) ?? 99) - (order.get(b.kind) ?? 99),
  );
  return parts.map((p) => p.text).join("\n");
}

export function triggerDownload(doc: Document, name: string, content: string): void {
  const blob = new Blob([content], { type: "application/json" });
  const url = URL.createObjectURL(blob);
  const link = doc.createElement("a");
  link.href = url;
  link.download = name;
  doc.body.appendChild(link);
  link.click();
  link.remove();
  URL.revokeObjectURL(url);
}

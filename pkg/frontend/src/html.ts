/** Minimal HTML helpers shared by the panel renderers. */

export function esc(value: unknown): string {
  return String(value)
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

/** Render a signed delta chip text; the sign comes from comparison only. */
export function signed(value: number): string {
  return value > 0 ? `+${value}` : String(value);
}

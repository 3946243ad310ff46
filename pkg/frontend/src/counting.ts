// Character counting for live budget feedback. Counts Unicode code points
// (surrogate pairs are one symbol; combining marks and ZWJ-sequence members
// count separately), matching the server's counting rule exactly. The server
// stays the source of truth; these counts only drive instant UI feedback.

export type CounterStatus = "ok" | "extension" | "over";

export interface CounterView {
  part: string;
  current: number;
  baseLimit: number;
  extensionLimit: number;
  status: CounterStatus;
}

export function countSymbols(text: string): number {
  let n = 0;
  for (const _ of text) n++;
  return n;
}

export function counterStatus(current: number, base: number, extension: number): CounterStatus {
  if (current <= base) return "ok";
  if (current <= base + extension) return "extension";
  return "over";
}

export function counterView(
  part: string,
  text: string,
  base: number,
  extension: number,
): CounterView {
  const current = countSymbols(text);
  return {
    part,
    current,
    baseLimit: base,
    extensionLimit: base + extension,
    status: counterStatus(current, base, extension),
  };
}

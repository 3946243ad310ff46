// Slot substitution mirroring the server's pattern rules: `{name}` slots,
// `{{` / `}}` literal braces, single-pass substitution. Used only for
// instant local previews; the server re-renders authoritatively.

export function slotNames(pattern: string): string[] {
  const names: string[] = [];
  let i = 0;
  for (;;) {
    const open = pattern.indexOf("{", i);
    const close = pattern.indexOf("}", i);
    if (open < 0 && close < 0) return names;
    if (close >= 0 && (open < 0 || close < open)) {
      i = close + (pattern[close + 1] === "}" ? 2 : 1);
      continue;
    }
    if (pattern[open + 1] === "{") {
      i = open + 2;
      continue;
    }
    const end = pattern.indexOf("}", open + 1);
    if (end < 0) return names; // malformed patterns never reach the client
    names.push(pattern.slice(open + 1, end));
    i = end + 1;
  }
}

export function renderPattern(pattern: string, bindings: Record<string, string>): string {
  const parts: string[] = [];
  let i = 0;
  for (;;) {
    const open = pattern.indexOf("{", i);
    const close = pattern.indexOf("}", i);
    if (open < 0 && close < 0) {
      parts.push(pattern.slice(i));
      return parts.join("");
    }
    if (close >= 0 && (open < 0 || close < open)) {
      parts.push(pattern.slice(i, close + 1));
      i = close + 2;
      continue;
    }
    if (pattern[open + 1] === "{") {
      parts.push(pattern.slice(i, open + 1));
      i = open + 2;
      continue;
    }
    const end = pattern.indexOf("}", open + 1);
    if (end < 0) {
      parts.push(pattern.slice(i));
      return parts.join("");
    }
    parts.push(pattern.slice(i, open));
    parts.push(bindings[pattern.slice(open + 1, end)] ?? "");
    i = end + 1;
  }
}

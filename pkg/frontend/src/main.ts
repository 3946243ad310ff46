import { makeApiClient } from "./api.js";
import { mountWizard } from "./wizard.js";

const FALLBACK_API_BASE = "/api";

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app root element");
  let apiBase = FALLBACK_API_BASE;
  let debounceMs = 300;
  try {
    const resp = await fetch(`${FALLBACK_API_BASE}/config`);
    if (resp.ok) {
      const config = await resp.json();
      apiBase = config.api_base ?? apiBase;
      debounceMs = config.validate_debounce_ms ?? debounceMs;
    }
  } catch {
    // Static hosting without the API: the wizard will surface load errors.
  }
  mountWizard(root, { api: makeApiClient(apiBase), debounceMs });
}

void boot();

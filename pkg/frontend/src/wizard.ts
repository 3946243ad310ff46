// The five-stage composition wizard. Everything renders from the Store's
// WizardState; server calls go through a debouncer plus a latest-wins
// coalescer so stale responses never overwrite fresh input.

import {
  ApiClient,
  ApiError,
  ChannelInfo,
  RecommendResponse,
  TemplateInfo,
  ValidateResponse,
} from "./api.js";
import { makeCoalescer } from "./coalesce.js";
import { counterView } from "./counting.js";
import { debounce } from "./debounce.js";
import { exportFileName, exportJson, exportPlainText, triggerDownload } from "./exporter.js";
import { renderPattern } from "./patterns.js";
import {
  STAGES,
  Store,
  allSlotsBound,
  canEnterStage,
  exportEnabled,
  slotsOf,
  stageComplete,
} from "./state.js";

export interface WizardOptions {
  api: ApiClient;
  debounceMs?: number;
  document?: Document;
}

interface Catalog {
  templates: Map<string, TemplateInfo>;
  channels: Map<string, ChannelInfo>;
  factAttributes: string[];
}

const STATUS_CLASS = { ok: "counter-ok", extension: "counter-extension", over: "counter-over" };

export function mountWizard(root: HTMLElement, options: WizardOptions): Store {
  const doc = options.document ?? root.ownerDocument;
  const api = options.api;
  const debounceMs = options.debounceMs ?? 300;
  const store = new Store();
  const catalog: Catalog = { templates: new Map(), channels: new Map(), factAttributes: [] };
  const validateCoalescer = makeCoalescer<{ resp: ValidateResponse; snapshot: string }>();
  const recommendCoalescer = makeCoalescer<RecommendResponse>();
  let banner: { text: string; retry: (() => void) | null } | null = null;

  const el = (tag: string, className?: string, text?: string): HTMLElement => {
    const node = doc.createElement(tag);
    if (className) node.className = className;
    if (text !== undefined) node.textContent = text;
    return node;
  };

  function selectedTemplate(): TemplateInfo | null {
    const id = store.get().selectedTemplate;
    return id ? catalog.templates.get(id) ?? null : null;
  }

  function channelOf(template: TemplateInfo | null): ChannelInfo | null {
    return template ? catalog.channels.get(template.channel) ?? null : null;
  }

  function showBanner(text: string, retry: (() => void) | null = null): void {
    banner = { text, retry };
    sync();
  }

  function clearBanner(): void {
    banner = null;
  }

  // -- server interactions

  function fetchRecommendations(): void {
    const state = store.get();
    clearBanner();
    recommendCoalescer.dispatch(
      api.recommend(state.facts, state.rulesetId),
      (resp) => {
        store.set({ recommendations: resp, stage: 2 });
      },
      (err) => {
        if (err instanceof ApiError && err.code === "fact_conflict") {
          const attr = String(err.details["attribute"] ?? "");
          showBanner(`Rule conflict on fact "${attr}": ${err.message}`, fetchRecommendations);
        } else {
          const msg = err instanceof Error ? err.message : String(err);
          showBanner(`Could not fetch recommendations: ${msg}`, fetchRecommendations);
        }
      },
    );
  }

  function dispatchValidate(): void {
    const state = store.get();
    const template = selectedTemplate();
    if (!template || !allSlotsBound(state, template)) return;
    const snapshot = JSON.stringify(state.bindings);
    validateCoalescer.dispatch(
      api
        .validate(template.id, state.bindings, template.channel)
        .then((resp) => ({ resp, snapshot })),
      ({ resp, snapshot: sent }) => {
        const current = JSON.stringify(store.get().bindings);
        reconcileCounts(resp);
        store.set({ lastReport: resp, dirty: current !== sent });
      },
      (err) => {
        const msg = err instanceof Error ? err.message : String(err);
        showBanner(`Validation failed: ${msg}`, dispatchValidate);
      },
    );
  }

  const debouncedValidate = debounce(dispatchValidate, debounceMs);

  function reconcileCounts(resp: ValidateResponse): void {
    // Local counters are instant feedback; on disagreement the server wins.
    const template = selectedTemplate();
    if (!template) return;
    for (const part of resp.parts) {
      const spec = template.parts.find((p) => p.kind === part.kind);
      if (!spec) continue;
      const local = counterView(
        part.kind,
        renderPattern(spec.text, store.get().bindings),
        part.base,
        part.extension,
      );
      if (local.current !== part.count) {
        console.warn(
          `count mismatch for ${part.kind}: local ${local.current} vs server ${part.count}; using server`,
        );
      }
    }
  }

  function setBinding(name: string, value: string): void {
    const state = store.get();
    store.set({ bindings: { ...state.bindings, [name]: value }, dirty: true });
    debouncedValidate();
  }

  function selectTemplate(id: string): void {
    // Reselection invalidates anything in flight for the old template.
    validateCoalescer.invalidate();
    debouncedValidate.cancel();
    store.set({ selectedTemplate: id, bindings: {}, lastReport: null, dirty: false, stage: 3 });
  }

  // -- stage renderers

  function renderFactsStage(container: HTMLElement): void {
    const state = store.get();
    container.appendChild(el("h2", "", STAGES[0]));
    container.appendChild(
      el("p", "hint", "Facts drive the rule engine: audience, promotion stage, product traits."),
    );
    const list = el("div", "fact-list");
    const known = new Set([...catalog.factAttributes, ...Object.keys(state.facts)]);
    for (const attr of [...known].sort()) {
      const row = el("div", "fact-row");
      row.appendChild(el("label", "fact-name", attr));
      const input = doc.createElement("input");
      input.type = "text";
      input.value = String(state.facts[attr] ?? "");
      input.dataset.attr = attr;
      input.addEventListener("input", () => {
        const facts = { ...store.get().facts };
        if (input.value === "") {
          delete facts[attr];
        } else {
          facts[attr] = input.value;
        }
        store.set({ facts, recommendations: null });
      });
      row.appendChild(input);
      list.appendChild(row);
    }
    container.appendChild(list);

    const adder = el("div", "fact-adder");
    const nameInput = doc.createElement("input");
    nameInput.placeholder = "attribute (lowercase_snake)";
    const valueInput = doc.createElement("input");
    valueInput.placeholder = "value";
    const addBtn = el("button", "", "Add fact") as HTMLButtonElement;
    addBtn.addEventListener("click", () => {
      const name = nameInput.value.trim();
      if (!/^[a-z][a-z0-9_]*$/.test(name) || valueInput.value === "") return;
      store.set({ facts: { ...store.get().facts, [name]: valueInput.value }, recommendations: null });
    });
    adder.append(nameInput, valueInput, addBtn);
    container.appendChild(adder);

    const go = el("button", "primary", "Get recommendations") as HTMLButtonElement;
    go.id = "fetch-recommendations";
    go.disabled = !stageComplete(state, 1, null);
    go.addEventListener("click", fetchRecommendations);
    container.appendChild(go);
  }

  function renderRecommendationsStage(container: HTMLElement): void {
    const state = store.get();
    container.appendChild(el("h2", "", STAGES[1]));
    const recs = state.recommendations;
    if (!recs || recs.recommendations.length === 0) {
      container.appendChild(
        el("p", "empty-state", "No templates matched. Adjust the facts or extend the catalog."),
      );
      return;
    }
    const list = el("div", "rec-list");
    for (const rec of recs.recommendations) {
      const card = el("div", "rec-card");
      card.dataset.templateId = rec.template_id;
      const head = el("div", "rec-head");
      head.appendChild(el("span", "rec-id", rec.template_id));
      head.appendChild(el("span", "rec-score", `score ${(rec.score * 100).toFixed(0)}%`));
      card.appendChild(head);
      const chips = el("div", "chips");
      for (const pair of rec.matched) {
        chips.appendChild(el("span", "chip chip-matched", `${pair.attr}=${String(pair.value)}`));
      }
      for (const pair of rec.unmatched) {
        chips.appendChild(el("span", "chip chip-unmatched", `${pair.attr}=${String(pair.value)}`));
      }
      card.appendChild(chips);
      const trace = el("details", "trace");
      trace.appendChild(el("summary", "", `Why: ${recs.trace.length} rule(s) fired`));
      for (const firing of recs.trace) {
        const assertions = firing.asserted
          .map((f) => `${f.attr}=${String(f.value)}`)
          .join(", ");
        trace.appendChild(el("div", "trace-line", `${firing.rule_id} -> ${assertions}`));
      }
      card.appendChild(trace);
      const pick = el("button", "", "Use this template") as HTMLButtonElement;
      pick.addEventListener("click", () => selectTemplate(rec.template_id));
      card.appendChild(pick);
      list.appendChild(card);
    }
    container.appendChild(list);
  }

  function renderComposeStage(container: HTMLElement): void {
    const state = store.get();
    const template = selectedTemplate();
    container.appendChild(el("h2", "", STAGES[2]));
    if (!template) return;
    const channel = channelOf(template);

    const bindingsBox = el("div", "bindings");
    for (const name of slotsOf(template)) {
      const row = el("div", "binding-row");
      row.appendChild(el("label", "slot-name", `{${name}}`));
      const input = doc.createElement("input");
      input.type = "text";
      input.value = state.bindings[name] ?? "";
      input.dataset.slot = name;
      input.addEventListener("input", () => setBinding(name, input.value));
      row.appendChild(input);
      bindingsBox.appendChild(row);
    }
    container.appendChild(bindingsBox);

    const preview = el("div", "preview");
    for (const part of template.parts) {
      const budget = channel?.budgets[part.kind] ?? { base: part.budget.base, extension: part.budget.extension };
      const text = renderPattern(part.text, state.bindings);
      const view = counterView(part.kind, text, budget.base, budget.extension);
      const row = el("div", "preview-row");
      row.appendChild(el("span", "part-kind", part.kind));
      row.appendChild(el("span", "part-text", text));
      const counter = el(
        "span",
        `counter ${STATUS_CLASS[view.status]}`,
        `${view.current}/${view.baseLimit}` +
          (budget.extension > 0 ? `+${budget.extension}` : ""),
      );
      counter.dataset.part = part.kind;
      counter.dataset.status = view.status;
      row.appendChild(counter);
      preview.appendChild(row);
    }
    container.appendChild(preview);
  }

  function renderValidateStage(container: HTMLElement): void {
    const state = store.get();
    container.appendChild(el("h2", "", STAGES[3]));
    const report = state.lastReport;
    const revalidate = el("button", "", "Validate now") as HTMLButtonElement;
    revalidate.id = "validate-now";
    revalidate.addEventListener("click", () => {
      debouncedValidate.cancel();
      dispatchValidate();
    });
    container.appendChild(revalidate);
    if (!report) {
      container.appendChild(el("p", "hint", "No report yet."));
      return;
    }
    const verdict = el("p", `verdict verdict-${report.verdict}`, `Verdict: ${report.verdict}`);
    verdict.id = "verdict";
    if (state.dirty) {
      verdict.textContent += " (stale: bindings changed)";
    }
    container.appendChild(verdict);
    for (const violation of report.violations) {
      container.appendChild(
        el("div", `violation violation-${violation.severity}`, `${violation.severity}: ${violation.detail}`),
      );
    }
    if (report.unused_bindings.length > 0) {
      container.appendChild(
        el("div", "violation violation-warning", `unused bindings: ${report.unused_bindings.join(", ")}`),
      );
    }
  }

  function renderExportStage(container: HTMLElement): void {
    const state = store.get();
    const template = selectedTemplate();
    container.appendChild(el("h2", "", STAGES[4]));
    const enabled = exportEnabled(state);
    const download = el("button", "primary", "Download JSON") as HTMLButtonElement;
    download.id = "export-download";
    download.disabled = !enabled;
    const copy = el("button", "", "Copy plain text") as HTMLButtonElement;
    copy.id = "export-copy";
    copy.disabled = !enabled;
    if (!enabled) {
      container.appendChild(
        el("p", "hint", "Export unlocks once the current bindings have a passing report."),
      );
    }
    const act = (write: (rendered: string, plain: string) => void) => {
      if (!template || !exportEnabled(store.get())) return;
      api
        .render(template.id, store.get().bindings, template.channel)
        .then((resp) => write(exportJson(resp), exportPlainText(resp)))
        .catch((err: unknown) => {
          const msg = err instanceof Error ? err.message : String(err);
          showBanner(`Export failed: ${msg}`);
        });
    };
    download.addEventListener("click", () =>
      act((rendered) => triggerDownload(doc, exportFileName(template?.id ?? "message"), rendered)),
    );
    copy.addEventListener("click", () =>
      act((_, plain) => {
        void doc.defaultView?.navigator?.clipboard?.writeText(plain);
      }),
    );
    container.append(download, copy);
  }

  const stageRenderers = [
    renderFactsStage,
    renderRecommendationsStage,
    renderComposeStage,
    renderValidateStage,
    renderExportStage,
  ];

  // -- shell

  const shell = el("div", "wizard");
  const nav = el("nav", "wizard-nav");
  const bannerBox = el("div", "banner-box");
  const content = el("section", "wizard-content");
  shell.append(nav, bannerBox, content);
  root.appendChild(shell);

  function sync(): void {
    const state = store.get();
    const template = selectedTemplate();

    nav.innerHTML = "";
    STAGES.forEach((title, idx) => {
      const stageNo = idx + 1;
      const btn = el("button", "nav-step", `${stageNo}. ${title}`) as HTMLButtonElement;
      btn.dataset.stage = String(stageNo);
      btn.disabled = !canEnterStage(state, stageNo, template);
      if (stageNo === state.stage) btn.classList.add("active");
      btn.addEventListener("click", () => {
        if (canEnterStage(store.get(), stageNo, selectedTemplate())) {
          store.set({ stage: stageNo });
        }
      });
      nav.appendChild(btn);
    });

    bannerBox.innerHTML = "";
    if (banner) {
      const box = el("div", "banner", banner.text);
      if (banner.retry) {
        const retryBtn = el("button", "", "Retry") as HTMLButtonElement;
        const retry = banner.retry;
        retryBtn.addEventListener("click", retry);
        box.appendChild(retryBtn);
      }
      bannerBox.appendChild(box);
    }

    content.innerHTML = "";
    stageRenderers[state.stage - 1](content);
  }

  store.subscribe(sync);

  Promise.all([api.templates(), api.channels(), api.rulesets()])
    .then(([templates, channels, rulesets]) => {
      for (const t of templates) catalog.templates.set(t.id, t);
      for (const c of channels) catalog.channels.set(c.id, c);
      catalog.factAttributes = [...new Set(rulesets.flatMap((r) => r.condition_attributes))];
      if (rulesets.length > 0) store.set({ rulesetId: rulesets[0].id });
      else sync();
    })
    .catch((err: unknown) => {
      const msg = err instanceof Error ? err.message : String(err);
      showBanner(`Could not load the catalog: ${msg}`);
    });

  sync();
  return store;
}

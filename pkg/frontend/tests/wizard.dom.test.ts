// @vitest-environment jsdom
import { beforeEach, describe, expect, it } from "vitest";

import type {
  ApiClient,
  ChannelInfo,
  RecommendResponse,
  RenderResponse,
  RulesetInfo,
  TemplateInfo,
  ValidateResponse,
} from "../src/api.js";
import { countSymbols } from "../src/counting.js";
import { renderPattern } from "../src/patterns.js";
import { mountWizard } from "../src/wizard.js";

const TEMPLATE: TemplateInfo = {
  id: "demo_tpl",
  channel: "google_adwords",
  metadata: { audience: "b2b" },
  parts: [
    {
      kind: "title",
      semantics: ["usp_focus"],
      format: "question",
      budget: { base: 60, extension: 0 },
      text: "Is {pain} bad?",
    },
    {
      kind: "main_text",
      semantics: ["usp_focus"],
      format: "argument",
      budget: { base: 90, extension: 0 },
      text: "{product} fixes {pain}.",
    },
  ],
  slots: [
    { name: "pain", part: "title", line: 1, column: 4 },
    { name: "product", part: "main_text", line: 1, column: 1 },
    { name: "pain", part: "main_text", line: 1, column: 16 },
  ],
};

const CHANNEL: ChannelInfo = {
  id: "google_adwords",
  display_name: "Google AdWords",
  budgets: {
    title: { base: 60, extension: 0 },
    main_text: { base: 90, extension: 0 },
  },
  required: ["title", "main_text"],
};

const RULESET: RulesetInfo = { id: "demo", rules: 1, condition_attributes: ["audience", "stage"] };

function fakeValidate(bindings: Record<string, string>): ValidateResponse {
  const parts = TEMPLATE.parts.map((part) => {
    const text = renderPattern(part.text, bindings);
    const count = countSymbols(text);
    const status =
      count <= part.budget.base
        ? ("within_base" as const)
        : ("exceeded" as const);
    return {
      kind: part.kind,
      text,
      count,
      base: part.budget.base,
      extension: part.budget.extension,
      limit: part.budget.base + part.budget.extension,
      status,
    };
  });
  const over = parts.filter((p) => p.status === "exceeded");
  return {
    template_id: TEMPLATE.id,
    channel_id: CHANNEL.id,
    verdict: over.length ? "fail" : "pass",
    parts,
    violations: over.map((p) => ({
      part: p.kind,
      rule: "budget_exceeded",
      severity: "error" as const,
      detail: `${p.kind} is ${p.count} symbols, limit ${p.limit}`,
      count: p.count,
      limit: p.limit,
    })),
    unused_bindings: [],
  };
}

function fakeApi() {
  const calls = { validate: 0, render: 0 };
  const api: ApiClient = {
    config: async () => ({ api_base: "/api", validate_debounce_ms: 0 }),
    channels: async () => [CHANNEL],
    templates: async () => [TEMPLATE],
    rulesets: async () => [RULESET],
    recommend: async (facts): Promise<RecommendResponse> => ({
      facts,
      ruleset_id: "demo",
      k: 5,
      derived: [{ attr: "rec_audience", value: "b2b" }],
      trace: [
        { rule_id: "match_b2b_audience", asserted: [{ attr: "rec_audience", value: "b2b" }] },
      ],
      recommendations: [
        {
          template_id: TEMPLATE.id,
          score: 1.0,
          matched: [{ attr: "rec_audience", value: "b2b" }],
          unmatched: [],
        },
      ],
    }),
    validate: async (_t, bindings): Promise<ValidateResponse> => {
      calls.validate++;
      return fakeValidate(bindings);
    },
    render: async (_t, bindings): Promise<RenderResponse> => {
      calls.render++;
      const report = fakeValidate(bindings);
      return {
        template_id: TEMPLATE.id,
        channel_id: CHANNEL.id,
        bindings,
        unused_bindings: [],
        parts: report.parts.map((p) => ({ kind: p.kind, text: p.text })),
        plain_text: report.parts.map((p) => p.text).join("\n"),
        report: { verdict: report.verdict, violations: report.violations },
      };
    },
  };
  return { api, calls };
}

const tick = () => new Promise((resolve) => setTimeout(resolve, 5));

function q<T extends HTMLElement>(root: HTMLElement, selector: string): T {
  const node = root.querySelector(selector);
  if (!node) throw new Error(`missing element ${selector}`);
  return node as T;
}

function setInput(root: HTMLElement, selector: string, value: string): void {
  const input = q<HTMLInputElement>(root, selector);
  input.value = value;
  input.dispatchEvent(new Event("input", { bubbles: true }));
}

function clickButtonByText(root: HTMLElement, text: string): void {
  const button = [...root.querySelectorAll("button")].find((b) => b.textContent === text);
  if (!button) throw new Error(`missing button ${text}`);
  (button as HTMLButtonElement).click();
}

describe("wizard gating end to end", () => {
  let root: HTMLElement;

  beforeEach(() => {
    document.body.innerHTML = "";
    root = document.createElement("div");
    document.body.appendChild(root);
    // jsdom cannot navigate; cancel default actions (anchor download click)
    // without interfering with the wizard's own listeners.
    document.addEventListener("click", (e) => e.preventDefault(), true);
  });

  it("keeps export locked until a passing report exists, then unlocks", async () => {
    const { api, calls } = fakeApi();
    const store = mountWizard(root, { api, debounceMs: 0 });
    await tick();

    // Fresh session: only stage 1 reachable, export control disabled.
    expect(q<HTMLButtonElement>(root, 'button[data-stage="5"]').disabled).toBe(true);
    store.set({ stage: 5 });
    expect(q<HTMLButtonElement>(root, "#export-download").disabled).toBe(true);
    expect(q<HTMLButtonElement>(root, "#export-copy").disabled).toBe(true);
    store.set({ stage: 1 });

    // Stage 1: facts.
    setInput(root, 'input[data-attr="audience"]', "b2b");
    q<HTMLButtonElement>(root, "#fetch-recommendations").click();
    await tick();
    expect(store.get().stage).toBe(2);
    expect(root.textContent).toContain("demo_tpl");
    expect(root.textContent).toContain("match_b2b_audience");

    // Stage 2 -> 3: select the recommended template.
    clickButtonByText(root, "Use this template");
    expect(store.get().stage).toBe(3);
    expect(q<HTMLButtonElement>(root, 'button[data-stage="5"]').disabled).toBe(true);

    // Stage 3: bind slots; local counters update immediately.
    setInput(root, 'input[data-slot="pain"]', "slow builds");
    setInput(root, 'input[data-slot="product"]', "Acme");
    const counter = q<HTMLElement>(root, 'span[data-part="title"]');
    expect(counter.dataset.status).toBe("ok");
    await tick();
    await tick();
    expect(calls.validate).toBeGreaterThan(0);
    expect(store.get().lastReport?.verdict).toBe("pass");
    expect(store.get().dirty).toBe(false);

    // All gates open now.
    const nav5 = q<HTMLButtonElement>(root, 'button[data-stage="5"]');
    expect(nav5.disabled).toBe(false);
    nav5.click();
    expect(store.get().stage).toBe(5);
    expect(q<HTMLButtonElement>(root, "#export-download").disabled).toBe(false);

    // Download goes through the render endpoint.
    const originalCreate = URL.createObjectURL;
    const originalRevoke = URL.revokeObjectURL;
    URL.createObjectURL = () => "blob:fake";
    URL.revokeObjectURL = () => {};
    try {
      q<HTMLButtonElement>(root, "#export-download").click();
      await tick();
      expect(calls.render).toBe(1);
    } finally {
      URL.createObjectURL = originalCreate;
      URL.revokeObjectURL = originalRevoke;
    }
  });

  it("a failing report keeps export locked", async () => {
    const { api } = fakeApi();
    const store = mountWizard(root, { api, debounceMs: 0 });
    await tick();

    setInput(root, 'input[data-attr="audience"]', "b2b");
    q<HTMLButtonElement>(root, "#fetch-recommendations").click();
    await tick();
    clickButtonByText(root, "Use this template");

    // 61+ symbols in the title: "Is " + 60 + " bad?" blows the 60 budget.
    setInput(root, 'input[data-slot="pain"]', "x".repeat(60));
    setInput(root, 'input[data-slot="product"]', "Acme");
    expect(q<HTMLElement>(root, 'span[data-part="title"]').dataset.status).toBe("over");
    await tick();
    await tick();
    expect(store.get().lastReport?.verdict).toBe("fail");
    expect(q<HTMLButtonElement>(root, 'button[data-stage="5"]').disabled).toBe(true);
    store.set({ stage: 5 });
    expect(q<HTMLButtonElement>(root, "#export-download").disabled).toBe(true);
  });

  it("editing bindings after a pass marks the report stale and relocks export", async () => {
    const { api } = fakeApi();
    const store = mountWizard(root, { api, debounceMs: 0 });
    await tick();

    setInput(root, 'input[data-attr="audience"]', "b2b");
    q<HTMLButtonElement>(root, "#fetch-recommendations").click();
    await tick();
    clickButtonByText(root, "Use this template");
    setInput(root, 'input[data-slot="pain"]', "slow builds");
    setInput(root, 'input[data-slot="product"]', "Acme");
    await tick();
    await tick();
    expect(store.get().lastReport?.verdict).toBe("pass");
    expect(q<HTMLButtonElement>(root, 'button[data-stage="5"]').disabled).toBe(false);

    // Mutate a binding: dirty until the next report lands.
    const input = q<HTMLInputElement>(root, 'input[data-slot="pain"]');
    input.value = "slightly different";
    input.dispatchEvent(new Event("input", { bubbles: true }));
    expect(store.get().dirty).toBe(true);
    expect(q<HTMLButtonElement>(root, 'button[data-stage="5"]').disabled).toBe(true);
    await tick();
    await tick();
    expect(store.get().dirty).toBe(false);
    expect(q<HTMLButtonElement>(root, 'button[data-stage="5"]').disabled).toBe(false);
  });

  it("reselection invalidates in-flight validation for the old template", async () => {
    const { api } = fakeApi();
    let resolveValidate: ((v: ValidateResponse) => void) | null = null;
    const slowApi: ApiClient = {
      ...api,
      validate: (_t, bindings) =>
        new Promise<ValidateResponse>((resolve) => {
          resolveValidate = (v) => resolve(v ?? fakeValidate(bindings));
        }),
    };
    const store = mountWizard(root, { api: slowApi, debounceMs: 0 });
    await tick();

    setInput(root, 'input[data-attr="audience"]', "b2b");
    q<HTMLButtonElement>(root, "#fetch-recommendations").click();
    await tick();
    clickButtonByText(root, "Use this template");
    setInput(root, 'input[data-slot="pain"]', "slow");
    setInput(root, 'input[data-slot="product"]', "Acme");
    await tick();

    // Reselect while the validate call is still in flight.
    store.set({ stage: 2 });
    clickButtonByText(root, "Use this template");
    const stale = resolveValidate as ((v: ValidateResponse) => void) | null;
    expect(stale).not.toBeNull();
    stale!(fakeValidate({ pain: "slow", product: "Acme" }));
    await tick();
    // The stale response must not attach a report to the fresh selection.
    expect(store.get().lastReport).toBeNull();
  });
});

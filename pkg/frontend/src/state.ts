// Wizard state and the stage-gating rules. The whole view renders from this
// state alone, so serializing it is enough to restore a session.

import type { FactValue, RecommendResponse, TemplateInfo, ValidateResponse } from "./api.js";

export const CANONICAL_PART_ORDER = [
  "tagline",
  "title",
  "main_text",
  "reference_info",
  "echo_phrase",
] as const;

export const STAGES = [
  "Describe the product and audience",
  "Review recommended templates",
  "Fill the template slots",
  "Validate against the channel",
  "Export the message",
] as const;

export interface WizardState {
  stage: number; // 1-based, 1..5
  facts: Record<string, FactValue>;
  rulesetId: string;
  recommendations: RecommendResponse | null;
  selectedTemplate: string | null;
  bindings: Record<string, string>;
  lastReport: ValidateResponse | null;
  // True whenever bindings changed after the last report came back; a stale
  // pass must not enable export.
  dirty: boolean;
}

export function initialState(): WizardState {
  return {
    stage: 1,
    facts: {},
    rulesetId: "demo",
    recommendations: null,
    selectedTemplate: null,
    bindings: {},
    lastReport: null,
    dirty: false,
  };
}

export function slotsOf(template: TemplateInfo): string[] {
  const seen = new Set<string>();
  const names: string[] = [];
  for (const slot of template.slots) {
    if (!seen.has(slot.name)) {
      seen.add(slot.name);
      names.push(slot.name);
    }
  }
  return names;
}

export function allSlotsBound(state: WizardState, template: TemplateInfo | null): boolean {
  if (!template) return false;
  return slotsOf(template).every((name) => (state.bindings[name] ?? "") !== "");
}

export function reportIsCurrentPass(state: WizardState): boolean {
  return !state.dirty && state.lastReport !== null && state.lastReport.verdict === "pass";
}

/** Completion predicate of one stage, the gate for entering the next. */
export function stageComplete(state: WizardState, stage: number, template: TemplateInfo | null): boolean {
  switch (stage) {
    case 1:
      return Object.keys(state.facts).length > 0;
    case 2:
      return state.recommendations !== null;
    case 3:
      return state.selectedTemplate !== null;
    case 4:
      return allSlotsBound(state, template) && reportIsCurrentPass(state);
    case 5:
      return false; // nothing beyond export
    default:
      return false;
  }
}

export function canEnterStage(state: WizardState, target: number, template: TemplateInfo | null): boolean {
  if (target < 1 || target > STAGES.length) return false;
  for (let s = 1; s < target; s++) {
    if (!stageComplete(state, s, template)) return false;
  }
  return true;
}

export function exportEnabled(state: WizardState): boolean {
  return reportIsCurrentPass(state);
}

export function serializeState(state: WizardState): string {
  return JSON.stringify(state);
}

export function restoreState(raw: string): WizardState {
  const parsed = JSON.parse(raw) as WizardState;
  return { ...initialState(), ...parsed };
}

export type Listener = () => void;

export class Store {
  private state: WizardState;
  private listeners: Listener[] = [];

  constructor(state: WizardState = initialState()) {
    this.state = state;
  }

  get(): WizardState {
    return this.state;
  }

  set(patch: Partial<WizardState>): void {
    this.state = { ...this.state, ...patch };
    for (const fn of this.listeners) fn();
  }

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }
}

// Typed client over the JSON API (see docs/api.md in the repository root).

export type FactValue = string | number | boolean;

export interface BudgetInfo {
  base: number;
  extension: number;
}

export interface ChannelInfo {
  id: string;
  display_name: string;
  budgets: Record<string, BudgetInfo>;
  required: string[];
}

export interface TemplatePart {
  kind: string;
  semantics: string[];
  format: string;
  budget: BudgetInfo;
  text: string;
}

export interface SlotInfo {
  name: string;
  part: string;
  line: number;
  column: number;
}

export interface TemplateInfo {
  id: string;
  channel: string;
  metadata: Record<string, FactValue>;
  parts: TemplatePart[];
  slots: SlotInfo[];
}

export interface RulesetInfo {
  id: string;
  rules: number;
  condition_attributes: string[];
}

export interface FactPair {
  attr: string;
  value: FactValue;
}

export interface RuleFiring {
  rule_id: string;
  asserted: FactPair[];
}

export interface RecommendationInfo {
  template_id: string;
  score: number;
  matched: FactPair[];
  unmatched: FactPair[];
}

export interface RecommendResponse {
  facts: Record<string, FactValue>;
  ruleset_id: string;
  k: number;
  derived: FactPair[];
  trace: RuleFiring[];
  recommendations: RecommendationInfo[];
}

export interface ViolationInfo {
  part: string;
  rule: string;
  severity: "error" | "warning";
  detail: string;
  count?: number;
  limit?: number;
}

export interface ValidatedPart {
  kind: string;
  text: string;
  count: number;
  base: number;
  extension: number;
  limit: number;
  status: "within_base" | "within_extension" | "exceeded";
}

export interface ValidateResponse {
  template_id: string;
  channel_id: string;
  verdict: "pass" | "fail";
  parts: ValidatedPart[];
  violations: ViolationInfo[];
  unused_bindings: string[];
}

export interface RenderResponse {
  template_id: string;
  channel_id: string;
  bindings: Record<string, string>;
  unused_bindings: string[];
  parts: { kind: string; text: string }[];
  plain_text: string;
  report: { verdict: "pass" | "fail"; violations: ViolationInfo[] };
}

export interface ConfigResponse {
  api_base: string;
  validate_debounce_ms: number;
}

export class ApiError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly details: Record<string, unknown> = {},
    readonly status = 0,
  ) {
    super(message);
  }
}

async function parseError(resp: Response): Promise<never> {
  let body: { code?: string; message?: string; details?: Record<string, unknown> } = {};
  try {
    body = await resp.json();
  } catch {
    // non-JSON error body; fall through to a generic error
  }
  throw new ApiError(
    body.code ?? "http_error",
    body.message ?? `request failed with status ${resp.status}`,
    body.details ?? {},
    resp.status,
  );
}

export interface ApiClient {
  config(): Promise<ConfigResponse>;
  channels(): Promise<ChannelInfo[]>;
  templates(): Promise<TemplateInfo[]>;
  rulesets(): Promise<RulesetInfo[]>;
  recommend(facts: Record<string, FactValue>, rulesetId?: string, k?: number): Promise<RecommendResponse>;
  validate(templateId: string, bindings: Record<string, string>, channelId: string): Promise<ValidateResponse>;
  render(templateId: string, bindings: Record<string, string>, channelId: string): Promise<RenderResponse>;
}

export function makeApiClient(base: string, fetchFn: typeof fetch = fetch): ApiClient {
  async function get<T>(path: string): Promise<T> {
    const resp = await fetchFn(`${base}${path}`);
    if (!resp.ok) await parseError(resp);
    return resp.json() as Promise<T>;
  }
  async function post<T>(path: string, body: unknown): Promise<T> {
    const resp = await fetchFn(`${base}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) await parseError(resp);
    return resp.json() as Promise<T>;
  }
  return {
    config: () => get<ConfigResponse>("/config"),
    channels: async () => (await get<{ channels: ChannelInfo[] }>("/channels")).channels,
    templates: async () => (await get<{ templates: TemplateInfo[] }>("/templates")).templates,
    rulesets: async () => (await get<{ rulesets: RulesetInfo[] }>("/rulesets")).rulesets,
    recommend: (facts, rulesetId, k) => {
      const body: Record<string, unknown> = { facts };
      if (rulesetId !== undefined) body.ruleset_id = rulesetId;
      if (k !== undefined) body.k = k;
      return post<RecommendResponse>("/recommend", body);
    },
    validate: (templateId, bindings, channelId) =>
      post<ValidateResponse>("/validate", {
        template_id: templateId,
        bindings,
        channel_id: channelId,
      }),
    render: (templateId, bindings, channelId) =>
      post<RenderResponse>("/render", {
        template_id: templateId,
        bindings,
        channel_id: channelId,
      }),
  };
}

// Typed client for the curation service. Every mutation sends the version
// it read; a stale version surfaces as ConflictError so the UI can prompt
// a reload instead of overwriting someone else's edit.

export interface Intervention {
  id: string;
  text: string;
  target: string;
}

export interface RuleRow {
  id: string;
  lhs: string;
  item_keys: string[];
  class_value: string;
  support: number;
  confidence: number;
  kept: boolean;
  reviewer: string;
  interventions: Intervention[];
  suggestions: Intervention[];
  actionable: boolean;
  version: number;
}

export interface RulePage {
  total: number;
  page: number;
  page_size: number;
  rules: RuleRow[];
}

export interface ItemRow {
  item_id: string;
  feature: string;
  rendered: string;
  interventions: Intervention[];
  category: string;
  actionable: boolean;
  version: number;
}

export interface Stats {
  stage_counts: number[];
  total_rules: number;
  kept: number;
  removed: number;
  actionable: number;
  unreviewed: number;
}

export interface Weights {
  weights: Record<string, number>;
  version: number;
}

export class ConflictError extends Error {
  constructor(detail: string) {
    super(detail);
    this.name = "ConflictError";
  }
}

function apiBase(): string {
  const override = (globalThis as { RULELENS_API_BASE?: string }).RULELENS_API_BASE;
  if (override) return override;
  // Opened from disk during development: talk to the default service port.
  if (typeof location !== "undefined" && location.protocol === "file:") {
    return "http://127.0.0.1:8321";
  }
  return "";
}

async function request<T>(path: string, init: RequestInit = {}): Promise<T> {
  const res = await fetch(`${apiBase()}${path}`, {
    ...init,
    headers: { Accept: "application/json", ...(init.headers || {}) },
  });
  if (res.status === 409) {
    const body = await res.json().catch(() => ({ detail: "edit conflict" }));
    throw new ConflictError(String(body.detail ?? "edit conflict"));
  }
  if (!res.ok) {
    const text = await res.text().catch(() => "");
    throw new Error(text || `HTTP ${res.status}`);
  }
  return res.json() as Promise<T>;
}

function jsonInit(method: string, body: unknown): RequestInit {
  return {
    method,
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  };
}

export interface RuleQuery {
  page?: number;
  page_size?: number;
  sort?: string;
  kept?: boolean;
  actionable?: boolean;
}

export function listRules(query: RuleQuery = {}): Promise<RulePage> {
  const params = new URLSearchParams();
  for (const [key, value] of Object.entries(query)) {
    if (value !== undefined) params.set(key, String(value));
  }
  const qs = params.toString();
  return request<RulePage>(`/rules${qs ? `?${qs}` : ""}`);
}

export function getRule(id: string): Promise<RuleRow> {
  return request<RuleRow>(`/rules/${encodeURIComponent(id)}`);
}

export interface RulePatch {
  version: number;
  kept?: boolean;
  interventions?: Intervention[];
  reviewer?: string;
}

export function patchRule(id: string, patch: RulePatch): Promise<RuleRow> {
  return request<RuleRow>(`/rules/${encodeURIComponent(id)}`, jsonInit("PATCH", patch));
}

export function listItems(): Promise<ItemRow[]> {
  return request<ItemRow[]>("/items");
}

export interface ItemPut {
  version: number;
  interventions?: Intervention[];
  category?: string;
}

export function putItem(itemId: string, body: ItemPut): Promise<ItemRow> {
  return request<ItemRow>(`/items/${encodeURIComponent(itemId)}`, jsonInit("PUT", body));
}

export function getWeights(): Promise<Weights> {
  return request<Weights>("/category-weights");
}

export function putWeights(body: Weights): Promise<Weights> {
  return request<Weights>("/category-weights", jsonInit("PUT", body));
}

export function getStats(): Promise<Stats> {
  return request<Stats>("/stats");
}

export function exportClassifier(path?: string): Promise<{
  path: string;
  total: number;
  actionable: number;
  unreviewed: number;
}> {
  return request("/export", jsonInit("POST", path ? { path } : {}));
}

// Designer-authored interventions need ids unique within the store.
let idCounter = 0;
export function interventionId(text: string): string {
  const slug = text.toLowerCase().replace(/[^a-z0-9]+/g, "-").replace(/^-|-$/g, "").slice(0, 40);
  idCounter += 1;
  return `iv-${slug || "note"}-${Date.now().toString(36)}${idCounter}`;
}

// Generated by scripts/generate_api_types.py; do not edit by hand.

export const CATEGORY_SUBTYPES: Record<string, string[]> = {
  "market": [
    "new-competitive-goods",
    "new-segment",
    "partner-financial-change"
  ],
  "production": [
    "emergency",
    "equipment-damage",
    "infrastructure-failure"
  ],
  "region": [
    "fx-change",
    "customs-change",
    "tax-change",
    "political-crisis",
    "energy-crisis",
    "ecocatastrophe"
  ]
};

export const EVENT_STATUSES: string[] = ["signal", "occurred"];

export const SUPPORTED_SCHEMA_VERSIONS: number[] = [1];

export type SessionState = "running" | "awaiting-answer" | "done" | "failed";

export interface Question {
  question_id: string;
  text: string;
  kind: string;
}

export interface SessionInfo {
  id: string;
  package: string;
  event_id: string;
  state: SessionState;
  question: Question | null;
  questions_asked: Question[];
  error?: string;
}

export interface Money {
  amount: string;
  currency: string;
}

export interface ExpenseItem {
  label: string;
  quantity: number;
  unit_cost: Money;
  amount: Money;
}

export interface ExpenseSheet {
  items: ExpenseItem[];
  total: Money;
}

export interface Measure {
  id: string;
  description: string;
  duration_days: number;
  prerequisites: string[];
  assets: string[];
  start_day: number;
  end_day: number;
  expenses: ExpenseSheet;
}

export interface Consequences {
  lost_output: {
    asset: string;
    product: string;
    volume: number;
    unit: string;
    downtime_days: number;
  }[];
  sale_volume_change: Money;
  penalties: Money;
  breached_contracts: string[];
  account_payable_increase: Money;
  total: Money;
  unquantified: string[];
  narrative: string;
}

export interface Proposition {
  kind: string;
  description: string;
  evidence: string[];
}

export interface TraceNode {
  goal: string;
  status: "proven" | "failed" | "pending";
  clause: number | null;
  builtin: boolean;
  preorder: number;
  children: TraceNode[];
}

export interface DecisionTablePayload {
  variants: string[];
  situations: string[];
  values: number[][];
  probabilities: number[] | null;
}

export interface ChoiceResponse {
  criterion: string;
  variant: string;
  variant_index: number;
  value: number;
  per_variant: number[];
}

export interface ConsequenceChoice extends ChoiceResponse {
  table: DecisionTablePayload;
}

export interface Report {
  schema_version: number;
  event: Record<string, unknown>;
  category: string;
  subtype: string;
  branch?: string;
  threat?: { method: string; outcome: string; probability: number; level: string };
  preventive?: { consequences?: string[]; proposals?: string[] };
  description?: Record<string, unknown>;
  measures?: Measure[];
  expense_total?: ExpenseSheet;
  causes?: { version: string; status: string; evidence: TraceNode | null }[];
  consequences?: Consequences;
  plan_correction?: Record<string, unknown>;
  market?: Record<string, unknown> & { consequences?: Partial<ConsequenceChoice> };
  regional?: Record<string, unknown>;
  propositions: Proposition[];
  warnings: string[];
  goal_tree: TraceNode;
}

export interface JournalEntry {
  type: "created" | "question" | "answer" | "done" | "failed";
  session: string;
  [key: string]: unknown;
}

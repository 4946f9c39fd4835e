/**
 * Typed client for the approval gateway's HTTP contract.
 *
 * The console talks to exactly three endpoints: GET /pending,
 * POST /decisions/{token}, GET /runs/{run_id}/log. Everything else the UI
 * shows is derived from those responses, never invented locally.
 */

export interface BeliefLabel {
  src: string;
  int: string;
  age: number;
  path: string[];
}

export interface TrustEval {
  belief_id: string;
  lambda: BeliefLabel;
  tau_epi: number;
  tau_prov: string;
  trust: "High" | "Low";
  unverifiable?: boolean;
}

export interface ActionSummary {
  name: string;
  args: Record<string, string>;
  target: string;
}

export interface PendingDecision {
  token: string;
  run_id: string;
  created_ts: number;
  deadline_ts: number;
  action: ActionSummary;
  trust_evals: TrustEval[];
  risk: "High" | "Low";
}

export interface VerdictAck {
  token: string;
  run_id: string;
  status: "Executed" | "Denied";
}

export type Verdict = "APPROVE" | "DENY";

/** Error carrying the gateway's HTTP status (404 unknown, 409 resolved, 410 expired). */
export class GatewayConflict extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class GatewayApi {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async listPending(): Promise<PendingDecision[]> {
    const resp = await this.fetchImpl(`${this.baseUrl}/pending`);
    if (!resp.ok) {
      throw new Error(`gateway returned ${resp.status}`);
    }
    return (await resp.json()) as PendingDecision[];
  }

  async submitVerdict(token: string, verdict: Verdict, approver: string): Promise<VerdictAck> {
    const resp = await this.fetchImpl(`${this.baseUrl}/decisions/${encodeURIComponent(token)}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ verdict, approver }),
    });
    if (resp.status === 404 || resp.status === 409 || resp.status === 410) {
      const detail = await resp.text();
      throw new GatewayConflict(resp.status, detail);
    }
    if (!resp.ok) {
      throw new Error(`gateway returned ${resp.status}`);
    }
    return (await resp.json()) as VerdictAck;
  }

  async fetchRunLog(runId: string): Promise<string[]> {
    const resp = await this.fetchImpl(`${this.baseUrl}/runs/${encodeURIComponent(runId)}/log`);
    if (!resp.ok) {
      throw new Error(`gateway returned ${resp.status}`);
    }
    const text = await resp.text();
    return text.split("\n").filter((line) => line.length > 0);
  }
}

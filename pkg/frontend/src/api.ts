/**
 * Typed client for the problem/candidate/selection/vote/generate endpoints.
 *
 * Candidate payloads carry api_id, name and description only; the client
 * neither requests nor forwards API signatures anywhere.
 */

export interface ProblemSummary {
  problem_id: string;
  benchmark: string;
  description: string;
  context: string;
}

export interface Candidate {
  api_id: string;
  name: string;
  description: string;
}

export interface SelectionAck {
  ok: boolean;
  voters: number;
}

export interface VoteResult {
  problem_id: string;
  api_ids: string[];
  voters: number;
  threshold: number;
}

export interface GenerateResult {
  problem_id: string;
  prompted_api_ids: string[];
  temperature: number;
  n: number;
  c: number;
  verdicts: string[];
  pass_at_1: number;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function errorDetail(response: Response): Promise<string> {
  try {
    const body = await response.json();
    if (typeof body?.detail === "string") return body.detail;
    return JSON.stringify(body);
  } catch {
    return response.statusText || `HTTP ${response.status}`;
  }
}

export class ServiceClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      throw new ApiError(response.status, await errorDetail(response));
    }
    return (await response.json()) as T;
  }

  listProblems(): Promise<ProblemSummary[]> {
    return this.request<ProblemSummary[]>("/problems");
  }

  async candidates(problemId: string, k = 5): Promise<Candidate[]> {
    const payload = await this.request<{ candidates: Candidate[] }>(
      `/problems/${encodeURIComponent(problemId)}/candidates?k=${k}`,
    );
    return payload.candidates;
  }

  submitSelection(
    problemId: string,
    userId: string,
    apiIds: string[],
  ): Promise<SelectionAck> {
    return this.request<SelectionAck>(
      `/problems/${encodeURIComponent(problemId)}/selections`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ user_id: userId, api_ids: apiIds }),
      },
    );
  }

  vote(problemId: string): Promise<VoteResult> {
    return this.request<VoteResult>(
      `/problems/${encodeURIComponent(problemId)}/vote`,
    );
  }

  generate(problemId: string, n = 4, temperature = 0.2): Promise<GenerateResult> {
    return this.request<GenerateResult>(
      `/problems/${encodeURIComponent(problemId)}/generate`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ n, temperature }),
      },
    );
  }
}

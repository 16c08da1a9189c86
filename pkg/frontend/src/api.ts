/**
 * Typed client for the curation service HTTP API.
 *
 * The service owns all state; this client only moves payloads. Every
 * failure surfaces as an ApiError with the service's own message when
 * one is available, so views can show it verbatim.
 */

export type CandidateStatus = "pending" | "accepted" | "rejected";

export interface ConceptOption {
  concept: number;
  kind: string;
  score: number;
  term: string;
}

export interface Candidate {
  id: string;
  surface: string;
  normalized: string;
  span: [number, number];
  sentence: string;
  section_index: number;
  sentence_index: number;
  section_kind: string;
  matched: boolean;
  candidates: ConceptOption[];
  status: CandidateStatus;
  concept: number | null;
}

export interface GraphNode {
  id: string;
  kind: string;
  label: string | null;
  concept: number | null;
  flavor: string | null;
  curated: boolean;
}

export interface GraphEdge {
  src: string;
  rel: string;
  partition: string;
  dst: string;
  literal?: boolean;
}

export interface GraphPayload {
  nodes: GraphNode[];
  edges: GraphEdge[];
}

export interface BuildReportPayload {
  partition_counts: Record<string, number>;
  unmatched_phrases: string[];
  overridden_mappings: string[];
  skipped_sentences: number[];
}

export interface ViolationPayload {
  rule: string;
  elements: string[];
  message: string;
}

export interface DecisionResult {
  revision: number;
  candidate: Candidate;
}

export class ApiError extends Error {
  readonly status: number | null;

  constructor(message: string, status: number | null = null) {
    super(message);
    this.name = "ApiError";
    this.status = status;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(base = "", fetchImpl?: FetchLike) {
    this.base = base.replace(/\/$/, "");
    // wrap the global so the call never depends on a bound `this`
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.base + path, init);
    } catch (exc) {
      throw new ApiError(`service unreachable: ${String(exc)}`);
    }
    if (!response.ok) {
      let message = `${response.status} ${response.statusText}`.trim();
      try {
        const body: unknown = await response.json();
        if (body && typeof body === "object" && "error" in body) {
          message = String((body as { error: unknown }).error);
        }
      } catch {
        // non-JSON error body; keep the status line
      }
      throw new ApiError(message, response.status);
    }
    try {
      return (await response.json()) as T;
    } catch (exc) {
      throw new ApiError(`malformed response from ${path}: ${String(exc)}`);
    }
  }

  candidates(status?: CandidateStatus): Promise<Candidate[]> {
    const query = status === undefined ? "" : `?status=${encodeURIComponent(status)}`;
    return this.request(`/api/candidates${query}`);
  }

  decide(
    id: string,
    status: "accepted" | "rejected",
    concept: number | null = null,
  ): Promise<DecisionResult> {
    // rejections must not carry a concept; omit the key rather than send null
    const body: Record<string, unknown> = { id, status };
    if (concept !== null) {
      body.concept = concept;
    }
    return this.request("/api/decisions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  preview(): Promise<BuildReportPayload> {
    return this.request("/api/preview");
  }

  graph(): Promise<GraphPayload> {
    return this.request("/api/graph");
  }

  validate(): Promise<ViolationPayload[]> {
    return this.request("/api/validate");
  }
}

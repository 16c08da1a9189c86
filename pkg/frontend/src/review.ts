/**
 * Review queue view-model and its HTML fragments.
 *
 * Everything here is DOM-free: state transitions call the API client and
 * the render helpers return markup strings, so the whole module runs under
 * plain node tests. The service stays authoritative; after every decision
 * the queue is re-fetched rather than patched locally.
 */

import { ApiClient, Candidate, CandidateStatus, ConceptOption } from "./api.js";

export type QueueFilter = CandidateStatus | "all";

export interface ReviewState {
  items: Candidate[];
  filter: QueueFilter;
  error: string | null;
  revision: number | null;
  loaded: boolean;
}

export function emptyState(): ReviewState {
  return { items: [], filter: "pending", error: null, revision: null, loaded: false };
}

export function visibleItems(state: ReviewState): Candidate[] {
  if (state.filter === "all") {
    return state.items;
  }
  return state.items.filter((item) => item.status === state.filter);
}

export interface QueueSummary {
  total: number;
  pending: number;
  accepted: number;
  rejected: number;
}

export function queueSummary(items: Candidate[]): QueueSummary {
  const summary: QueueSummary = { total: items.length, pending: 0, accepted: 0, rejected: 0 };
  for (const item of items) {
    summary[item.status] += 1;
  }
  return summary;
}

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

/** Sentence with the candidate's phrase wrapped in a <mark> element. */
export function highlightSpan(sentence: string, span: [number, number]): string {
  const [start, end] = span;
  if (start < 0 || end > sentence.length || start >= end) {
    return escapeHtml(sentence);
  }
  return (
    escapeHtml(sentence.slice(0, start)) +
    "<mark>" +
    escapeHtml(sentence.slice(start, end)) +
    "</mark>" +
    escapeHtml(sentence.slice(end))
  );
}

function optionLabel(option: ConceptOption): string {
  return `${option.term} · ${option.kind} ${option.concept} · ${option.score.toFixed(1)}`;
}

function statusChip(item: Candidate): string {
  if (item.status === "accepted") {
    const target = item.concept === null ? "as written" : `concept ${item.concept}`;
    return `<span class="chip accepted">accepted ${escapeHtml(target)}</span>`;
  }
  if (item.status === "rejected") {
    return '<span class="chip rejected">rejected</span>';
  }
  return '<span class="chip pending">pending</span>';
}

function decisionButtons(item: Candidate): string {
  const accepts = item.candidates.map(
    (option) =>
      `<button data-action="accept" data-id="${escapeHtml(item.id)}" ` +
      `data-concept="${option.concept}">accept ${escapeHtml(optionLabel(option))}</button>`,
  );
  accepts.push(
    `<button data-action="accept" data-id="${escapeHtml(item.id)}">accept as written</button>`,
  );
  accepts.push(
    `<button data-action="reject" data-id="${escapeHtml(item.id)}">reject</button>`,
  );
  return accepts.join("\n      ");
}

export function renderCandidate(item: Candidate): string {
  const meta =
    `${escapeHtml(item.section_kind)} · sentence ${item.sentence_index}` +
    (item.matched ? "" : " · no terminology match");
  const actions = item.status === "pending" ? `\n    <div class="actions">\n      ${decisionButtons(item)}\n    </div>` : "";
  return `<article class="candidate ${item.status}" data-id="${escapeHtml(item.id)}">
    <header>
      <strong>${escapeHtml(item.surface)}</strong>
      ${statusChip(item)}
      <span class="meta">${meta}</span>
    </header>
    <p class="sentence">${highlightSpan(item.sentence, item.span)}</p>${actions}
  </article>`;
}

const EMPTY_MESSAGES: Record<QueueFilter, string> = {
  pending: "No pending candidates. Every phrase is resolved.",
  accepted: "No accepted candidates yet.",
  rejected: "No rejected candidates.",
  all: "The queue is empty.",
};

export function renderQueue(state: ReviewState): string {
  const items = visibleItems(state);
  if (items.length === 0) {
    return `<p class="empty-state">${EMPTY_MESSAGES[state.filter]}</p>`;
  }
  return items.map(renderCandidate).join("\n");
}

export function renderSummary(items: Candidate[]): string {
  const s = queueSummary(items);
  return `${s.total} candidates · ${s.pending} pending · ${s.accepted} accepted · ${s.rejected} rejected`;
}

/**
 * Queue state machine. Each decision is exactly one POST; a failed call
 * leaves the last known queue on screen and records the error for the
 * banner instead of retrying.
 */
export class ReviewModel {
  readonly state: ReviewState;
  private readonly api: ApiClient;

  constructor(api: ApiClient) {
    this.api = api;
    this.state = emptyState();
  }

  async refresh(): Promise<void> {
    try {
      this.state.items = await this.api.candidates();
      this.state.loaded = true;
      this.state.error = null;
    } catch (exc) {
      this.state.error = exc instanceof Error ? exc.message : String(exc);
    }
  }

  async decide(
    id: string,
    status: "accepted" | "rejected",
    concept: number | null = null,
  ): Promise<boolean> {
    try {
      const result = await this.api.decide(id, status, concept);
      this.state.revision = result.revision;
      this.state.error = null;
    } catch (exc) {
      this.state.error = exc instanceof Error ? exc.message : String(exc);
      return false;
    }
    await this.refresh();
    return true;
  }

  setFilter(filter: QueueFilter): void {
    this.state.filter = filter;
  }
}

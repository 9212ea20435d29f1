import { ApiError, ExpertApi, validateResponse } from "./api";
import { EventStream } from "./events";
import { Store } from "./store";
import type { ConnectionState, ExpertRequest, Verdict } from "./types";

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function describeApiError(err: unknown): string {
  if (err instanceof ApiError) {
    if (err.isConflict) return `Lost the race: ${err.message}`;
    if (err.isExpired) return "This request expired before it was answered.";
    if (err.status === 0) return err.message;
    return `Request failed (${err.status}): ${err.message}`;
  }
  return String(err);
}

export function bannerFor(state: ConnectionState): string {
  if (state === "open") return "";
  const label = state === "connecting" ? "Connecting to the expert service…" : "Connection lost, retrying…";
  return `<div class="banner banner-${state}" role="status">${label}</div>`;
}

export function renderQueueItem(req: ExpertRequest, position: number | null, selected: boolean): string {
  const posBadge = position !== null ? `<span class="position">#${position}</span>` : "";
  const claimBadge = req.claimed_by
    ? `<span class="claimed-by">claimed by ${escapeHtml(req.claimed_by)}</span>`
    : "";
  return `<li class="request status-${req.status}${selected ? " selected" : ""}" data-id="${req.id}">
    ${posBadge}
    <span class="question">${escapeHtml(req.question)}</span>
    <span class="status">${req.status}</span>
    ${claimBadge}
  </li>`;
}

export function renderQueue(store: Store): string {
  const all = store.all();
  if (all.length === 0) {
    return `<p class="empty-state">No requests yet. Incoming questions appear here as agents ask them.</p>`;
  }
  const selectedId = store.getState().selectedId;
  const items = all
    .map((req) => renderQueueItem(req, store.queuePosition(req.id), req.id === selectedId))
    .join("\n");
  return `<ul class="queue">${items}</ul>`;
}

export function renderDetail(req: ExpertRequest | null, errorText: string): string {
  if (req === null) {
    return `<p class="empty-state">Select a request to review it.</p>`;
  }
  const context = req.context == null ? "" : `<pre class="context">${escapeHtml(JSON.stringify(req.context, null, 2))}</pre>`;
  const answered = req.response
    ? `<div class="answer">
         <span class="verdict verdict-${req.response.verdict}">${req.response.verdict}</span>
         <p>${escapeHtml(req.response.text)}</p>
         <span class="by">answered by ${escapeHtml(req.response.expert_id)}</span>
       </div>`
    : "";
  const form =
    req.status === "pending" || req.status === "claimed"
      ? `<form id="respond-form" data-id="${req.id}">
           <button type="button" id="claim-button">Claim</button>
           <label>Verdict
             <select id="verdict">
               <option value="approve">approve</option>
               <option value="reject">reject</option>
               <option value="free-text">free-text</option>
             </select>
           </label>
           <label>Answer <textarea id="answer-text"></textarea></label>
           <button type="submit">Send response</button>
         </form>`
      : "";
  const error = errorText ? `<p class="form-error" role="alert">${escapeHtml(errorText)}</p>` : "";
  return `<section class="detail">
    <h2>${escapeHtml(req.question)}</h2>
    <span class="status">${req.status}</span>
    ${context}
    ${answered}
    ${form}
    ${error}
  </section>`;
}

export interface AppOptions {
  expertId?: string;
  eventStreamOptions?: ConstructorParameters<typeof EventStream>[3];
}

/** Wires the store, API client and event stream to a root element. */
export class ExpertConsole {
  readonly store = new Store();
  readonly api: ExpertApi;
  private stream: EventStream;
  private formError = "";
  private readonly expertId: string;

  constructor(
    private readonly root: HTMLElement,
    baseUrl: string,
    options: AppOptions = {},
  ) {
    this.api = new ExpertApi(baseUrl);
    this.expertId = options.expertId ?? `expert-${Math.random().toString(36).slice(2, 8)}`;
    this.stream = new EventStream(
      this.api.eventsUrl(),
      (event) => this.store.applyEvent(event),
      (state) => this.store.setConnection(state),
      options.eventStreamOptions,
    );
    this.store.subscribe(() => this.render());
  }

  async start(): Promise<void> {
    this.stream.start();
    const snapshot = await this.api.listRequests();
    this.store.loadSnapshot(snapshot);
  }

  stop(): void {
    this.stream.stop();
  }

  async claim(id: string): Promise<void> {
    this.formError = "";
    try {
      const updated = await this.api.claim(id, this.expertId);
      this.store.upsert(updated);
    } catch (err) {
      this.formError = describeApiError(err);
      await this.refresh(id);
    }
    this.render();
  }

  async respond(id: string, verdict: Verdict, text: string): Promise<void> {
    const invalid = validateResponse(verdict, text);
    if (invalid !== null) {
      this.formError = invalid;
      this.render();
      return;
    }
    this.formError = "";
    try {
      await this.api.respond(id, verdict, text, this.expertId);
      await this.refresh(id);
    } catch (err) {
      this.formError = describeApiError(err);
      await this.refresh(id);
    }
    this.render();
  }

  private async refresh(id: string): Promise<void> {
    try {
      this.store.upsert(await this.api.getRequest(id));
    } catch {
      // the list stream will catch us up
    }
  }

  render(): void {
    const state = this.store.getState();
    this.root.innerHTML = `
      ${bannerFor(state.connection)}
      <main class="layout">
        <nav class="queue-pane">${renderQueue(this.store)}</nav>
        <article class="detail-pane">${renderDetail(this.store.selected(), this.formError)}</article>
      </main>`;
    this.bind();
  }

  private bind(): void {
    for (const item of Array.from(this.root.querySelectorAll<HTMLElement>("li.request"))) {
      item.addEventListener("click", () => {
        this.formError = "";
        this.store.select(item.dataset.id ?? null);
      });
    }
    const claimButton = this.root.querySelector<HTMLButtonElement>("#claim-button");
    const form = this.root.querySelector<HTMLFormElement>("#respond-form");
    if (claimButton && form) {
      claimButton.addEventListener("click", () => void this.claim(form.dataset.id ?? ""));
    }
    if (form) {
      form.addEventListener("submit", (event) => {
        event.preventDefault();
        const verdict = (this.root.querySelector<HTMLSelectElement>("#verdict")?.value ??
          "approve") as Verdict;
        const text = this.root.querySelector<HTMLTextAreaElement>("#answer-text")?.value ?? "";
        void this.respond(form.dataset.id ?? "", verdict, text);
      });
    }
  }
}

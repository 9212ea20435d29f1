import type { ConnectionState, ExpertRequest, RequestStatus, StreamEvent } from "./types";

export interface StoreState {
  requests: Map<string, ExpertRequest>;
  order: string[]; // creation order, oldest first
  connection: ConnectionState;
  selectedId: string | null;
}

type Listener = (state: StoreState) => void;

/** Single source of truth: snapshot loads and stream events both land here. */
export class Store {
  private state: StoreState = {
    requests: new Map(),
    order: [],
    connection: "connecting",
    selectedId: null,
  };
  private listeners = new Set<Listener>();

  getState(): StoreState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  /** Replace the request set from a full GET /api/requests snapshot. */
  loadSnapshot(requests: ExpertRequest[]): void {
    const map = new Map<string, ExpertRequest>();
    for (const req of requests) map.set(req.id, req);
    this.state = {
      ...this.state,
      requests: map,
      order: requests.map((r) => r.id),
    };
    this.emit();
  }

  /** Apply one SSE event; unseen ids are appended in arrival order. */
  applyEvent(event: StreamEvent): void {
    const requests = new Map(this.state.requests);
    const order = this.state.requests.has(event.request.id)
      ? this.state.order
      : [...this.state.order, event.request.id];
    requests.set(event.request.id, event.request);
    this.state = { ...this.state, requests, order };
    this.emit();
  }

  upsert(request: ExpertRequest): void {
    this.applyEvent({ kind: "created", request });
  }

  setConnection(connection: ConnectionState): void {
    if (connection === this.state.connection) return;
    this.state = { ...this.state, connection };
    this.emit();
  }

  select(id: string | null): void {
    this.state = { ...this.state, selectedId: id };
    this.emit();
  }

  byStatus(status: RequestStatus): ExpertRequest[] {
    return this.state.order
      .map((id) => this.state.requests.get(id))
      .filter((r): r is ExpertRequest => r !== undefined && r.status === status);
  }

  all(): ExpertRequest[] {
    return this.state.order
      .map((id) => this.state.requests.get(id))
      .filter((r): r is ExpertRequest => r !== undefined);
  }

  selected(): ExpertRequest | null {
    if (this.state.selectedId === null) return null;
    return this.state.requests.get(this.state.selectedId) ?? null;
  }

  /** 1-based position among pending requests, or null once off the queue. */
  queuePosition(id: string): number | null {
    let position = 0;
    for (const rid of this.state.order) {
      const req = this.state.requests.get(rid);
      if (req?.status !== "pending") continue;
      position += 1;
      if (rid === id) return position;
    }
    return null;
  }
}

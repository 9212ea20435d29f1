import type { ConnectionState, ExpertRequest, StreamEvent, StreamEventKind } from "./types";

const EVENT_KINDS: StreamEventKind[] = ["created", "claimed", "answered", "expired"];

export interface EventStreamOptions {
  /** First retry delay; doubles per failure up to maxRetryMs. */
  baseRetryMs?: number;
  maxRetryMs?: number;
  /** Injection points for tests. */
  eventSourceFactory?: (url: string) => EventSource;
  scheduler?: (fn: () => void, ms: number) => unknown;
}

/**
 * Wraps the server-sent event stream with exponential-backoff reconnection
 * and a connection-state callback that drives the offline banner.
 */
export class EventStream {
  private source: EventSource | null = null;
  private retryMs: number;
  private readonly baseRetryMs: number;
  private readonly maxRetryMs: number;
  private readonly makeSource: (url: string) => EventSource;
  private readonly schedule: (fn: () => void, ms: number) => unknown;
  private stopped = false;

  constructor(
    private readonly url: string,
    private readonly onEvent: (event: StreamEvent) => void,
    private readonly onState: (state: ConnectionState) => void,
    options: EventStreamOptions = {},
  ) {
    this.baseRetryMs = options.baseRetryMs ?? 1000;
    this.maxRetryMs = options.maxRetryMs ?? 30000;
    this.retryMs = this.baseRetryMs;
    this.makeSource = options.eventSourceFactory ?? ((u) => new EventSource(u));
    this.schedule = options.scheduler ?? ((fn, ms) => setTimeout(fn, ms));
  }

  start(): void {
    this.stopped = false;
    this.connect();
  }

  stop(): void {
    this.stopped = true;
    this.source?.close();
    this.source = null;
  }

  /** Current backoff delay, exposed for tests. */
  get currentRetryMs(): number {
    return this.retryMs;
  }

  private connect(): void {
    if (this.stopped) return;
    this.onState("connecting");
    const source = this.makeSource(this.url);
    this.source = source;

    source.onopen = () => {
      this.retryMs = this.baseRetryMs; // healthy again: reset the backoff
      this.onState("open");
    };
    source.onerror = () => {
      source.close();
      if (this.stopped) return;
      this.onState("reconnecting");
      const delay = this.retryMs;
      this.retryMs = Math.min(this.retryMs * 2, this.maxRetryMs);
      this.schedule(() => this.connect(), delay);
    };
    for (const kind of EVENT_KINDS) {
      source.addEventListener(kind, (raw) => {
        const parsed = parseStreamEvent(kind, (raw as MessageEvent).data);
        if (parsed) this.onEvent(parsed);
      });
    }
  }
}

export function parseStreamEvent(kind: StreamEventKind, data: unknown): StreamEvent | null {
  if (typeof data !== "string") return null;
  let request: ExpertRequest;
  try {
    request = JSON.parse(data) as ExpertRequest;
  } catch {
    return null;
  }
  if (!request || typeof request.id !== "string") return null;
  return { kind, request };
}

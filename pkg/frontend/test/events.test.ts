import { describe, expect, it } from "vitest";
import { EventStream, parseStreamEvent } from "../src/events";
import type { ConnectionState, StreamEvent } from "../src/types";
import { makeRequest } from "./fixtures";

class FakeEventSource {
  onopen: (() => void) | null = null;
  onerror: (() => void) | null = null;
  closed = false;
  private listeners = new Map<string, (event: { data: string }) => void>();

  constructor(readonly url: string) {}

  addEventListener(kind: string, handler: (event: { data: string }) => void): void {
    this.listeners.set(kind, handler);
  }

  close(): void {
    this.closed = true;
  }

  emit(kind: string, data: string): void {
    this.listeners.get(kind)?.({ data });
  }
}

interface Harness {
  stream: EventStream;
  sources: FakeEventSource[];
  pending: Array<() => void>;
  events: StreamEvent[];
  states: ConnectionState[];
  /** Run every scheduled reconnect callback. */
  flush: () => void;
}

function harness(options: { baseRetryMs?: number; maxRetryMs?: number } = {}): Harness {
  const sources: FakeEventSource[] = [];
  const pending: Array<() => void> = [];
  const events: StreamEvent[] = [];
  const states: ConnectionState[] = [];
  const stream = new EventStream(
    "http://x.test/api/events",
    (event) => events.push(event),
    (state) => states.push(state),
    {
      baseRetryMs: options.baseRetryMs ?? 1000,
      maxRetryMs: options.maxRetryMs ?? 30000,
      eventSourceFactory: (url) => {
        const source = new FakeEventSource(url);
        sources.push(source);
        return source as unknown as EventSource;
      },
      scheduler: (fn) => {
        pending.push(fn);
        return 0;
      },
    },
  );
  return {
    stream,
    sources,
    pending,
    events,
    states,
    flush: () => {
      const batch = pending.splice(0);
      for (const fn of batch) fn();
    },
  };
}

describe("EventStream", () => {
  it("reports connecting then open", () => {
    const h = harness();
    h.stream.start();
    expect(h.states).toEqual(["connecting"]);

    h.sources[0]?.onopen?.();
    expect(h.states).toEqual(["connecting", "open"]);
  });

  it("delivers parsed events for every stream kind", () => {
    const h = harness();
    h.stream.start();
    h.sources[0]?.onopen?.();

    h.sources[0]?.emit("created", JSON.stringify(makeRequest({ id: "r1" })));
    h.sources[0]?.emit("answered", JSON.stringify(makeRequest({ id: "r1", status: "answered" })));

    expect(h.events.map((e) => e.kind)).toEqual(["created", "answered"]);
    expect(h.events[1]?.request.status).toBe("answered");
  });

  it("ignores malformed event payloads", () => {
    const h = harness();
    h.stream.start();

    h.sources[0]?.emit("created", "{not json");
    h.sources[0]?.emit("created", JSON.stringify({ question: "no id field" }));

    expect(h.events).toEqual([]);
  });

  it("doubles the retry delay per failure and caps it", () => {
    const h = harness({ baseRetryMs: 1000, maxRetryMs: 4000 });
    h.stream.start();

    h.sources[0]?.onerror?.();
    expect(h.stream.currentRetryMs).toBe(2000);
    h.flush();

    h.sources[1]?.onerror?.();
    expect(h.stream.currentRetryMs).toBe(4000);
    h.flush();

    h.sources[2]?.onerror?.();
    expect(h.stream.currentRetryMs).toBe(4000);
  });

  it("resets the retry delay after a successful open", () => {
    const h = harness();
    h.stream.start();

    h.sources[0]?.onerror?.();
    h.flush();
    h.sources[1]?.onerror?.();
    h.flush();
    expect(h.stream.currentRetryMs).toBe(4000);

    h.sources[2]?.onopen?.();
    expect(h.stream.currentRetryMs).toBe(1000);
  });

  it("closes the old source and reports reconnecting on error", () => {
    const h = harness();
    h.stream.start();
    h.sources[0]?.onopen?.();

    h.sources[0]?.onerror?.();

    expect(h.sources[0]?.closed).toBe(true);
    expect(h.states).toEqual(["connecting", "open", "reconnecting"]);

    h.flush();
    expect(h.sources).toHaveLength(2);
    expect(h.states.at(-1)).toBe("connecting");
  });

  it("does not reconnect after stop()", () => {
    const h = harness();
    h.stream.start();
    h.sources[0]?.onerror?.();

    h.stream.stop();
    h.flush();

    expect(h.sources).toHaveLength(1);
  });

  it("ignores errors raised after stop()", () => {
    const h = harness();
    h.stream.start();
    h.sources[0]?.onopen?.();

    h.stream.stop();
    h.sources[0]?.onerror?.();
    h.flush();

    expect(h.sources).toHaveLength(1);
    expect(h.states).toEqual(["connecting", "open"]);
  });
});

describe("parseStreamEvent", () => {
  it("parses a valid payload", () => {
    const request = makeRequest({ id: "r9" });
    const event = parseStreamEvent("claimed", JSON.stringify(request));
    expect(event).toEqual({ kind: "claimed", request });
  });

  it("returns null for non-string or malformed data", () => {
    expect(parseStreamEvent("created", 42)).toBeNull();
    expect(parseStreamEvent("created", "oops")).toBeNull();
    expect(parseStreamEvent("created", JSON.stringify({ id: 7 }))).toBeNull();
    expect(parseStreamEvent("created", JSON.stringify(null))).toBeNull();
  });
});

import { describe, expect, it, vi } from "vitest";
import { Store } from "../src/store";
import { makeRequest } from "./fixtures";

describe("Store", () => {
  it("loads a snapshot preserving order", () => {
    const store = new Store();
    store.loadSnapshot([makeRequest({ id: "a" }), makeRequest({ id: "b" }), makeRequest({ id: "c" })]);

    expect(store.all().map((r) => r.id)).toEqual(["a", "b", "c"]);
  });

  it("replaces earlier state when a new snapshot arrives", () => {
    const store = new Store();
    store.loadSnapshot([makeRequest({ id: "a" })]);
    store.loadSnapshot([makeRequest({ id: "z" })]);

    expect(store.all().map((r) => r.id)).toEqual(["z"]);
  });

  it("appends unseen requests from events in arrival order", () => {
    const store = new Store();
    store.loadSnapshot([makeRequest({ id: "a" })]);
    store.applyEvent({ kind: "created", request: makeRequest({ id: "b" }) });
    store.applyEvent({ kind: "created", request: makeRequest({ id: "c" }) });

    expect(store.all().map((r) => r.id)).toEqual(["a", "b", "c"]);
  });

  it("updates a known request in place without reordering", () => {
    const store = new Store();
    store.loadSnapshot([makeRequest({ id: "a" }), makeRequest({ id: "b" })]);
    store.applyEvent({
      kind: "claimed",
      request: makeRequest({ id: "a", status: "claimed", claimed_by: "alice" }),
    });

    expect(store.all().map((r) => r.id)).toEqual(["a", "b"]);
    expect(store.all()[0]?.status).toBe("claimed");
    expect(store.all()[0]?.claimed_by).toBe("alice");
  });

  it("filters by status in creation order", () => {
    const store = new Store();
    store.loadSnapshot([
      makeRequest({ id: "a", status: "answered" }),
      makeRequest({ id: "b" }),
      makeRequest({ id: "c" }),
    ]);

    expect(store.byStatus("pending").map((r) => r.id)).toEqual(["b", "c"]);
    expect(store.byStatus("answered").map((r) => r.id)).toEqual(["a"]);
  });

  it("computes 1-based queue positions among pending requests only", () => {
    const store = new Store();
    store.loadSnapshot([
      makeRequest({ id: "a", status: "answered" }),
      makeRequest({ id: "b" }),
      makeRequest({ id: "c" }),
    ]);

    expect(store.queuePosition("b")).toBe(1);
    expect(store.queuePosition("c")).toBe(2);
    expect(store.queuePosition("a")).toBeNull();
    expect(store.queuePosition("ghost")).toBeNull();
  });

  it("notifies subscribers and honors unsubscribe", () => {
    const store = new Store();
    const listener = vi.fn();
    const unsubscribe = store.subscribe(listener);

    store.loadSnapshot([makeRequest()]);
    expect(listener).toHaveBeenCalledTimes(1);

    unsubscribe();
    store.loadSnapshot([]);
    expect(listener).toHaveBeenCalledTimes(1);
  });

  it("skips notification when the connection state is unchanged", () => {
    const store = new Store();
    const listener = vi.fn();
    store.subscribe(listener);

    store.setConnection("open");
    store.setConnection("open");

    expect(listener).toHaveBeenCalledTimes(1);
    expect(store.getState().connection).toBe("open");
  });

  it("tracks the selected request and clears when unknown", () => {
    const store = new Store();
    store.loadSnapshot([makeRequest({ id: "a" })]);

    expect(store.selected()).toBeNull();
    store.select("a");
    expect(store.selected()?.id).toBe("a");
    store.select("missing");
    expect(store.selected()).toBeNull();
    store.select(null);
    expect(store.selected()).toBeNull();
  });
});

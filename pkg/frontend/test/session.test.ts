import { describe, expect, it } from "vitest";

import type { QueryResponse } from "../src/api.js";
import { ConsoleSession } from "../src/session.js";

const RESPONSE: QueryResponse = {
  schema_version: 1,
  answer: "jawaban",
  citations: [],
  hits: [],
  model_id: "mock-echo",
  latency_ms: 1,
};

describe("ConsoleSession", () => {
  it("applies settings to the next request only", () => {
    const session = new ConsoleSession();
    const first = session.prepare("q1");
    session.settings.k = 9;
    const second = session.prepare("q2");
    expect(first.k).toBe(4);
    expect(second.k).toBe(9);
  });

  it("keeps history append-only", () => {
    const session = new ConsoleSession();
    session.append(session.prepare("q1"), RESPONSE);
    session.append(session.prepare("q2"), null, "boom");
    expect(session.history).toHaveLength(2);
    expect(session.history[0].request.text).toBe("q1");
    expect(session.history[1].error).toBe("boom");
    // The readonly view is not a mutation surface for page code.
    expect(Object.isFrozen(session.history)).toBe(false);
    const held = session.history;
    session.append(session.prepare("q3"), RESPONSE);
    expect(held).toHaveLength(3); // same backing array, entries never replaced
    expect(held[0].request.text).toBe("q1");
  });

  it("seeds default settings", () => {
    const session = new ConsoleSession({ endpoint: "http://svc" });
    expect(session.settings.k).toBe(4);
    expect(session.settings.systemPromptId).toBe("default");
    expect(session.settings.endpoint).toBe("http://svc");
  });
});

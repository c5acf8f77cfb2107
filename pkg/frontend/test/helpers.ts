// Recorded-server fixtures and a routing fetch stub. Fixtures were captured
// from the live service (see test/record-fixtures.py), so these tests pin
// the console to the real wire contract.

import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";

export interface Fixture {
  status: number;
  body: unknown;
}

const fixtureDir = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function loadFixture(name: string): Fixture {
  return JSON.parse(readFileSync(join(fixtureDir, `${name}.json`), "utf-8"));
}

export type RouteHandler = Fixture | ((init?: RequestInit) => Fixture | Promise<Fixture>);

/** fetch stub keyed by "METHOD /path"; unrouted requests fail loudly. */
export function fixtureFetch(routes: Record<string, RouteHandler>): typeof fetch {
  return (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = typeof input === "string" ? input : input instanceof URL ? input.href : input.url;
    const path = url.startsWith("http") ? new URL(url).pathname : url;
    const key = `${init?.method ?? "GET"} ${path}`;
    const handler = routes[key];
    if (!handler) {
      throw new Error(`no fixture route for ${key}`);
    }
    const fixture = typeof handler === "function" ? await handler(init) : handler;
    return new Response(JSON.stringify(fixture.body), {
      status: fixture.status,
      headers: { "Content-Type": "application/json" },
    });
  }) as typeof fetch;
}

export function abortableRoute(fixture: Fixture): {
  handler: RouteHandler;
  release: () => void;
} {
  let release!: () => void;
  const gate = new Promise<void>((resolve) => {
    release = resolve;
  });
  const handler = async (init?: RequestInit): Promise<Fixture> => {
    await new Promise<void>((resolve, reject) => {
      const signal = init?.signal;
      if (signal?.aborted) {
        reject(new DOMException("aborted", "AbortError"));
        return;
      }
      signal?.addEventListener("abort", () =>
        reject(new DOMException("aborted", "AbortError")));
      void gate.then(resolve);
    });
    return fixture;
  };
  return { handler, release };
}

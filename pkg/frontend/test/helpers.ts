import { vi } from "vitest";
import rawFixtures from "./fixtures.json";
import type {
  ClickResponse,
  ConstraintsResponse,
  FeedsResponse,
  HistoryResponse,
  SessionResponse,
} from "../src/types";

export interface ErrorFixture {
  status: number;
  body: { error: { code: string; message: string } };
}

export interface Fixtures {
  create: SessionResponse;
  clicks: ClickResponse[];
  feeds_at_cap: FeedsResponse;
  history: HistoryResponse;
  constraint_change: ConstraintsResponse;
  history_after_change: HistoryResponse;
  infeasible_error: ErrorFixture;
  stale_click_error: ErrorFixture;
}

// recorded from the live service by record_fixtures.py
export const fixtures = rawFixtures as unknown as Fixtures;

export interface RecordedCall {
  method: string;
  path: string;
  body: unknown;
}

export interface Reply {
  status: number;
  body: unknown;
}

type Responder = (call: RecordedCall) => Reply | Promise<Reply>;

function jsonResponse(reply: Reply): Response {
  return new Response(JSON.stringify(reply.body), {
    status: reply.status,
    headers: { "content-type": "application/json" },
  });
}

/** A scripted stand-in for fetch that records calls and tracks how many
 * requests are in flight at once. */
export class FetchStub {
  calls: RecordedCall[] = [];
  inFlight = 0;
  maxInFlight = 0;
  private routes: Array<{
    method: string;
    match: (path: string) => boolean;
    respond: Responder;
  }> = [];

  on(method: string, path: string | RegExp, respond: Responder): this {
    const match =
      typeof path === "string"
        ? (p: string) => p === path
        : (p: string) => path.test(p);
    this.routes.push({ method: method.toUpperCase(), match, respond });
    return this;
  }

  request(method: string, path: string): RecordedCall[] {
    return this.calls.filter(
      (c) => c.method === method.toUpperCase() && c.path.includes(path),
    );
  }

  install(): void {
    vi.stubGlobal("fetch", async (input: RequestInfo | URL, init?: RequestInit) => {
      const path = String(input);
      const method = (init?.method ?? "GET").toUpperCase();
      const body = init?.body ? JSON.parse(String(init.body)) : undefined;
      const call: RecordedCall = { method, path, body };
      this.calls.push(call);

      const route = this.routes.find((r) => r.method === method && r.match(path));
      if (!route) {
        throw new Error(`unrouted request: ${method} ${path}`);
      }
      this.inFlight += 1;
      this.maxInFlight = Math.max(this.maxInFlight, this.inFlight);
      try {
        return jsonResponse(await route.respond(call));
      } finally {
        this.inFlight -= 1;
      }
    });
  }
}

export function deferred<T>(): { promise: Promise<T>; resolve: (v: T) => void } {
  let resolve!: (v: T) => void;
  const promise = new Promise<T>((r) => {
    resolve = r;
  });
  return { promise, resolve };
}

/** Let pending promise chains run to completion (real timers). */
export async function settle(): Promise<void> {
  for (let i = 0; i < 3; i += 1) {
    await new Promise((r) => setTimeout(r, 0));
  }
}

export function mountRoot(): HTMLElement {
  document.body.innerHTML = '<div id="app"></div>';
  return document.getElementById("app") as HTMLElement;
}

/** jsdom reports inline colors in rgb() form, so compare in that form. */
export function hexToRgb(hex: string): string {
  const n = parseInt(hex.slice(1), 16);
  return `rgb(${(n >> 16) & 0xff}, ${(n >> 8) & 0xff}, ${n & 0xff})`;
}

export function parsePolylinePoints(svg: SVGSVGElement, series: string): Array<[number, number]> {
  const line = svg.querySelector(`polyline[data-series="${series}"]`);
  if (!line) {
    throw new Error(`no polyline for series ${series}`);
  }
  const points = line.getAttribute("points") ?? "";
  return points
    .split(" ")
    .filter(Boolean)
    .map((pair) => {
      const [x, y] = pair.split(",").map(Number);
      return [x, y];
    });
}

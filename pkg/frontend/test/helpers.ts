// Shared test scaffolding: load the real page markup and provide an
// in-memory stand-in for the session service that records every request.

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const here = dirname(fileURLToPath(import.meta.url));

export function loadPage(): void {
  const html = readFileSync(join(here, "..", "index.html"), "utf-8");
  const body = html.match(/<body>([\s\S]*)<\/body>/);
  if (!body) {
    throw new Error("index.html has no body");
  }
  document.body.innerHTML = body[1].replace(/<script[\s\S]*?<\/script>/g, "");
}

interface StubSession {
  id: string;
  turns: { author: string; text: string; manual: boolean }[];
  lastOptions: string[];
}

export interface RecordedExpand {
  abbreviation: string;
  noisy: boolean;
  /** context the stub service derived from its session state, mirroring
   * the real service: all transcript turns in order */
  context: string[];
}

export class StubServer {
  sessions = new Map<string, StubSession>();
  expands: RecordedExpand[] = [];
  requests: { method: string; path: string; body: unknown }[] = [];
  failNext: { status: number; code: string; message: string; retryable: boolean } | null =
    null;
  private counter = 0;

  constructor(private lut: Record<string, string[]>) {}

  fetch = async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
    const url = new URL(String(input), "http://stub.test");
    const method = (init?.method ?? "GET").toUpperCase();
    const body = init?.body ? JSON.parse(String(init.body)) : null;
    this.requests.push({ method, path: url.pathname, body });

    if (this.failNext) {
      const fail = this.failNext;
      this.failNext = null;
      return jsonResponse(fail.status, {
        code: fail.code,
        message: fail.message,
        retryable: fail.retryable,
      });
    }

    if (method === "POST" && url.pathname === "/sessions") {
      const id = `s${this.counter++}`;
      this.sessions.set(id, { id, turns: [], lastOptions: [] });
      return jsonResponse(200, { id });
    }

    const match = url.pathname.match(/^\/sessions\/([^/]+)(?:\/(\w+))?$/);
    if (!match) {
      return jsonResponse(404, { code: "not_found", message: "no route", retryable: false });
    }
    const session = this.sessions.get(match[1]);
    if (!session) {
      return jsonResponse(404, {
        code: "unknown_session",
        message: `no session ${match[1]}`,
        retryable: false,
      });
    }

    if (method === "GET" && !match[2]) {
      return jsonResponse(200, transcript(session));
    }
    if (method === "POST" && match[2] === "turns") {
      session.turns.push({ author: "partner", text: body.text, manual: false });
      return jsonResponse(200, transcript(session));
    }
    if (method === "POST" && match[2] === "expand") {
      const context = session.turns.map((t) => t.text);
      this.expands.push({ abbreviation: body.abbreviation, noisy: !!body.noisy, context });
      const phrases = this.lut[body.abbreviation] ?? [];
      session.lastOptions = phrases;
      return jsonResponse(200, {
        options: phrases.map((phrase, i) => ({ phrase, count: phrases.length - i })),
        latency_ms: 1.5,
      });
    }
    if (method === "POST" && match[2] === "select") {
      const manual = !session.lastOptions.includes(body.phrase);
      session.turns.push({ author: "user", text: body.phrase, manual });
      return jsonResponse(200, transcript(session));
    }
    return jsonResponse(405, { code: "bad_method", message: method, retryable: false });
  };
}

function transcript(session: StubSession) {
  return { id: session.id, backend: "stub", k: 5, turns: session.turns };
}

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export function click(target: Element): void {
  target.dispatchEvent(new MouseEvent("click", { bubbles: true }));
}

export function type(input: HTMLInputElement, value: string): void {
  input.value = value;
  input.dispatchEvent(new Event("input", { bubbles: true }));
}

export function pressEnter(input: HTMLElement): void {
  input.dispatchEvent(new KeyboardEvent("keydown", { key: "Enter", bubbles: true }));
}

export function settle(): Promise<void> {
  // drain the microtask queue plus one macrotask so fetch handlers finish
  return new Promise((resolve) => setTimeout(resolve, 0));
}

export async function waitFor(cond: () => boolean, timeoutMs = 8000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (cond()) {
      return;
    }
    await new Promise((resolve) => setTimeout(resolve, 25));
  }
  throw new Error("condition not met in time");
}

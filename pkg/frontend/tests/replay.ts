// Fake fetch that replays recorded service exchanges in order, failing fast
// when the UI deviates from the recorded request sequence.

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import type { FetchLike } from "../src/api.js";

interface Exchange {
  method: string;
  path: string;
  request: unknown;
  status: number;
  response: unknown;
}

export function loadFixture(name: string): Exchange[] {
  const here = dirname(fileURLToPath(import.meta.url));
  const raw = readFileSync(join(here, "fixtures", `${name}.json`), "utf-8");
  return (JSON.parse(raw) as { exchanges: Exchange[] }).exchanges;
}

export class ReplayServer {
  private cursor = 0;

  constructor(private readonly exchanges: Exchange[]) {}

  get fetch(): FetchLike {
    return async (url, init) => {
      const expected = this.exchanges[this.cursor];
      if (!expected) {
        throw new Error(`unexpected request beyond fixture: ${init?.method} ${url}`);
      }
      this.cursor += 1;
      const method = init?.method ?? "GET";
      const path = url.replace(/^https?:\/\/[^/]+/, "");
      if (method !== expected.method || path !== expected.path) {
        throw new Error(
          `request #${this.cursor} was ${method} ${path}, ` +
          `fixture expects ${expected.method} ${expected.path}`);
      }
      if (expected.request != null) {
        const sent = JSON.parse(String(init?.body ?? "{}")) as Record<string, unknown>;
        for (const [key, value] of Object.entries(expected.request as Record<string, unknown>)) {
          if (key === "seed" || key === "mode") continue; // incidental fields
          if (JSON.stringify(sent[key]) !== JSON.stringify(value)) {
            throw new Error(
              `request #${this.cursor} field ${key}: sent ` +
              `${JSON.stringify(sent[key])}, fixture has ${JSON.stringify(value)}`);
          }
        }
      }
      return new Response(JSON.stringify(expected.response), {
        status: expected.status,
        headers: { "Content-Type": "application/json" },
      });
    };
  }

  get exhausted(): boolean {
    return this.cursor === this.exchanges.length;
  }

  get position(): number {
    return this.cursor;
  }
}

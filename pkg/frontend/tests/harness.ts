// DOM test harness: a controller wired to the real renderer, with click
// helpers that await the async work a click starts.

import { ServiceClient, type FetchLike } from "../src/api.js";
import { GameController } from "../src/game.js";
import { render, type Actions } from "../src/render.js";

export class Harness {
  readonly controller: GameController;
  readonly root: HTMLElement;
  sessionId: string | null = null;
  private inFlight: Promise<void> = Promise.resolve();

  constructor(fetchFn: FetchLike, base = "http://service.test") {
    this.controller = new GameController(new ServiceClient(base, fetchFn));
    this.root = document.createElement("div");
    const actions: Actions = {
      start: (name, mode) => {
        this.inFlight = this.controller.start(name, mode);
      },
      answer: (outcome) => {
        this.inFlight = this.controller.answer(outcome);
      },
      leave: () => this.controller.leaveSession(),
    };
    this.controller.onChange = (state) => render(this.root, state, actions);
    this.controller.onSessionChange = (sid) => {
      this.sessionId = sid;
    };
  }

  query(selector: string): HTMLElement {
    const found = this.root.querySelector(selector);
    if (!found) {
      throw new Error(`no element matches ${selector}; html: ${this.root.innerHTML}`);
    }
    return found as HTMLElement;
  }

  maybe(selector: string): HTMLElement | null {
    return this.root.querySelector(selector) as HTMLElement | null;
  }

  async click(selector: string): Promise<void> {
    this.query(selector).click();
    await this.inFlight;
  }

  async clickOutcome(outcome: string): Promise<void> {
    await this.click(`#answers button[data-outcome="${outcome}"]`);
  }

  text(selector: string): string {
    return this.query(selector).textContent ?? "";
  }

  outcomeButtons(): string[] {
    return Array.from(this.root.querySelectorAll("#answers button[data-outcome]"))
      .map((b) => (b as HTMLElement).dataset.outcome ?? "");
  }
}

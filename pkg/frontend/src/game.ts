import { OfflineError, ServiceClient, ServiceError } from "./api.js";
import type { SessionSnapshot, SpecInfo } from "./types.js";

export type Phase = "picking" | "starting" | "playing" | "converged" | "inconsistent";

export interface GameState {
  phase: Phase;
  specs: SpecInfo[];
  snapshot: SessionSnapshot | null;
  busy: boolean;
  offline: boolean;
  notice: string | null;
}

function phaseOf(snapshot: SessionSnapshot): Phase {
  if (snapshot.status === "converged") return "converged";
  if (snapshot.status === "inconsistent") return "inconsistent";
  return "playing";
}

/**
 * Holds the whole game state; the only client-side state that matters is the
 * session id (kept in the URL hash by main.ts), so a page refresh restores
 * the exact game through getSession.
 */
export class GameController {
  readonly state: GameState = {
    phase: "picking",
    specs: [],
    snapshot: null,
    busy: false,
    offline: false,
    notice: null,
  };

  onChange: (state: GameState) => void = () => undefined;
  onSessionChange: (sessionId: string | null) => void = () => undefined;

  constructor(private readonly client: ServiceClient) {}

  private emit(): void {
    this.onChange(this.state);
  }

  private async guard<T>(work: () => Promise<T>): Promise<T | null> {
    try {
      const result = await work();
      this.state.offline = false;
      return result;
    } catch (err) {
      if (err instanceof OfflineError) {
        this.state.offline = true;
      } else if (err instanceof ServiceError) {
        this.state.notice = `${err.code}: ${err.message}`;
      } else {
        this.state.notice = String(err);
      }
      return null;
    }
  }

  /** Load the spec list; when a session id is given (page refresh), restore it. */
  async init(sessionId: string | null = null): Promise<void> {
    const specs = await this.guard(() => this.client.listSpecs());
    if (specs !== null) {
      this.state.specs = specs;
    }
    if (sessionId) {
      await this.restore(sessionId);
    }
    this.emit();
  }

  /** Re-sync from the server; used on refresh and after stale-tab conflicts. */
  async restore(sessionId: string): Promise<void> {
    const snapshot = await this.guard(() => this.client.getSession(sessionId));
    if (snapshot === null) {
      // expired or unknown; fall back to the picker
      this.state.snapshot = null;
      this.state.phase = "picking";
      this.onSessionChange(null);
    } else {
      this.state.snapshot = snapshot;
      this.state.phase = phaseOf(snapshot);
      this.onSessionChange(snapshot.session_id);
    }
    this.emit();
  }

  async start(specName: string, mode = "human-oracle"): Promise<void> {
    this.state.phase = "starting";
    this.state.notice = null;
    this.emit();
    const created = await this.guard(() => this.client.createSession(specName, mode));
    if (created === null) {
      this.state.phase = "picking";
      this.emit();
      return;
    }
    await this.restore(created.session_id);
  }

  /**
   * Answer the pending query. Exactly one answer can be in flight; the round
   * index pins the answer to the query on screen, so a stale tab gets a 409
   * which we resolve by re-syncing (the "game over" path).
   */
  async answer(outcome: string | null): Promise<void> {
    const snapshot = this.state.snapshot;
    if (snapshot === null || this.state.busy || this.state.phase !== "playing") {
      return;
    }
    this.state.busy = true;
    this.state.notice = null;
    this.emit();
    try {
      await this.client.postAnswer(snapshot.session_id, outcome, snapshot.round + 1);
      this.state.busy = false;
      await this.restore(snapshot.session_id);
    } catch (err) {
      this.state.busy = false;
      if (err instanceof OfflineError) {
        this.state.offline = true;
        this.emit();
      } else if (err instanceof ServiceError && err.status === 409) {
        this.state.notice = "This game already moved on — reloading its state.";
        await this.restore(snapshot.session_id);
      } else if (err instanceof ServiceError) {
        this.state.notice = `${err.code}: ${err.message}`;
        this.emit();
      } else {
        this.state.notice = String(err);
        this.emit();
      }
    }
  }

  /** Back to the spec picker (the session stays on the server until TTL). */
  leaveSession(): void {
    this.state.snapshot = null;
    this.state.phase = "picking";
    this.state.notice = null;
    this.onSessionChange(null);
    this.emit();
  }
}

import type { GameState } from "./game.js";
import type { DeclInfo, DisplayHints, RoundInfo, SessionSnapshot } from "./types.js";

export interface Actions {
  start(specName: string, mode: string): void;
  answer(outcome: string | null): void;
  leave(): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

/** Map a coordinate value to its display name when the spec provides names. */
function valueName(display: DisplayHints | null | undefined, decl: string,
                   value: number): string {
  const names = display?.value_names?.[decl];
  if (names && value >= 0 && value < names.length) {
    return names[value];
  }
  return String(value);
}

/** Render one query vector decl-by-decl: every spec uses the same renderer. */
export function describeQuery(decls: DeclInfo[], values: number[],
                              display: DisplayHints | null | undefined): string {
  const parts: string[] = [];
  let offset = 0;
  for (const decl of decls) {
    const coords = values.slice(offset, offset + decl.dim);
    const pretty = coords.map((v) => valueName(display, decl.name, v));
    parts.push(decl.dim === 1 ? `${decl.name} = ${pretty[0]}`
                              : `${decl.name} = (${pretty.join(", ")})`);
    offset += decl.dim;
  }
  return parts.join("   ");
}

function specPicker(state: GameState, actions: Actions): HTMLElement {
  const panel = el("section", "picker");
  panel.appendChild(el("h2", "", "Pick a search problem"));
  const select = el("select", "spec-select");
  select.id = "spec-select";
  for (const spec of state.specs) {
    const opt = el("option", "", `${spec.title} — ${spec.params} (${spec.n_targets} targets)`);
    opt.value = spec.name;
    if (spec.tier !== "ci") opt.disabled = true;
    select.appendChild(opt);
  }
  const mode = el("select", "mode-select");
  mode.id = "mode-select";
  for (const [value, label] of [["human-oracle", "you answer"],
                                ["hidden-target-demo", "watch it self-play"]]) {
    const opt = el("option", "", label);
    opt.value = value;
    mode.appendChild(opt);
  }
  const button = el("button", "start", "Start");
  button.id = "start-button";
  button.disabled = state.phase === "starting" || state.specs.length === 0;
  button.addEventListener("click", () => actions.start(select.value, mode.value));
  panel.append(select, mode, button);
  if (state.phase === "starting") {
    panel.appendChild(el("p", "status", "Analyzing the spec and choosing the first query…"));
  }
  return panel;
}

function historyTable(snapshot: SessionSnapshot): HTMLElement {
  const table = el("table", "history");
  table.id = "history";
  const head = el("tr");
  for (const title of ["#", "query", "answer", "bits", "candidates"]) {
    head.appendChild(el("th", "", title));
  }
  table.appendChild(head);
  const flagged = snapshot.inconsistency?.flip_round ?? null;
  for (const round of snapshot.transcript) {
    const row = el("tr", round.round === flagged ? "flagged" : "");
    row.appendChild(el("td", "", String(round.round)));
    row.appendChild(el("td", "",
      describeQuery(snapshot.query_decls, round.query, snapshot.display)));
    row.appendChild(el("td", "", round.outcome));
    row.appendChild(el("td", "", round.entropy_bits.toFixed(3)));
    row.appendChild(el("td", "", `${round.candidates_before} → ${round.candidates_after}`));
    table.appendChild(row);
  }
  return table;
}

function describeTarget(snapshot: SessionSnapshot, target: number[]): string {
  return describeQuery(snapshot.target_decls, target, snapshot.display);
}

function gamePanel(state: GameState, actions: Actions): HTMLElement {
  const snapshot = state.snapshot!;
  const panel = el("section", "game");
  panel.appendChild(el("h2", "", snapshot.spec));

  if (state.phase === "playing" && snapshot.pending_query) {
    const ask = el("div", "pending");
    ask.id = "pending";
    ask.appendChild(el("p", "query-line",
      describeQuery(snapshot.query_decls, snapshot.pending_query.values, snapshot.display)));
    ask.appendChild(el("p", "meta",
      `round ${snapshot.round + 1} · ${snapshot.pending_query.candidate_count} candidates left · ` +
      `${snapshot.pending_query.entropy_bits.toFixed(3)} expected bits`));
    const buttons = el("div", "answers");
    buttons.id = "answers";
    // controls come only from the declared outcome list
    for (const outcome of snapshot.outcomes) {
      const button = el("button", "answer", outcome);
      button.dataset.outcome = outcome;
      button.disabled = state.busy;
      button.addEventListener("click", () => actions.answer(outcome));
      buttons.appendChild(button);
    }
    if (snapshot.mode === "hidden-target-demo") {
      const step = el("button", "answer demo", "step ▸");
      step.id = "demo-step";
      step.disabled = state.busy;
      step.addEventListener("click", () => actions.answer(null));
      buttons.appendChild(step);
    }
    ask.appendChild(buttons);
    panel.appendChild(ask);
  }

  if (state.phase === "converged") {
    const done = el("div", "converged");
    done.id = "converged";
    done.appendChild(el("h3", "", "Solved"));
    const finals = snapshot.final_candidates ?? [];
    if (finals.length === 1) {
      done.appendChild(el("p", "final", describeTarget(snapshot, finals[0])));
    } else {
      done.appendChild(el("p", "final",
        `${finals.length} indistinguishable candidates remain`));
      for (const candidate of finals) {
        done.appendChild(el("p", "final alt", describeTarget(snapshot, candidate)));
      }
    }
    done.appendChild(el("p", "meta", `${snapshot.round} rounds`));
    panel.appendChild(done);
  }

  if (state.phase === "inconsistent" && snapshot.inconsistency) {
    const bad = el("div", "inconsistent");
    bad.id = "inconsistent";
    bad.appendChild(el("h3", "", "Answers contradict each other"));
    bad.appendChild(el("p", "", snapshot.inconsistency.message));
    panel.appendChild(bad);
  }

  panel.appendChild(historyTable(snapshot));
  const leave = el("button", "leave", "New game");
  leave.id = "leave-button";
  leave.addEventListener("click", () => actions.leave());
  panel.appendChild(leave);
  return panel;
}

export function render(root: HTMLElement, state: GameState, actions: Actions): void {
  root.textContent = "";
  const header = el("header");
  header.appendChild(el("h1", "", "querysynth"));
  header.appendChild(el("p", "tag",
    "the engine asks the next most-informative question; you answer"));
  root.appendChild(header);

  if (state.offline) {
    const banner = el("div", "banner offline", "Service unreachable — retry when it is back.");
    banner.id = "offline-banner";
    root.appendChild(banner);
  }
  if (state.notice) {
    const banner = el("div", "banner notice", state.notice);
    banner.id = "notice-banner";
    root.appendChild(banner);
  }

  if (state.snapshot === null) {
    root.appendChild(specPicker(state, actions));
  } else {
    root.appendChild(gamePanel(state, actions));
  }
}

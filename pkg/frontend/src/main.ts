import { ServiceClient } from "./api.js";
import { GameController } from "./game.js";
import { render } from "./render.js";

function apiBase(): string {
  const param = new URLSearchParams(window.location.search).get("api");
  if (param) return param.replace(/\/$/, "");
  return "http://127.0.0.1:8000";
}

function sessionFromHash(): string | null {
  const match = /#s=([A-Za-z0-9_-]+)/.exec(window.location.hash);
  return match ? match[1] : null;
}

const controller = new GameController(new ServiceClient(apiBase()));
const root = document.getElementById("app")!;

controller.onChange = (state) =>
  render(root, state, {
    start: (name, mode) => void controller.start(name, mode),
    answer: (outcome) => void controller.answer(outcome),
    leave: () => controller.leaveSession(),
  });

controller.onSessionChange = (sessionId) => {
  // the session id is the only client-side state; it lives in the URL so a
  // refresh (or a shared link) restores the exact game
  window.location.hash = sessionId ? `s=${sessionId}` : "";
};

void controller.init(sessionFromHash());

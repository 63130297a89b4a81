/**
 * Browser bootstrap: mounts the store-driven UI into #app and wires
 * clicks (via data-action delegation) and keyboard shortcuts.  Every
 * action a mouse can reach has a key.
 */

import { ApiClient, DecisionKind } from "./api.js";
import { renderApp } from "./render.js";
import { Store } from "./state.js";

const RETRAIN_POLL_MS = 2000;
const QUEUE_REFRESH_MS = 30000;

function readConfig(): { baseUrl: string; token: string | null; moderator: string } {
  const params = new URLSearchParams(window.location.search);
  const moderator =
    params.get("moderator") ??
    window.sessionStorage.getItem("moderator_id") ??
    window.prompt("moderator id?") ??
    "anonymous";
  window.sessionStorage.setItem("moderator_id", moderator);
  return {
    baseUrl: params.get("api") ?? "",
    token: params.get("token"),
    moderator,
  };
}

export function bootstrap(root: HTMLElement): Store {
  const config = readConfig();
  const api = new ApiClient(config.baseUrl, config.token);
  const store = new Store(api, config.moderator);

  store.subscribe((state) => {
    root.innerHTML = renderApp(state);
  });

  root.addEventListener("click", (event) => {
    const target = (event.target as HTMLElement).closest<HTMLElement>(
      "[data-action]",
    );
    if (!target) return;
    void runAction(store, target);
  });

  root.addEventListener("change", (event) => {
    const target = event.target as HTMLSelectElement;
    if (target.dataset.action !== "filter") return;
    const value = target.value;
    void store.setFilter(value === "" ? null : (value as "undecided" | "decided"));
  });

  document.addEventListener("keydown", (event) => {
    if (event.target instanceof HTMLInputElement) return;
    if (event.target instanceof HTMLSelectElement) return;
    void runKey(store, event);
  });

  window.setInterval(() => void store.checkRetrain(), RETRAIN_POLL_MS);
  window.setInterval(() => void store.refreshQueue(), QUEUE_REFRESH_MS);
  void store.refreshQueue();
  return store;
}

async function runAction(store: Store, element: HTMLElement): Promise<void> {
  const channelId = element.dataset.channelId;
  switch (element.dataset.action) {
    case "refresh":
      return store.refreshQueue();
    case "retrain":
      return store.startRetrain();
    case "dismiss-retrain":
      return store.dismissRetrain();
    case "open":
      if (channelId) return store.openChannel(channelId);
      return;
    case "close-detail":
      return store.closeDetail();
    case "decide":
      if (channelId && element.dataset.decision) {
        return store.submitDecision(
          channelId,
          element.dataset.decision as DecisionKind,
        );
      }
      return;
    case "prev-page":
      return store.prevPage();
    case "next-page":
      return store.nextPage();
    default:
      return;
  }
}

async function runKey(store: Store, event: KeyboardEvent): Promise<void> {
  const decide = (decision: DecisionKind) => {
    const target = store.state.detail?.channelId ??
      store.selectedEntry()?.channel_id;
    if (target) return store.submitDecision(target, decision);
    return Promise.resolve();
  };
  switch (event.key) {
    case "j":
    case "ArrowDown":
      return store.moveSelection(1);
    case "k":
    case "ArrowUp":
      return store.moveSelection(-1);
    case "Enter": {
      const entry = store.selectedEntry();
      if (entry) return store.openChannel(entry.channel_id);
      return;
    }
    case "Escape":
      return store.closeDetail();
    case "d":
      return decide("confirm_disturbing");
    case "s":
      return decide("confirm_suitable");
    case "u":
      return decide("needs_more_review");
    case "n":
      return store.nextPage();
    case "p":
      return store.prevPage();
    case "r":
      return store.startRetrain();
    case "g":
      return store.refreshQueue();
    default:
      return;
  }
}

const root = typeof document !== "undefined" ? document.getElementById("app") : null;
if (root) bootstrap(root);

/** Browser bootstrap: mounts the console and wires UI intents to the
 * detection service HTTP API. */

import { ApiClient, ApiError } from "./api/client.js";
import type { SubscriptionHandle } from "./api/client.js";
import { escapeHtml } from "./format.js";
import { Store, type View } from "./store.js";
import { renderDetection } from "./views/detection.js";
import { renderHistory } from "./views/history.js";
import { renderLogin } from "./views/login.js";
import { renderLogs } from "./views/logs.js";

function renderNav(view: View): string {
  const tab = (v: View, label: string) =>
    `<button class="tab ${view === v ? "active" : ""}" data-nav="${v}">${label}</button>`;
  return `<nav class="top-nav">
    ${tab("detection", "Live detection")}
    ${tab("history", "History")}
    ${tab("logs", "Logs")}
    <button class="tab" data-nav="login" id="btn-logout">Sign out</button>
  </nav>`;
}

export function mountConsole(root: HTMLElement, baseUrl = ""): Store {
  const client = new ApiClient(baseUrl);
  const store = new Store();
  let results: SubscriptionHandle | null = null;
  let logs: SubscriptionHandle | null = null;

  const render = () => {
    const state = store.get();
    const body =
      state.view === "login" ? renderLogin(state)
      : state.view === "history" ? renderHistory(state)
      : state.view === "logs" ? renderLogs(state)
      : renderDetection(state);
    root.innerHTML = state.view === "login"
      ? body
      : `${renderNav(state.view)}${body}`;
  };

  store.subscribe(render);

  const refreshState = async () => {
    try {
      store.update({ service: await client.state() });
    } catch (err) {
      console.error("state refresh failed", err);
    }
  };

  const openSubscriptions = () => {
    results ??= client.subscribeResults(
      (event) => {
        store.dispatchEvent(event);
        void refreshState();
      },
      () => store.update({ liveTransport: "poll" }),
    );
    logs ??= client.subscribeLogs((line) =>
      store.update({ logLines: [...store.get().logLines, line] }));
  };

  const failure = (err: unknown): string =>
    err instanceof ApiError ? err.message : "service unreachable";

  root.addEventListener("submit", (raw) => {
    const form = raw.target as HTMLFormElement;
    raw.preventDefault();
    if (form.id === "login-form") {
      const data = new FormData(form);
      void client
        .login(String(data.get("username")), String(data.get("password")))
        .then(async () => {
          store.update({ authenticated: true, loginError: null, view: "detection" });
          await refreshState();
          openSubscriptions();
        })
        .catch((err) => store.update({ loginError: failure(err) }));
    } else if (form.id === "history-query") {
      const data = new FormData(form);
      void client
        .flights({
          freeway: String(data.get("freeway") ?? ""),
          date: String(data.get("date") ?? ""),
        })
        .then((flights) => store.update({ flights, historyQueried: true }))
        .catch((err) => console.error("flight query failed", failure(err)));
    }
  });

  root.addEventListener("click", (raw) => {
    const target = (raw.target as HTMLElement).closest("button");
    if (!target) return;
    const nav = target.dataset["nav"] as View | undefined;
    if (nav) {
      if (nav === "login") {
        client.logout();
        results?.close();
        logs?.close();
        results = logs = null;
        store.update({ view: "login", authenticated: false });
      } else {
        store.update({ view: nav });
      }
      return;
    }
    const state = store.get();
    const control = (action: Promise<unknown>) =>
      void action.then(refreshState).catch((err) =>
        console.error("control failed", failure(err)));
    switch (target.id) {
      case "btn-start":
        control(client.start({ freeway: "", date: "" }));
        return;
      case "btn-pause":
        control(client.pause());
        return;
      case "btn-stop":
        control(client.stop());
        return;
      case "btn-ack-alarm":
        if (state.alarm) store.update({ alarm: { ...state.alarm, acknowledged: true } });
        return;
      case "btn-frame-prev":
        store.update({ previewFrame: Math.max(0, state.previewFrame - 1) });
        return;
      case "btn-frame-next":
        store.update({ previewFrame: state.previewFrame + 1 });
        return;
    }
    const flightId = target.dataset["flight"];
    if (flightId) {
      void client
        .flightDetail(flightId)
        .then((detail) => store.update({
          selectedFlight: detail,
          selectedSegmentId: null,
          previewFrame: 0,
        }))
        .catch((err) => console.error("flight load failed", failure(err)));
      return;
    }
    const segmentId = target.dataset["segment"];
    if (segmentId) {
      store.update({ selectedSegmentId: segmentId, previewFrame: 0 });
    }
  });

  render();
  return store;
}

declare global {
  interface Window {
    skypatrolConsole?: Store;
  }
}

if (typeof document !== "undefined") {
  const root = document.getElementById("app");
  if (root) {
    window.skypatrolConsole = mountConsole(root);
  } else {
    console.error(escapeHtml("missing #app mount point"));
  }
}

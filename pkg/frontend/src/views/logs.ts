import { escapeHtml } from "../format.js";
import type { AppState } from "../store.js";

export function renderLogs(state: AppState): string {
  const rows = state.logLines
    .slice(-200)
    .map((line) => `<li>${escapeHtml(line)}</li>`)
    .join("\n");
  return `
<section class="logs" data-view="logs">
  <h2>Backend logs</h2>
  <ul class="log-lines" data-testid="log-lines">${rows || '<li class="empty">no log lines yet</li>'}</ul>
</section>`;
}

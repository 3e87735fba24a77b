import { escapeHtml } from "../format.js";
import type { AppState } from "../store.js";

export function renderLogin(state: AppState): string {
  const error = state.loginError
    ? `<p class="error" data-testid="login-error">${escapeHtml(state.loginError)}</p>`
    : "";
  return `
<section class="login card" data-view="login">
  <h1>Patrol incident console</h1>
  <form id="login-form">
    <label>Username
      <input name="username" autocomplete="username" required>
    </label>
    <label>Password
      <input name="password" type="password" autocomplete="current-password" required>
    </label>
    ${error}
    <button type="submit">Sign in</button>
  </form>
</section>`;
}

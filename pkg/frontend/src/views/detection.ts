import type { FlightFeatures, ResultEvent } from "../api/types.js";
import {
  escapeHtml,
  eventDot,
  formatFtPerMin,
  formatMiles,
  formatSpan,
  formatTau,
  hasFeatures,
  layoutDots,
} from "../format.js";
import type { AppState } from "../store.js";

function renderControls(mode: string): string {
  const canStart = mode !== "detecting";
  const canPause = mode === "detecting";
  const canStop = mode !== "idle";
  const label = mode === "paused" ? "Resume" : "Start";
  return `
<div class="controls" data-mode="${escapeHtml(mode)}">
  <button id="btn-start" ${canStart ? "" : "disabled"}>${label}</button>
  <button id="btn-pause" ${canPause ? "" : "disabled"}>Pause</button>
  <button id="btn-stop" ${canStop ? "" : "disabled"}>Stop</button>
  <span class="mode-badge mode-${escapeHtml(mode)}">${escapeHtml(mode)}</span>
</div>`;
}

export function renderDotMap(events: ResultEvent[]): string {
  const dots = layoutDots(events.map(eventDot));
  const markers = dots
    .map(
      (d) => `<span class="dot dot-${d.color}" data-testid="map-dot"
      data-segment="${escapeHtml(d.segmentId)}" data-verdict="${escapeHtml(d.verdict)}"
      data-color="${d.color}" style="left:${d.x.toFixed(2)}%" title="${escapeHtml(
        d.segmentId)} @ mp ${d.milepost.toFixed(3)}"></span>`,
    )
    .join("\n");
  return `<div class="road-map" data-testid="dot-map">${markers || '<p class="empty">no results yet</p>'}</div>`;
}

export function renderMetrics(features: FlightFeatures | null): string {
  if (!hasFeatures(features)) {
    return `<div class="metrics card" data-testid="metrics"><p class="empty">no incident features yet</p></div>`;
  }
  const f = features as FlightFeatures;
  return `
<div class="metrics card" data-testid="metrics">
  <dl>
    <dt>Congestion length</dt>
    <dd data-testid="congestion-length">${formatMiles(f.congestion_length_mi)}</dd>
    <dt>Propagation speed</dt>
    <dd data-testid="propagation-speed">${formatFtPerMin(f.propagation_speed_ft_min)}</dd>
    <dt>Scene window</dt>
    <dd data-testid="scene-window">${formatSpan(f.scene_window, "s")}</dd>
    <dt>Scene segment</dt>
    <dd>${escapeHtml(f.scene_segment_id ?? "--")}</dd>
  </dl>
</div>`;
}

function renderAlarm(state: AppState): string {
  const alarm = state.alarm;
  if (!alarm || alarm.acknowledged) return "";
  return `
<div class="alarm-banner" role="alert" data-testid="alarm">
  <strong>Incident detected</strong> in segment ${escapeHtml(alarm.segmentId)}
  at t=${alarm.occurredAt} s
  <button id="btn-ack-alarm">Acknowledge</button>
</div>`;
}

function renderResultLog(events: ResultEvent[]): string {
  const rows = events
    .slice(-30)
    .reverse()
    .map(
      (e) => `<li class="verdict-${escapeHtml(e.segment.verdict)}">
      <code>${escapeHtml(e.segment.segment_id)}</code>
      [${e.segment.time_span[0]}, ${e.segment.time_span[1]}] s:
      <strong>${escapeHtml(e.segment.verdict)}</strong>
      (${formatTau(e.segment.tau)})${e.segment.error ? ` ${escapeHtml(e.segment.error)}` : ""}</li>`,
    )
    .join("\n");
  return `<ol class="result-log" data-testid="result-log">${rows}</ol>`;
}

function renderScenePreview(state: AppState): string {
  const f = state.features;
  if (!f?.scene_segment_id || !state.service?.flight_id) return "";
  return `
<figure class="scene-preview card">
  <figcaption>Incident scene: segment ${escapeHtml(f.scene_segment_id)}</figcaption>
  <img data-testid="scene-strip" alt="trajectory image strip of the flagged segment"
       src="/flights/${escapeHtml(state.service.flight_id)}/segments/${escapeHtml(f.scene_segment_id)}/preview">
</figure>`;
}

export function renderDetection(state: AppState): string {
  const mode = state.service?.mode ?? "idle";
  const transport = state.liveTransport === "poll"
    ? `<span class="transport-note">live stream unavailable; polling</span>`
    : "";
  return `
<section class="detection" data-view="detection">
  ${renderAlarm(state)}
  ${renderControls(mode)}
  ${transport}
  ${renderDotMap(state.events)}
  <div class="panels">
    ${renderMetrics(state.features)}
    ${renderResultLog(state.events)}
  </div>
  ${renderScenePreview(state)}
</section>`;
}

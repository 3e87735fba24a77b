import type { FlightDetail, SegmentResult } from "../api/types.js";
import {
  escapeHtml,
  formatMiles,
  formatSpan,
  formatTau,
  layoutDots,
  segmentDot,
} from "../format.js";
import type { AppState } from "../store.js";
import { renderMetrics } from "./detection.js";

function renderQueryForm(): string {
  return `
<form id="history-query" class="history-query">
  <label>Freeway <input name="freeway" placeholder="SR-50"></label>
  <label>Date <input name="date" type="date"></label>
  <button type="submit">Search</button>
</form>`;
}

function renderFlightList(state: AppState): string {
  if (!state.historyQueried) {
    return `<p class="empty">search for archived flights by freeway and date</p>`;
  }
  if (state.flights.length === 0) {
    return `<p class="empty" data-testid="history-empty">no flights found for that freeway and date</p>`;
  }
  const rows = state.flights
    .map(
      (f) => `<li><button class="flight-link" data-flight="${escapeHtml(f.flight_id)}">
      ${escapeHtml(f.flight_id)}</button> ${escapeHtml(f.freeway)} ${escapeHtml(f.date)}</li>`,
    )
    .join("\n");
  return `<ul class="flight-list" data-testid="flight-list">${rows}</ul>`;
}

function renderSegmentRow(segment: SegmentResult, selected: boolean): string {
  const dot = segmentDot(segment);
  return `<li>
  <button class="segment-link ${selected ? "selected" : ""}"
          data-segment="${escapeHtml(segment.segment_id)}">
    <span class="dot dot-${dot.color}" data-color="${dot.color}"></span>
    ${escapeHtml(segment.segment_id)} ${escapeHtml(segment.verdict)}
    span ${formatSpan(segment.gps_span, "mi")}
  </button></li>`;
}

function renderReplay(detail: FlightDetail, state: AppState): string {
  const segment = detail.segments.find(
    (s) => s.segment_id === state.selectedSegmentId);
  if (!segment) return "";
  const frames = segment.image_labels.length;
  const frame = Math.min(state.previewFrame, frames - 1);
  return `
<div class="replay card" data-testid="replay" data-frames="${frames}">
  <h3>Segment ${escapeHtml(segment.segment_id)}: ${escapeHtml(segment.verdict)}</h3>
  <p>Class fractions: ${formatTau(segment.tau)}</p>
  <img data-testid="preview-strip" alt="trajectory image strip"
       src="/flights/${escapeHtml(detail.flight_id)}/segments/${escapeHtml(segment.segment_id)}/preview"
       style="object-position:${frames > 1 ? (-100 * frame) / frames : 0}% 0">
  <div class="replay-controls">
    <button id="btn-frame-prev" ${frame === 0 ? "disabled" : ""}>&lt;</button>
    <span data-testid="frame-counter">window ${frame + 1} / ${frames}</span>
    <button id="btn-frame-next" ${frame >= frames - 1 ? "disabled" : ""}>&gt;</button>
  </div>
</div>`;
}

function renderFlightDetail(state: AppState): string {
  const detail = state.selectedFlight;
  if (!detail) return "";
  const dots = layoutDots(detail.segments.map(segmentDot));
  const markers = dots
    .map(
      (d) => `<span class="dot dot-${d.color}" data-testid="map-dot"
      data-segment="${escapeHtml(d.segmentId)}" data-color="${d.color}"
      style="left:${d.x.toFixed(2)}%"></span>`,
    )
    .join("\n");
  return `
<article class="flight-detail" data-testid="flight-detail">
  <h2>Flight ${escapeHtml(detail.flight_id)}
    <small>${escapeHtml(detail.meta.freeway)} ${escapeHtml(detail.meta.date)}</small></h2>
  <p data-testid="history-congestion-length">
    Congestion length: ${formatMiles(detail.features.congestion_length_mi)}</p>
  <div class="road-map" data-testid="history-dot-map">${markers}</div>
  ${renderMetrics(detail.features)}
  <ul class="segment-list" data-testid="segment-list">
    ${detail.segments
      .map((s) => renderSegmentRow(s, s.segment_id === state.selectedSegmentId))
      .join("\n")}
  </ul>
  ${renderReplay(detail, state)}
</article>`;
}

export function renderHistory(state: AppState): string {
  return `
<section class="history" data-view="history">
  ${renderQueryForm()}
  ${renderFlightList(state)}
  ${renderFlightDetail(state)}
</section>`;
}

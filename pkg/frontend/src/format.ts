/** Presentation helpers. Numbers are rendered exactly as the API sent
 * them; the console never recomputes a feature client-side. */

import type { FlightFeatures, ResultEvent, SegmentResult } from "./api/types.js";

export const VERDICT_COLORS: Record<string, string> = {
  incident: "red",
  recurrent: "orange",
  normal: "green",
};

/** Map dot color is derived solely from the segment verdict. */
export function verdictColor(verdict: string): string {
  return VERDICT_COLORS[verdict] ?? "gray";
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

const BLANK = "--";

/** Render an API-provided length in miles verbatim. */
export function formatMiles(value: number | null | undefined): string {
  return value == null ? BLANK : `${value} mi`;
}

/** Render an API-provided speed in ft/min verbatim. */
export function formatFtPerMin(value: number | null | undefined): string {
  return value == null ? BLANK : `${value} ft/min`;
}

export function formatSeconds(value: number | null | undefined): string {
  return value == null ? BLANK : `${value} s`;
}

export function formatSpan(span: [number, number] | null | undefined,
                           unit: string): string {
  return span == null ? BLANK : `${span[0]} to ${span[1]} ${unit}`;
}

export function formatTau(tau: [number, number, number]): string {
  const [i, r, n] = tau;
  return `I ${i} / R ${r} / N ${n}`;
}

export interface Dot {
  segmentId: string;
  milepost: number;
  color: string;
  verdict: string;
}

export function segmentDot(segment: SegmentResult): Dot {
  const [a, b] = segment.gps_span;
  return {
    segmentId: segment.segment_id,
    milepost: (a + b) / 2,
    color: verdictColor(segment.verdict),
    verdict: segment.verdict,
  };
}

export function eventDot(event: ResultEvent): Dot {
  return segmentDot(event.segment);
}

export interface PlacedDot extends Dot {
  /** horizontal position as a percentage of the road strip width */
  x: number;
}

/** Lay dots along the road strip, scaled to the milepost range seen. */
export function layoutDots(dots: Dot[]): PlacedDot[] {
  if (dots.length === 0) return [];
  const posts = dots.map((d) => d.milepost);
  const lo = Math.min(...posts);
  const hi = Math.max(...posts);
  const span = hi - lo;
  return dots.map((d) => ({
    ...d,
    x: span === 0 ? 50 : 5 + (90 * (d.milepost - lo)) / span,
  }));
}

export function hasFeatures(features: FlightFeatures | null | undefined): boolean {
  return features != null && features.congestion_length_mi != null;
}

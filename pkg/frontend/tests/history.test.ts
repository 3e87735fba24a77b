import { describe, expect, it } from "vitest";

import type { FlightDetail, FlightSummary } from "../src/api/types.js";
import { initialState, type AppState } from "../src/store.js";
import { renderHistory } from "../src/views/history.js";
import detailFixture from "./fixtures/flight_detail.json";
import queryFixture from "./fixtures/flights_query.json";

const detail = detailFixture as unknown as FlightDetail;
const query = queryFixture as unknown as { flights: FlightSummary[] };

function historyState(patch: Partial<AppState>): AppState {
  return { ...initialState(), view: "history", authenticated: true, ...patch };
}

describe("history view", () => {
  it("lists flights returned by the archive query", () => {
    const html = renderHistory(historyState({
      flights: query.flights,
      historyQueried: true,
    }));
    expect(query.flights.length).toBeGreaterThan(0);
    for (const flight of query.flights) {
      expect(html).toContain(flight.flight_id);
      expect(html).toContain(flight.freeway);
    }
  });

  it("shows an empty-state message when the query finds nothing", () => {
    const html = renderHistory(historyState({ flights: [], historyQueried: true }));
    expect(html).toContain("no flights found");
  });

  it("renders the field fixture's 0.265 mi figure verbatim from the API", () => {
    expect(detail.features.congestion_length_mi).toBe(0.265);
    const html = renderHistory(historyState({ selectedFlight: detail }));
    expect(html).toContain("0.265 mi");
    // verbatim: the displayed text is the API number, not a reformatting
    expect(html).toContain(`${detail.features.congestion_length_mi} mi`);
  });

  it("draws one dot per archived segment, red for incidents", () => {
    const html = renderHistory(historyState({ selectedFlight: detail }));
    const dots = html.match(/data-testid="map-dot"/g) ?? [];
    expect(dots.length).toBe(detail.segments.length);
    for (const segment of detail.segments) {
      expect(segment.verdict).toBe("incident");
    }
    expect(html).not.toContain('data-testid="map-dot"\n      data-segment="L0-000" data-color="green"');
    expect(html).toContain('data-color="red"');
  });

  it("replays the selected segment across its 101 preview windows", () => {
    const state = historyState({
      selectedFlight: detail,
      selectedSegmentId: detail.segments[0].segment_id,
    });
    const html = renderHistory(state);
    expect(detail.segments[0].image_labels.length).toBe(101);
    expect(html).toContain('data-frames="101"');
    expect(html).toContain("window 1 / 101");
    const later = renderHistory({ ...state, previewFrame: 100 });
    expect(later).toContain("window 101 / 101");
  });
});

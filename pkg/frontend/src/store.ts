/** Single store through which all UI state updates are serialized. */

import type {
  FlightDetail,
  FlightFeatures,
  FlightSummary,
  ResultEvent,
  ServiceState,
} from "./api/types.js";

export type View = "login" | "detection" | "history" | "logs";

export interface AlarmState {
  /** stream time at which the incident segment ended */
  occurredAt: number;
  segmentId: string;
  acknowledged: boolean;
}

export interface AppState {
  view: View;
  authenticated: boolean;
  loginError: string | null;
  service: ServiceState | null;
  events: ResultEvent[];
  features: FlightFeatures | null;
  alarm: AlarmState | null;
  liveTransport: "stream" | "poll";
  flights: FlightSummary[];
  historyQueried: boolean;
  selectedFlight: FlightDetail | null;
  selectedSegmentId: string | null;
  previewFrame: number;
  logLines: string[];
}

export function initialState(): AppState {
  return {
    view: "login",
    authenticated: false,
    loginError: null,
    service: null,
    events: [],
    features: null,
    alarm: null,
    liveTransport: "stream",
    flights: [],
    historyQueried: false,
    selectedFlight: null,
    selectedSegmentId: null,
    previewFrame: 0,
    logLines: [],
  };
}

/** Fold one live result event into the state. Incident verdicts raise the
 * alarm until the operator acknowledges it. */
export function applyEvent(state: AppState, event: ResultEvent): AppState {
  const alarm =
    event.segment.verdict === "incident"
      ? {
          occurredAt: event.segment.time_span[1],
          segmentId: event.segment.segment_id,
          acknowledged: false,
        }
      : state.alarm;
  return {
    ...state,
    events: [...state.events, event],
    features: event.features,
    alarm,
  };
}

export type Listener = (state: AppState) => void;

export class Store {
  private state: AppState;
  private listeners: Listener[] = [];

  constructor(state: AppState = initialState()) {
    this.state = state;
  }

  get(): AppState {
    return this.state;
  }

  update(patch: Partial<AppState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  dispatchEvent(event: ResultEvent): void {
    this.state = applyEvent(this.state, event);
    for (const listener of this.listeners) listener(this.state);
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }
}

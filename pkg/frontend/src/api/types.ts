/** Payload shapes of the detection service HTTP API. */

export type ServiceMode = "idle" | "detecting" | "paused";

export interface LaneState {
  lane: number;
  segments_completed: number;
  next_start: number | null;
}

export interface ServiceState {
  mode: ServiceMode;
  flight_id: string | null;
  lanes: LaneState[];
  last_publication: number | null;
}

export type Verdict = "incident" | "recurrent" | "normal" | "error";

export interface SegmentResult {
  segment_id: string;
  time_span: [number, number];
  gps_span: [number, number];
  image_labels: number[];
  tau: [number, number, number];
  verdict: Verdict | string;
  error: string | null;
}

export interface FlightFeatures {
  flight_id: string;
  congestion_length_mi: number | null;
  congestion_span: [number, number] | null;
  scene_window: [number, number] | null;
  scene_segment_id: string | null;
  detection_time: number | null;
  tail_observation_time: number | null;
  /** present only when the service compares two patrol passes */
  propagation_speed_ft_min?: number | null;
}

export interface ResultEvent {
  seq: number;
  type: string;
  segment: SegmentResult;
  color: string;
  features: FlightFeatures;
}

export interface FlightSummary {
  flight_id: string;
  freeway: string;
  date: string;
  start_time: number;
}

export interface FlightMeta {
  freeway: string;
  date: string;
  start_time: number;
}

export interface FlightDetail {
  flight_id: string;
  meta: FlightMeta;
  features: FlightFeatures;
  segments: SegmentResult[];
}

export interface LoginResponse {
  token: string;
  expires_in: number;
}

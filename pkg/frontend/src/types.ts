// Shapes of the service's JSON responses (see docs/API.md in the
// repository root). Field names mirror the wire format exactly.

export interface Slot {
  id: string;
  title: string;
  url: string;
  source_domain: string;
  type: string;
  rating: number;
  published_at: string;
}

export interface Page {
  iteration: number;
  counts: Record<string, number>;
  slots: Slot[];
}

export interface Feeds {
  unfiltered: Page;
  balanced: Page;
}

export interface Constraints {
  lower_liberal: number;
  upper_liberal: number;
}

export interface HistoryPoint {
  t: number;
  pct_liberal_unfiltered: number;
  pct_liberal_balanced: number;
  lower_liberal: number;
  upper_liberal: number;
}

export interface SessionResponse {
  session_id: string;
  iteration: number;
  constraints: Constraints;
  feeds: Feeds;
  history: HistoryPoint[];
}

export interface FeedsResponse {
  session_id: string;
  iteration: number;
  constraints: Constraints;
  feeds: Feeds;
}

export interface ClickResponse {
  session_id: string;
  iteration: number;
  feeds: Feeds;
  history_point: HistoryPoint;
}

export interface ConstraintsResponse {
  session_id: string;
  iteration: number;
  constraints: Constraints;
  feeds: Feeds;
  history_point: HistoryPoint;
}

export interface HistoryResponse {
  session_id: string;
  iteration: number;
  history: HistoryPoint[];
}

export type FeedName = "unfiltered" | "balanced";

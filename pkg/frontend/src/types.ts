export type RequestStatus = "pending" | "claimed" | "answered" | "expired";

export type Verdict = "approve" | "reject" | "free-text";

export interface ExpertResponse {
  request_id: string;
  verdict: Verdict;
  text: string;
  expert_id: string;
}

export interface ExpertRequest {
  id: string;
  question: string;
  context: unknown;
  status: RequestStatus;
  created_at: number;
  answered_at: number | null;
  timeout_seconds: number;
  claimed_by: string | null;
  response: ExpertResponse | null;
}

export type StreamEventKind = "created" | "claimed" | "answered" | "expired";

export interface StreamEvent {
  kind: StreamEventKind;
  request: ExpertRequest;
}

export type ConnectionState = "connecting" | "open" | "reconnecting";

import type { ExpertRequest } from "../src/types";

export function makeRequest(overrides: Partial<ExpertRequest> = {}): ExpertRequest {
  return {
    id: "abc123",
    question: "Is this compound safe?",
    context: null,
    status: "pending",
    created_at: 1700000000,
    answered_at: null,
    timeout_seconds: 3600,
    claimed_by: null,
    response: null,
    ...overrides,
  };
}

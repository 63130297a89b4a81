/**
 * Typed client for the review service's /v1 JSON API.
 *
 * The client does no math and no reshaping beyond JSON parsing: every
 * number and string it returns is exactly what the service sent.  The
 * fetch implementation is injectable so tests can run against an
 * in-memory fixture service.
 */

export type DecisionKind =
  | "confirm_disturbing"
  | "confirm_suitable"
  | "needs_more_review";

export type DecisionState = DecisionKind | "undecided";

export type QueueFilter = "undecided" | "decided";

export interface Health {
  status: string;
  model_version: number | null;
  channels: number;
}

export interface GroupDelta {
  group: string;
  delta: number;
}

export interface QueueEntry {
  channel_id: string;
  severity: number;
  probability: number;
  top_groups: GroupDelta[];
  status: string | null;
  flags: string[];
  decision_state: DecisionState;
}

export interface QueuePage {
  entries: QueueEntry[];
  total: number;
  offset: number;
  model_version: number;
}

export interface PolarityBlock {
  positive: number;
  negative: number;
  combined: number;
}

export interface EmojiBlock {
  total: number;
  mean_score: number | null;
}

export interface SentimentBlock {
  description_polarity: PolarityBlock;
  keywords_polarity: PolarityBlock;
  posts_mean_positive: number | null;
  posts_mean_negative: number | null;
  description_emotions: Record<string, number>;
  description_emoji: EmojiBlock;
  posts_emoji: EmojiBlock;
}

export interface StatusBlock {
  available: boolean;
  reason: string;
  raw_message: string | null;
}

export interface DecisionRecord {
  channel_id: string;
  decision: DecisionKind;
  moderator_id: string;
  timestamp: number;
  note?: string | null;
}

/** Raw channel record; numbers rendered verbatim, never recomputed. */
export interface ChannelJson {
  channel_id: string;
  published_at: string | null;
  country: string | null;
  description: string;
  keywords: string[];
  topic_categories: string[];
  made_for_kids: boolean | null;
  view_count: number;
  video_count: number;
  subscriber_count: number | null;
  subscription_count: number;
  post_count: number;
  links_count: number;
  description_char_count: number | null;
  hidden_subscribers: boolean;
  email_present: boolean;
  [extra: string]: unknown;
}

export interface ChannelDetail {
  record: ChannelJson;
  status: StatusBlock;
  sentiment: SentimentBlock;
  decision_state: DecisionState;
  decisions: DecisionRecord[];
  features: Record<string, number> | null;
  attributions: Record<string, number> | null;
  probability: number | null;
  severity: number | null;
  flags?: string[];
  model_version: number | null;
}

export interface DecisionResponse {
  stored: DecisionRecord;
  created: boolean;
}

export interface RetrainAccepted {
  job_id: string;
}

export interface JobStatus {
  job_id: string;
  status: "running" | "succeeded" | "failed";
  model_version: number | null;
  error: string | null;
  eval: Record<string, unknown> | null;
}

export type FetchLike = (
  url: string,
  init?: RequestInit,
) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

export interface QueueParams {
  filter?: QueueFilter;
  limit?: number;
  offset?: number;
}

export class ApiClient {
  private readonly fetchImpl: FetchLike;

  constructor(
    private readonly baseUrl: string = "",
    private readonly token: string | null = null,
    fetchImpl?: FetchLike,
  ) {
    this.fetchImpl = fetchImpl ?? ((url, init) => fetch(url, init));
  }

  async health(): Promise<Health> {
    return this.json("GET", "/v1/health");
  }

  async queue(params: QueueParams = {}): Promise<QueuePage> {
    const query = new URLSearchParams();
    if (params.filter !== undefined) query.set("filter", params.filter);
    if (params.limit !== undefined) query.set("limit", String(params.limit));
    if (params.offset !== undefined) query.set("offset", String(params.offset));
    const suffix = query.toString() ? `?${query.toString()}` : "";
    return this.json("GET", `/v1/queue${suffix}`);
  }

  async channel(channelId: string): Promise<ChannelDetail> {
    return this.json("GET", `/v1/channels/${encodeURIComponent(channelId)}`);
  }

  async submitDecision(
    channelId: string,
    decision: DecisionKind,
    moderatorId: string,
    note?: string,
  ): Promise<DecisionResponse> {
    const body: Record<string, string> = {
      decision,
      moderator_id: moderatorId,
    };
    if (note !== undefined) body.note = note;
    return this.json(
      "POST",
      `/v1/channels/${encodeURIComponent(channelId)}/decision`,
      body,
    );
  }

  async exportDecisions(): Promise<string> {
    const response = await this.request("GET", "/v1/decisions/export");
    return response.text();
  }

  async retrain(): Promise<RetrainAccepted> {
    return this.json("POST", "/v1/retrain");
  }

  async job(jobId: string): Promise<JobStatus> {
    return this.json("GET", `/v1/jobs/${encodeURIComponent(jobId)}`);
  }

  private async request(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<Response> {
    const headers: Record<string, string> = {};
    if (this.token !== null) headers["X-Api-Token"] = this.token;
    const init: RequestInit = { method, headers };
    if (body !== undefined) {
      headers["Content-Type"] = "application/json";
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (!response.ok) {
      throw new ApiError(response.status, await errorDetail(response));
    }
    return response;
  }

  private async json<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.request(method, path, body);
    return (await response.json()) as T;
  }
}

async function errorDetail(response: Response): Promise<string> {
  try {
    const payload = (await response.json()) as { detail?: unknown };
    if (typeof payload.detail === "string") return payload.detail;
    return JSON.stringify(payload);
  } catch {
    return response.statusText || `status ${response.status}`;
  }
}

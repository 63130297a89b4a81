/**
 * In-memory fixture implementing the service's /v1 contract for tests:
 * same routes, same JSON field names, same status codes.  Behavior is
 * programmable (failure injection, retrain busy/threshold) and every
 * request is logged for assertions.
 */

import {
  ChannelDetail,
  DecisionKind,
  DecisionState,
  FetchLike,
  QueueEntry,
} from "../src/api.js";

export interface LoggedRequest {
  method: string;
  path: string;
  body: unknown;
  headers: Record<string, string>;
}

export type RetrainBehavior =
  | { kind: "accept" }
  | { kind: "busy" }
  | { kind: "threshold"; needed: number; have: number };

interface JobRecord {
  job_id: string;
  status: "running" | "succeeded" | "failed";
  model_version: number | null;
  error: string | null;
  eval: Record<string, unknown> | null;
}

export function makeEntry(
  channelId: string,
  severity: number,
  overrides: Partial<QueueEntry> = {},
): QueueEntry {
  return {
    channel_id: channelId,
    severity,
    probability: severity,
    top_groups: [
      { group: "top_keywords", delta: 0.21 },
      { group: "polarity", delta: 0.08 },
    ],
    status: "available",
    flags: [],
    decision_state: "undecided",
    ...overrides,
  };
}

export function makeDetail(
  channelId: string,
  overrides: Partial<ChannelDetail> = {},
): ChannelDetail {
  return {
    record: {
      channel_id: channelId,
      published_at: "2019-03-01",
      country: "US",
      description: "surprise eggs and family pranks",
      keywords: ["surprise", "pranks"],
      topic_categories: ["Entertainment"],
      made_for_kids: null,
      view_count: 123456,
      video_count: 321,
      subscriber_count: 4500,
      subscription_count: 12,
      post_count: 7,
      links_count: 2,
      description_char_count: 31,
      hidden_subscribers: false,
      email_present: true,
    },
    status: { available: true, reason: "available", raw_message: null },
    sentiment: {
      description_polarity: { positive: 3, negative: -1, combined: 2 },
      keywords_polarity: { positive: 1, negative: -2, combined: -1 },
      posts_mean_positive: 2.5,
      posts_mean_negative: -1.5,
      description_emotions: {
        anger: 0,
        anticipation: 0.25,
        disgust: 0,
        fear: 0.125,
        joy: 0.5,
        sadness: 0,
        surprise: 0.125,
        trust: 0,
      },
      description_emoji: { total: 3, mean_score: 0.747 },
      posts_emoji: { total: 0, mean_score: null },
    },
    decision_state: "undecided",
    decisions: [],
    features: { view_count: 1.25, "keyword:pranks": 1 },
    attributions: { top_keywords: 0.21, polarity: 0.08, activity_counts: -0.02 },
    probability: 0.97,
    severity: 0.97,
    flags: [],
    model_version: 1,
  };
}

export class FixtureService {
  readonly requests: LoggedRequest[] = [];
  modelVersion = 1;
  retrainBehavior: RetrainBehavior = { kind: "accept" };
  /** When set, the next POST …/decision returns this status and clears. */
  failNextDecision: number | null = null;
  /** When true, every request rejects as if the service were down. */
  offline = false;
  requiredToken: string | null = null;

  private readonly jobs = new Map<string, JobRecord>();
  private jobCounter = 0;

  constructor(
    public entries: QueueEntry[],
    private readonly details = new Map<string, ChannelDetail>(),
  ) {}

  detailFor(channelId: string): ChannelDetail {
    let detail = this.details.get(channelId);
    if (!detail) {
      detail = makeDetail(channelId);
      this.details.set(channelId, detail);
    }
    return detail;
  }

  /** Flip the most recent accepted retrain job to a terminal state. */
  finishRetrain(outcome: "succeeded" | "failed", error?: string): void {
    const job = [...this.jobs.values()].at(-1);
    if (!job || job.status !== "running") {
      throw new Error("no running retrain job to finish");
    }
    job.status = outcome;
    if (outcome === "succeeded") {
      this.modelVersion += 1;
      job.model_version = this.modelVersion;
      job.eval = { auc: 0.9 };
    } else {
      job.error = error ?? "synthetic failure";
    }
  }

  readonly fetch: FetchLike = async (url, init) => {
    if (this.offline) throw new TypeError("fetch failed");
    const method = init?.method ?? "GET";
    const parsed = new URL(url, "http://fixture.test");
    const path = parsed.pathname;
    const headers = Object.fromEntries(
      Object.entries((init?.headers ?? {}) as Record<string, string>),
    );
    const body =
      typeof init?.body === "string" ? JSON.parse(init.body) : undefined;
    this.requests.push({ method, path, body, headers });

    if (
      this.requiredToken !== null &&
      path !== "/v1/health" &&
      headers["X-Api-Token"] !== this.requiredToken
    ) {
      return error(401, "missing or invalid X-Api-Token header");
    }

    if (method === "GET" && path === "/v1/health") {
      return json(200, {
        status: "ok",
        model_version: this.modelVersion,
        channels: this.entries.length,
      });
    }
    if (method === "GET" && path === "/v1/queue") {
      return this.handleQueue(parsed);
    }
    const decisionMatch = path.match(/^\/v1\/channels\/([^/]+)\/decision$/);
    if (method === "POST" && decisionMatch) {
      return this.handleDecision(decodeURIComponent(decisionMatch[1]!), body);
    }
    const channelMatch = path.match(/^\/v1\/channels\/([^/]+)$/);
    if (method === "GET" && channelMatch) {
      const id = decodeURIComponent(channelMatch[1]!);
      if (!this.entries.some((e) => e.channel_id === id)) {
        return error(404, `unknown channel '${id}'`);
      }
      return json(200, this.detailFor(id));
    }
    if (method === "GET" && path === "/v1/decisions/export") {
      return this.handleExport();
    }
    if (method === "POST" && path === "/v1/retrain") {
      return this.handleRetrain();
    }
    const jobMatch = path.match(/^\/v1\/jobs\/([^/]+)$/);
    if (method === "GET" && jobMatch) {
      const job = this.jobs.get(decodeURIComponent(jobMatch[1]!));
      if (!job) return error(404, "unknown job");
      return json(200, job);
    }
    return error(404, `no route for ${method} ${path}`);
  };

  private handleQueue(url: URL): Response {
    const filter = url.searchParams.get("filter");
    if (filter !== null && filter !== "undecided" && filter !== "decided") {
      return error(400, "filter must be one of ('undecided', 'decided')");
    }
    let selected = this.entries;
    if (filter === "undecided") {
      selected = selected.filter((e) => e.decision_state === "undecided");
    } else if (filter === "decided") {
      selected = selected.filter((e) => e.decision_state !== "undecided");
    }
    const offset = Number(url.searchParams.get("offset") ?? "0");
    const limit = Number(url.searchParams.get("limit") ?? String(selected.length));
    const page = selected.slice(offset, offset + limit);
    return json(
      200,
      {
        entries: page,
        total: selected.length,
        offset,
        model_version: this.modelVersion,
      },
      { "X-Total-Count": String(selected.length) },
    );
  }

  private handleDecision(channelId: string, body: unknown): Response {
    if (this.failNextDecision !== null) {
      const status = this.failNextDecision;
      this.failNextDecision = null;
      return error(status, status >= 500 ? "synthetic server failure" : "rejected");
    }
    const entry = this.entries.find((e) => e.channel_id === channelId);
    if (!entry) return error(404, `unknown channel '${channelId}'`);
    const payload = body as {
      decision?: DecisionKind;
      moderator_id?: string;
      note?: string;
    };
    if (!payload?.decision || !payload.moderator_id) {
      return error(400, "decision and moderator_id are required");
    }
    const created = entry.decision_state === "undecided";
    entry.decision_state = payload.decision as DecisionState;
    const detail = this.detailFor(channelId);
    detail.decision_state = entry.decision_state;
    const stored = {
      channel_id: channelId,
      decision: payload.decision,
      moderator_id: payload.moderator_id,
      timestamp: 1700000000 + this.requests.length,
      note: payload.note ?? null,
    };
    detail.decisions = [stored, ...detail.decisions];
    return json(created ? 201 : 200, { stored, created });
  }

  private handleExport(): Response {
    const lines = ["channel_id,label"];
    for (const entry of this.entries) {
      if (entry.decision_state === "confirm_disturbing") {
        lines.push(`${entry.channel_id},disturbing`);
      } else if (entry.decision_state === "confirm_suitable") {
        lines.push(`${entry.channel_id},suitable`);
      }
    }
    return new Response(lines.join("\n") + "\n", {
      status: 200,
      headers: { "Content-Type": "text/csv; charset=utf-8" },
    });
  }

  private handleRetrain(): Response {
    const behavior = this.retrainBehavior;
    if (behavior.kind === "busy") {
      return error(409, "retraining is already in progress");
    }
    if (behavior.kind === "threshold") {
      return error(
        409,
        `need at least ${behavior.needed} new decisions to retrain, have ${behavior.have}`,
      );
    }
    this.jobCounter += 1;
    const job: JobRecord = {
      job_id: `job-${this.jobCounter}`,
      status: "running",
      model_version: null,
      error: null,
      eval: null,
    };
    this.jobs.set(job.job_id, job);
    return json(202, { job_id: job.job_id });
  }
}

function json(
  status: number,
  payload: unknown,
  headers: Record<string, string> = {},
): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "Content-Type": "application/json", ...headers },
  });
}

function error(status: number, detail: string): Response {
  return json(status, { detail });
}

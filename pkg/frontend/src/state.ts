/**
 * Application state for the review queue.
 *
 * The store is the single owner of client state; rendering is a pure
 * function of a snapshot.  Decision submissions update the UI
 * optimistically and roll back on failure, and concurrent submissions
 * for the same channel are deduplicated so a double-click stores one
 * decision.  The service owns all truth: nothing here computes scores,
 * and nothing persists beyond the session.
 */

import {
  ApiClient,
  ApiError,
  ChannelDetail,
  DecisionKind,
  DecisionState,
  QueueEntry,
  QueueFilter,
} from "./api.js";

export type RetrainPhase =
  | "idle"
  | "requesting"
  | "running"
  | "succeeded"
  | "failed"
  | "blocked";

export interface RetrainState {
  phase: RetrainPhase;
  jobId: string | null;
  /** Human-readable note: the 409 detail, the failure error, etc. */
  message: string | null;
  /** Model version reported by a succeeded job. */
  newVersion: number | null;
}

export interface QueueState {
  entries: QueueEntry[];
  total: number;
  offset: number;
  limit: number;
  filter: QueueFilter | null;
  modelVersion: number | null;
  loading: boolean;
}

export interface DetailState {
  channelId: string;
  data: ChannelDetail | null;
  loading: boolean;
  /** Inline error from a rejected decision (4xx), shown next to the actions. */
  decisionError: string | null;
}

export interface AppState {
  queue: QueueState;
  detail: DetailState | null;
  selectedIndex: number;
  retrain: RetrainState;
  /** Banner error for failed loads; cleared by the next successful load. */
  loadError: string | null;
  moderatorId: string;
}

type Listener = (state: AppState) => void;

const DEFAULT_LIMIT = 20;

export class Store {
  private readonly listeners: Listener[] = [];
  private readonly inflightDecisions = new Map<string, Promise<void>>();

  readonly state: AppState;

  constructor(
    private readonly api: ApiClient,
    moderatorId: string,
    limit: number = DEFAULT_LIMIT,
  ) {
    this.state = {
      queue: {
        entries: [],
        total: 0,
        offset: 0,
        limit,
        filter: null,
        modelVersion: null,
        loading: false,
      },
      detail: null,
      selectedIndex: 0,
      retrain: { phase: "idle", jobId: null, message: null, newVersion: null },
      loadError: null,
      moderatorId,
    };
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      const i = this.listeners.indexOf(listener);
      if (i >= 0) this.listeners.splice(i, 1);
    };
  }

  private notify(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  // -- queue -----------------------------------------------------------------

  async refreshQueue(): Promise<void> {
    const queue = this.state.queue;
    queue.loading = true;
    this.notify();
    try {
      const page = await this.api.queue({
        offset: queue.offset,
        limit: queue.limit,
        ...(queue.filter !== null ? { filter: queue.filter } : {}),
      });
      // server order is queue order: entries are stored exactly as received
      queue.entries = page.entries;
      queue.total = page.total;
      queue.offset = page.offset;
      queue.modelVersion = page.model_version;
      this.state.loadError = null;
      if (this.state.selectedIndex >= page.entries.length) {
        this.state.selectedIndex = Math.max(0, page.entries.length - 1);
      }
    } catch (error) {
      this.state.loadError = describe(error);
    } finally {
      queue.loading = false;
      this.notify();
    }
  }

  async setFilter(filter: QueueFilter | null): Promise<void> {
    this.state.queue.filter = filter;
    this.state.queue.offset = 0;
    await this.refreshQueue();
  }

  hasNextPage(): boolean {
    const { offset, limit, total } = this.state.queue;
    return offset + limit < total;
  }

  hasPrevPage(): boolean {
    return this.state.queue.offset > 0;
  }

  async nextPage(): Promise<void> {
    if (!this.hasNextPage()) return;
    this.state.queue.offset += this.state.queue.limit;
    await this.refreshQueue();
  }

  async prevPage(): Promise<void> {
    if (!this.hasPrevPage()) return;
    const queue = this.state.queue;
    queue.offset = Math.max(0, queue.offset - queue.limit);
    await this.refreshQueue();
  }

  moveSelection(delta: number): void {
    const count = this.state.queue.entries.length;
    if (count === 0) return;
    const next = this.state.selectedIndex + delta;
    this.state.selectedIndex = Math.min(count - 1, Math.max(0, next));
    this.notify();
  }

  selectedEntry(): QueueEntry | null {
    return this.state.queue.entries[this.state.selectedIndex] ?? null;
  }

  // -- detail ----------------------------------------------------------------

  async openChannel(channelId: string): Promise<void> {
    this.state.detail = {
      channelId,
      data: null,
      loading: true,
      decisionError: null,
    };
    this.notify();
    try {
      const data = await this.api.channel(channelId);
      // a stale response for a previously opened panel must not clobber
      if (this.state.detail?.channelId !== channelId) return;
      this.state.detail.data = data;
    } catch (error) {
      if (this.state.detail?.channelId !== channelId) return;
      this.state.detail.decisionError = describe(error);
    } finally {
      if (this.state.detail?.channelId === channelId) {
        this.state.detail.loading = false;
        this.notify();
      }
    }
  }

  closeDetail(): void {
    this.state.detail = null;
    this.notify();
  }

  // -- decisions ---------------------------------------------------------------

  /**
   * Record a decision with an optimistic badge update.
   *
   * The queue entry (and open detail panel) flips to the new state
   * immediately; on failure everything rolls back and the error lands
   * inline.  A second call for the same channel while one is in flight
   * returns the first call's promise — one request, one stored decision.
   */
  submitDecision(channelId: string, decision: DecisionKind): Promise<void> {
    const existing = this.inflightDecisions.get(channelId);
    if (existing !== undefined) return existing;
    const task = this.doSubmit(channelId, decision).finally(() => {
      this.inflightDecisions.delete(channelId);
    });
    this.inflightDecisions.set(channelId, task);
    return task;
  }

  private async doSubmit(
    channelId: string,
    decision: DecisionKind,
  ): Promise<void> {
    const entry = this.state.queue.entries.find(
      (e) => e.channel_id === channelId,
    );
    const detail =
      this.state.detail?.channelId === channelId ? this.state.detail : null;
    const previous: DecisionState | null =
      entry?.decision_state ?? detail?.data?.decision_state ?? null;

    if (entry) entry.decision_state = decision;
    if (detail?.data) detail.data.decision_state = decision;
    if (detail) detail.decisionError = null;
    this.notify();

    try {
      const response = await this.api.submitDecision(
        channelId,
        decision,
        this.state.moderatorId,
      );
      if (detail?.data) {
        detail.data.decisions = [
          response.stored,
          ...detail.data.decisions.filter(
            (d) => d.moderator_id !== response.stored.moderator_id,
          ),
        ];
      }
      this.notify();
    } catch (error) {
      if (entry && previous !== null) entry.decision_state = previous;
      if (detail?.data && previous !== null) {
        detail.data.decision_state = previous;
      }
      const message = describe(error);
      if (detail) detail.decisionError = message;
      else this.state.loadError = message;
      this.notify();
    }
  }

  // -- retraining --------------------------------------------------------------

  async startRetrain(): Promise<void> {
    if (
      this.state.retrain.phase === "requesting" ||
      this.state.retrain.phase === "running"
    ) {
      return;
    }
    this.state.retrain = {
      phase: "requesting",
      jobId: null,
      message: null,
      newVersion: null,
    };
    this.notify();
    try {
      const accepted = await this.api.retrain();
      this.state.retrain = {
        phase: "running",
        jobId: accepted.job_id,
        message: null,
        newVersion: null,
      };
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        // either a retrain is already running or the decision threshold
        // is not met; both render as a blocked state with the detail
        this.state.retrain = {
          phase: "blocked",
          jobId: null,
          message: error.detail,
          newVersion: null,
        };
      } else {
        this.state.retrain = {
          phase: "failed",
          jobId: null,
          message: describe(error),
          newVersion: null,
        };
      }
    }
    this.notify();
  }

  /** Poll the running job once; call from a timer until the phase settles. */
  async checkRetrain(): Promise<void> {
    const { phase, jobId } = this.state.retrain;
    if (phase !== "running" || jobId === null) return;
    try {
      const job = await this.api.job(jobId);
      if (job.status === "running") return;
      if (job.status === "succeeded") {
        this.state.retrain = {
          phase: "succeeded",
          jobId,
          message: null,
          newVersion: job.model_version,
        };
        await this.refreshQueue();
      } else {
        // the service keeps serving the old model after a failed job
        this.state.retrain = {
          phase: "failed",
          jobId,
          message: job.error,
          newVersion: null,
        };
      }
    } catch (error) {
      this.state.retrain = {
        phase: "failed",
        jobId,
        message: describe(error),
        newVersion: null,
      };
    }
    this.notify();
  }

  dismissRetrain(): void {
    const { phase } = this.state.retrain;
    if (phase === "running" || phase === "requesting") return;
    this.state.retrain = {
      phase: "idle",
      jobId: null,
      message: null,
      newVersion: null,
    };
    this.notify();
  }
}

function describe(error: unknown): string {
  if (error instanceof ApiError) return error.message;
  if (error instanceof Error) return `service unreachable: ${error.message}`;
  return String(error);
}

/**
 * Pure rendering: AppState snapshot -> HTML string.
 *
 * No fetching, no timers, no DOM reads.  Every number shown is the
 * verbatim string form of a service response field — the client never
 * rounds, rescales, or recomputes a score.  Interactive elements carry
 * data-action attributes; the bootstrap wires them via event
 * delegation.
 */

import { ChannelDetail, DecisionState, QueueEntry } from "./api.js";
import { AppState, DetailState, QueueState, RetrainState } from "./state.js";

const DECISION_LABELS: Record<DecisionState, string> = {
  undecided: "undecided",
  confirm_disturbing: "confirmed disturbing",
  confirm_suitable: "confirmed suitable",
  needs_more_review: "needs more review",
};

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

/** Verbatim display of a service-provided value; null renders as an em dash. */
function verbatim(value: number | string | boolean | null | undefined): string {
  if (value === null || value === undefined) return "—";
  return escapeHtml(String(value));
}

export function renderApp(state: AppState): string {
  return [
    '<div class="app">',
    renderToolbar(state),
    renderRetrainBanner(state.retrain),
    renderLoadError(state.loadError),
    renderQueue(state.queue, state.selectedIndex),
    renderPagination(state.queue),
    state.detail ? renderDetail(state.detail) : "",
    renderKeyHints(),
    "</div>",
  ].join("\n");
}

function renderToolbar(state: AppState): string {
  const { queue } = state;
  const option = (value: string, label: string) => {
    const selected = (queue.filter ?? "") === value ? " selected" : "";
    return `<option value="${value}"${selected}>${label}</option>`;
  };
  return `
<header class="toolbar">
  <h1>Review queue</h1>
  <span class="model-version">model ${
    queue.modelVersion === null ? "—" : `v${verbatim(queue.modelVersion)}`
  }</span>
  <label>show
    <select data-action="filter">
      ${option("", "all")}
      ${option("undecided", "undecided")}
      ${option("decided", "decided")}
    </select>
  </label>
  <button type="button" data-action="refresh">refresh</button>
  <button type="button" data-action="retrain">retrain</button>
  <span class="moderator">moderator: ${escapeHtml(state.moderatorId)}</span>
</header>`;
}

export function renderRetrainBanner(retrain: RetrainState): string {
  if (retrain.phase === "idle") return "";
  const dismiss =
    retrain.phase === "requesting" || retrain.phase === "running"
      ? ""
      : '<button type="button" data-action="dismiss-retrain">dismiss</button>';
  let text: string;
  switch (retrain.phase) {
    case "requesting":
      text = "requesting retrain…";
      break;
    case "running":
      text = `retrain in progress (job ${verbatim(retrain.jobId)})`;
      break;
    case "blocked":
      text = `retrain in progress or not ready: ${verbatim(retrain.message)}`;
      break;
    case "succeeded":
      text = `retraining finished: now serving model v${verbatim(retrain.newVersion)}`;
      break;
    default:
      text = `retraining failed — previous model still serving (${verbatim(retrain.message)})`;
  }
  return `<div class="banner retrain-banner" data-phase="${retrain.phase}">${text} ${dismiss}</div>`;
}

function renderLoadError(loadError: string | null): string {
  if (loadError === null) return "";
  return `
<div class="banner error-banner" role="alert">
  ${escapeHtml(loadError)}
  <button type="button" data-action="refresh">retry</button>
</div>`;
}

export function renderQueue(queue: QueueState, selectedIndex: number): string {
  if (queue.entries.length === 0) {
    const message = queue.loading ? "loading…" : "queue is empty";
    return `<p class="empty-state">${message}</p>`;
  }
  const rows = queue.entries
    .map((entry, index) => renderRow(entry, index === selectedIndex))
    .join("\n");
  return `
<table class="queue">
  <thead>
    <tr>
      <th>channel</th><th>severity</th><th>probability</th>
      <th>drivers</th><th>status</th><th>flags</th>
      <th>decision</th><th>actions</th>
    </tr>
  </thead>
  <tbody>
${rows}
  </tbody>
</table>`;
}

function renderRow(entry: QueueEntry, selected: boolean): string {
  const id = escapeHtml(entry.channel_id);
  const drivers = entry.top_groups
    .map((g) => `${escapeHtml(g.group)} ${verbatim(g.delta)}`)
    .join(", ");
  const flags = entry.flags.map(escapeHtml).join(", ");
  return `
<tr data-channel-id="${id}"${selected ? ' class="selected"' : ""}>
  <td><button type="button" data-action="open" data-channel-id="${id}">${id}</button></td>
  <td class="severity">${verbatim(entry.severity)}</td>
  <td class="probability">${verbatim(entry.probability)}</td>
  <td class="drivers">${drivers}</td>
  <td><span class="status-badge status-${escapeHtml(entry.status ?? "unknown")}">${verbatim(entry.status)}</span></td>
  <td class="flags">${flags}</td>
  <td>${renderDecisionBadge(entry.decision_state)}</td>
  <td class="actions">${renderDecisionButtons(entry.channel_id)}</td>
</tr>`;
}

export function renderDecisionBadge(state: DecisionState): string {
  return `<span class="decision-badge" data-state="${state}">${DECISION_LABELS[state]}</span>`;
}

function renderDecisionButtons(channelId: string): string {
  const id = escapeHtml(channelId);
  const button = (decision: string, label: string) =>
    `<button type="button" data-action="decide" data-channel-id="${id}" ` +
    `data-decision="${decision}">${label}</button>`;
  return [
    button("confirm_disturbing", "disturbing"),
    button("confirm_suitable", "suitable"),
    button("needs_more_review", "defer"),
  ].join(" ");
}

export function renderPagination(queue: QueueState): string {
  const first = queue.total === 0 ? 0 : queue.offset + 1;
  const last = Math.min(queue.offset + queue.entries.length, queue.total);
  const prevDisabled = queue.offset <= 0 ? " disabled" : "";
  const nextDisabled = queue.offset + queue.limit >= queue.total ? " disabled" : "";
  return `
<nav class="pagination">
  <button type="button" data-action="prev-page"${prevDisabled}>previous</button>
  <span class="range">${first}–${last} of ${queue.total}</span>
  <button type="button" data-action="next-page"${nextDisabled}>next</button>
</nav>`;
}

export function renderDetail(detail: DetailState): string {
  const id = escapeHtml(detail.channelId);
  const header = `
  <header>
    <h2>${id}</h2>
    <button type="button" data-action="close-detail">close</button>
  </header>`;
  if (detail.loading) {
    return `<aside class="detail" data-channel-id="${id}">${header}<p>loading…</p></aside>`;
  }
  const error = detail.decisionError
    ? `<p class="inline-error" role="alert">${escapeHtml(detail.decisionError)}</p>`
    : "";
  if (detail.data === null) {
    return `<aside class="detail" data-channel-id="${id}">${header}${error}</aside>`;
  }
  const d = detail.data;
  return `
<aside class="detail" data-channel-id="${id}">
${header}
  <p>
    ${renderDecisionBadge(d.decision_state)}
    <span class="status-badge">${verbatim(d.status.reason)}</span>
    ${d.status.raw_message ? `<em>${escapeHtml(d.status.raw_message)}</em>` : ""}
  </p>
  ${error}
  <div class="detail-actions">${renderDecisionButtons(detail.channelId)}</div>
  ${renderRecordFacts(d)}
  ${renderScores(d)}
  ${renderSentiment(d)}
  ${renderDecisionHistory(d)}
</aside>`;
}

function renderRecordFacts(d: ChannelDetail): string {
  const r = d.record;
  const subscriber = r.hidden_subscribers
    ? '<em class="hidden-count">hidden</em>'
    : verbatim(r.subscriber_count);
  const madeForKids =
    r.made_for_kids === null ? "undeclared" : verbatim(r.made_for_kids);
  const fact = (label: string, value: string) =>
    `<div class="fact"><dt>${label}</dt><dd>${value}</dd></div>`;
  return `
<dl class="facts">
  ${fact("views", verbatim(r.view_count))}
  ${fact("videos", verbatim(r.video_count))}
  ${fact("subscribers", subscriber)}
  ${fact("subscriptions", verbatim(r.subscription_count))}
  ${fact("posts", verbatim(r.post_count))}
  ${fact("links", verbatim(r.links_count))}
  ${fact("made for kids", madeForKids)}
  ${fact("created", verbatim(r.published_at))}
  ${fact("country", verbatim(r.country))}
</dl>
<p class="description">${escapeHtml(r.description)}</p>
<p class="keywords">${r.keywords.map(escapeHtml).join(", ")}</p>`;
}

function renderScores(d: ChannelDetail): string {
  const attributions = d.attributions
    ? Object.entries(d.attributions)
        .sort(([ga, da], [gb, db]) => db - da || ga.localeCompare(gb))
        .map(
          ([group, delta]) =>
            `<li>${escapeHtml(group)}: <span class="attr-delta">${verbatim(delta)}</span></li>`,
        )
        .join("\n")
    : "<li>no model loaded</li>";
  return `
<section class="scores">
  <p>severity <strong class="severity">${verbatim(d.severity)}</strong>,
     probability <strong class="probability">${verbatim(d.probability)}</strong></p>
  <ul class="attributions">${attributions}</ul>
</section>`;
}

function renderSentiment(d: ChannelDetail): string {
  const s = d.sentiment;
  const emotions = Object.entries(s.description_emotions)
    .map(([name, value]) => {
      const width = Math.round(Math.min(1, Math.max(0, value)) * 100);
      return `
    <div class="emotion" data-emotion="${escapeHtml(name)}">
      <span class="emotion-name">${escapeHtml(name)}</span>
      <span class="bar"><span class="fill" style="width:${width}%"></span></span>
      <span class="emotion-value">${verbatim(value)}</span>
    </div>`;
    })
    .join("\n");
  const polarity = (label: string, block: { positive: number; negative: number; combined: number }) => `
  <div class="polarity" data-polarity="${label}">
    <span>${label}</span>
    <span class="pol-positive">${verbatim(block.positive)}</span>
    <span class="pol-negative">${verbatim(block.negative)}</span>
    <span class="pol-combined">${verbatim(block.combined)}</span>
  </div>`;
  return `
<section class="sentiment">
  <h3>emotions</h3>
  <div class="emotion-wheel">${emotions}</div>
  <h3>polarity (positive / negative / combined)</h3>
  ${polarity("description", s.description_polarity)}
  ${polarity("keywords", s.keywords_polarity)}
  <h3>emoji</h3>
  <p>description: ${verbatim(s.description_emoji.total)} seen,
     mean score <span class="emoji-mean">${verbatim(s.description_emoji.mean_score)}</span>;
     posts: ${verbatim(s.posts_emoji.total)} seen,
     mean score ${verbatim(s.posts_emoji.mean_score)}</p>
</section>`;
}

function renderDecisionHistory(d: ChannelDetail): string {
  if (d.decisions.length === 0) return "";
  const items = d.decisions
    .map(
      (record) => `
    <li>
      ${renderDecisionBadge(record.decision)}
      by ${escapeHtml(record.moderator_id)}
      ${record.note ? `— ${escapeHtml(record.note)}` : ""}
    </li>`,
    )
    .join("\n");
  return `<section class="history"><h3>decisions</h3><ul>${items}</ul></section>`;
}

function renderKeyHints(): string {
  return `
<footer class="key-hints">
  j/k move · enter open · esc close · d disturbing · s suitable ·
  u defer · n/p page · r retrain · g refresh
</footer>`;
}

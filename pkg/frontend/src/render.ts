/**
 * Pure HTML renderers. Everything shown to the user comes straight from an
 * API response; no retrieval logic lives on the client.
 */

import {
  ApiError,
  ProblemDetail,
  QueryResponse,
  Stats,
} from "./api.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

export function renderQueryResults(response: QueryResponse): string {
  const header = `
    <div class="parsed" data-testid="parsed">
      <div><span class="label">parsed postfix</span>
           <code>${escapeHtml(response.parsedExpression)}</code></div>
      <div><span class="label">signature</span>
           <code data-testid="query-signature">${escapeHtml(response.signature)}</code></div>
    </div>`;
  if (response.results.length === 0) {
    return `${header}<p class="empty">No problem in the repository shares this problem model.</p>`;
  }
  const cards = response.results
    .map(
      (result) => `
    <li class="result-card" data-signature="${escapeHtml(result.signature)}">
      <div class="result-meta">
        <span class="rank">#${result.rank}</span>
        <a href="#/repository/${encodeURIComponent(result.problemId)}">${escapeHtml(result.problemId)}</a>
        <span class="score">lexical score ${result.lexScore.toFixed(3)}</span>
      </div>
      <p class="result-text">${escapeHtml(result.text)}</p>
    </li>`,
    )
    .join("");
  return `${header}<ol class="results" data-testid="results">${cards}</ol>`;
}

export function renderApiError(error: ApiError): string {
  const stage = error.parseStage();
  const label =
    stage === null
      ? error.code
      : `${error.code} in ${escapeHtml(stage)}`;
  return `
    <div class="inline-error" data-testid="inline-error">
      <strong>${label}</strong>
      <span>${escapeHtml(error.message)}</span>
    </div>`;
}

export function renderNetworkBanner(message: string): string {
  return `
    <div class="banner" data-testid="banner" role="alert">
      <span>${escapeHtml(message)}</span>
      <button type="button" data-action="retry">Retry</button>
    </div>`;
}

export function renderStats(stats: Stats): string {
  return `
    <div class="stats" data-testid="stats">
      <p>${stats.total} problems, ${stats.buckets} buckets</p>
      <table>
        <tr><th>indexed</th><td>${stats.indexed}</td></tr>
        <tr><th>failed</th><td>${stats.failed}</td></tr>
        <tr><th>largest bucket</th><td>${stats.largestBucket}</td></tr>
      </table>
    </div>`;
}

export function renderProblemDetail(problem: ProblemDetail): string {
  const solution =
    problem.solution === null ? "—" : escapeHtml(String(problem.solution));
  return `
    <article class="problem-detail" data-testid="problem-detail">
      <h3>${escapeHtml(problem.id)}</h3>
      <p>${escapeHtml(problem.text)}</p>
      <dl>
        <dt>equation</dt><dd><code>${escapeHtml(problem.equation)}</code></dd>
        <dt>text numbers</dt><dd>${problem.textNumbers.map(String).join(", ") || "—"}</dd>
        <dt>source</dt><dd>${escapeHtml(problem.source)}</dd>
        <dt>solution</dt><dd>${solution}</dd>
      </dl>
      <p><a href="#/repository">back to repository</a></p>
    </article>`;
}

export function renderNotFound(id: string): string {
  return `
    <div class="not-found" data-testid="not-found">
      <p>No problem with id <code>${escapeHtml(id)}</code> exists.</p>
      <p><a href="#/repository">back to repository</a></p>
    </div>`;
}

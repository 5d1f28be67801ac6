/**
 * Page controllers and the two-route hash router.
 *
 * #/query           — query console (default)
 * #/repository      — stats + add-problem form
 * #/repository/<id> — single problem detail
 */

import { ApiClient, ApiError, NetworkError, isAbort } from "./api.js";
import {
  renderApiError,
  renderNetworkBanner,
  renderNotFound,
  renderProblemDetail,
  renderQueryResults,
  renderStats,
} from "./render.js";

const K_CHOICES = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];
const DEFAULT_K = 3;

export function initApp(root: HTMLElement, client: ApiClient): void {
  const renderRoute = () => {
    const route = parseRoute(globalThis.location?.hash ?? "");
    if (route.page === "repository") {
      mountRepositoryPage(root, client, route.problemId);
    } else {
      mountQueryPage(root, client);
    }
  };
  globalThis.addEventListener?.("hashchange", renderRoute);
  renderRoute();
}

export interface Route {
  page: "query" | "repository";
  problemId?: string;
}

export function parseRoute(hash: string): Route {
  const parts = hash.replace(/^#\/?/, "").split("/").filter(Boolean);
  if (parts[0] === "repository") {
    return parts.length > 1
      ? { page: "repository", problemId: decodeURIComponent(parts[1]) }
      : { page: "repository" };
  }
  return { page: "query" };
}

function nav(active: "query" | "repository"): string {
  const cls = (page: string) => (page === active ? 'class="active"' : "");
  return `
    <nav>
      <a href="#/query" ${cls("query")}>Query</a>
      <a href="#/repository" ${cls("repository")}>Repository</a>
    </nav>`;
}

export function mountQueryPage(root: HTMLElement, client: ApiClient): void {
  root.innerHTML = `
    ${nav("query")}
    <section class="page query-page">
      <h2>Find problems with the same problem model</h2>
      <form id="query-form">
        <label>Problem text
          <textarea name="text" rows="4"
            placeholder="John had 5 apples, and Mary had 6 oranges..."></textarea>
        </label>
        <label>Equation (optional when a remote generator is configured)
          <input name="equation" type="text" placeholder="x = 5 + 6" />
        </label>
        <label>Results
          <select name="k">${K_CHOICES.map(
            (k) =>
              `<option value="${k}"${k === DEFAULT_K ? " selected" : ""}>${k}</option>`,
          ).join("")}</select>
        </label>
        <button type="submit">Search</button>
        <span class="validation" data-testid="validation"></span>
      </form>
      <div id="query-banner"></div>
      <div id="query-output"></div>
    </section>`;

  const form = root.querySelector<HTMLFormElement>("#query-form")!;
  const banner = root.querySelector<HTMLElement>("#query-banner")!;
  const output = root.querySelector<HTMLElement>("#query-output")!;
  const validation = root.querySelector<HTMLElement>('[data-testid="validation"]')!;

  // at most one in-flight query; a resubmit cancels the previous request
  let inflight: AbortController | null = null;

  const submit = async () => {
    const data = new FormData(form);
    const text = String(data.get("text") ?? "").trim();
    const equation = String(data.get("equation") ?? "").trim();
    const k = Number(data.get("k") ?? DEFAULT_K);
    validation.textContent = "";
    if (!text && !equation) {
      validation.textContent = "Enter the problem text and/or an equation.";
      return;
    }
    inflight?.abort();
    inflight = new AbortController();
    banner.innerHTML = "";
    output.innerHTML = `<p class="loading">searching…</p>`;
    try {
      const response = await client.query(
        {
          text: text || undefined,
          equation: equation || undefined,
          k,
          provider: equation ? "gold" : "remote",
        },
        inflight.signal,
      );
      output.innerHTML = renderQueryResults(response);
    } catch (err) {
      if (isAbort(err)) return;
      if (err instanceof ApiError) {
        output.innerHTML = renderApiError(err);
        return;
      }
      if (err instanceof NetworkError) {
        // non-blocking: the form keeps its state, the banner offers retry
        output.innerHTML = "";
        banner.innerHTML = renderNetworkBanner(err.message);
        banner
          .querySelector('[data-action="retry"]')
          ?.addEventListener("click", () => void submit());
        return;
      }
      throw err;
    }
  };

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void submit();
  });
}

export function mountRepositoryPage(
  root: HTMLElement,
  client: ApiClient,
  problemId?: string,
): void {
  if (problemId !== undefined) {
    mountProblemDetail(root, client, problemId);
    return;
  }
  root.innerHTML = `
    ${nav("repository")}
    <section class="page repository-page">
      <h2>Repository</h2>
      <div id="stats">loading…</div>
      <h3>Add a problem</h3>
      <form id="add-form">
        <label>Id <input name="id" type="text" required /></label>
        <label>Problem text <textarea name="text" rows="3" required></textarea></label>
        <label>Equation <input name="equation" type="text" required /></label>
        <button type="submit">Add</button>
      </form>
      <div id="add-outcome"></div>
    </section>`;

  const statsBox = root.querySelector<HTMLElement>("#stats")!;
  const form = root.querySelector<HTMLFormElement>("#add-form")!;
  const outcome = root.querySelector<HTMLElement>("#add-outcome")!;

  const refreshStats = async () => {
    try {
      statsBox.innerHTML = renderStats(await client.stats());
    } catch (err) {
      statsBox.innerHTML = renderNetworkBanner(
        err instanceof Error ? err.message : String(err),
      );
      statsBox
        .querySelector('[data-action="retry"]')
        ?.addEventListener("click", () => void refreshStats());
    }
  };
  void refreshStats();

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void (async () => {
      const data = new FormData(form);
      try {
        const added = await client.addProblem({
          id: String(data.get("id") ?? ""),
          text: String(data.get("text") ?? ""),
          equation: String(data.get("equation") ?? ""),
        });
        outcome.innerHTML = added.indexed
          ? `<p class="ok" data-testid="add-ok">Added and indexed <code>${added.id}</code>.</p>`
          : `<p class="warn" data-testid="add-warn">Stored <code>${added.id}</code> but its equation did not parse: ${added.error ?? ""}</p>`;
        form.reset();
        await refreshStats();
      } catch (err) {
        if (err instanceof ApiError) {
          outcome.innerHTML = renderApiError(err);
          return;
        }
        outcome.innerHTML = renderNetworkBanner(
          err instanceof Error ? err.message : String(err),
        );
      }
    })();
  });
}

function mountProblemDetail(
  root: HTMLElement,
  client: ApiClient,
  problemId: string,
): void {
  root.innerHTML = `${nav("repository")}
    <section class="page detail-page"><p class="loading">loading…</p></section>`;
  const section = root.querySelector<HTMLElement>("section")!;
  void (async () => {
    try {
      section.innerHTML = renderProblemDetail(await client.getProblem(problemId));
    } catch (err) {
      if (err instanceof ApiError && err.code === "NOT_FOUND") {
        section.innerHTML = renderNotFound(problemId);
        return;
      }
      section.innerHTML = renderNetworkBanner(
        err instanceof Error ? err.message : String(err),
      );
    }
  })();
}

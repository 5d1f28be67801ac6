import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { mountQueryPage, mountRepositoryPage, parseRoute } from "../src/app.js";

const JOHN_TEXT =
  "John had 5 apples, and Mary had 6 oranges. Find the total number of fruits";

const QUERY_RESPONSE = {
  results: [
    { problemId: "q1", rank: 1, lexScore: 1.0, signature: "VAR VAR OP:+",
      text: JOHN_TEXT },
    { problemId: "q2", rank: 2, lexScore: 0.3, signature: "VAR VAR OP:+",
      text: "Sam has 3 pens and Tia has 4 pencils; how many items in all" },
  ],
  signature: "VAR VAR OP:+",
  parsedExpression: "N0 N1 +",
};

const STATS = { total: 3, indexed: 3, failed: 0, buckets: 2, largestBucket: 2 };

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

let root: HTMLElement;

beforeEach(() => {
  root = document.createElement("div");
  document.body.appendChild(root);
});

afterEach(() => {
  root.remove();
  vi.unstubAllGlobals();
});

function fillAndSubmitQuery(text: string, equation: string): void {
  const textarea = root.querySelector<HTMLTextAreaElement>(
    'textarea[name="text"]')!;
  const input = root.querySelector<HTMLInputElement>('input[name="equation"]')!;
  textarea.value = text;
  input.value = equation;
  root.querySelector<HTMLFormElement>("#query-form")!
    .dispatchEvent(new Event("submit", { cancelable: true }));
}

describe("query page", () => {
  it("submits the example problem and renders results sharing the displayed signature", async () => {
    const fetchMock = vi.fn().mockResolvedValue(jsonResponse(200, QUERY_RESPONSE));
    vi.stubGlobal("fetch", fetchMock);
    mountQueryPage(root, new ApiClient());

    const kSelect = root.querySelector<HTMLSelectElement>('select[name="k"]')!;
    expect(kSelect.value).toBe("3");
    expect(kSelect.options).toHaveLength(10);

    fillAndSubmitQuery(JOHN_TEXT, "x = 5 + 6");
    await vi.waitFor(() => {
      expect(root.querySelector('[data-testid="results"]')).not.toBeNull();
    });

    const displayed = root.querySelector(
      '[data-testid="query-signature"]')!.textContent;
    expect(displayed).toBe("VAR VAR OP:+");
    const cards = [...root.querySelectorAll(".result-card")];
    expect(cards).toHaveLength(2);
    for (const card of cards) {
      expect(card.getAttribute("data-signature")).toBe(displayed);
    }
    const sent = JSON.parse(fetchMock.mock.calls[0][1].body);
    expect(sent).toMatchObject({ text: JOHN_TEXT, equation: "x = 5 + 6", k: 3 });
  });

  it("blocks an empty submit client-side", async () => {
    const fetchMock = vi.fn();
    vi.stubGlobal("fetch", fetchMock);
    mountQueryPage(root, new ApiClient());
    fillAndSubmitQuery("", "");
    await vi.waitFor(() => {
      expect(root.querySelector('[data-testid="validation"]')!.textContent)
        .toContain("Enter the problem text");
    });
    expect(fetchMock).not.toHaveBeenCalled();
  });

  it("renders parse errors inline with their stage", async () => {
    vi.stubGlobal("fetch", vi.fn().mockResolvedValue(jsonResponse(400, {
      code: "PARSE_ERROR", message: "dangling operator",
      detail: { stage: "to_postfix", recordId: null },
    })));
    mountQueryPage(root, new ApiClient());
    fillAndSubmitQuery("", "x = 5 + + 6");
    await vi.waitFor(() => {
      expect(root.querySelector('[data-testid="inline-error"]')).not.toBeNull();
    });
    expect(root.innerHTML).toContain("PARSE_ERROR in to_postfix");
  });

  it("shows a retry banner on network failure and preserves form state", async () => {
    const fetchMock = vi.fn()
      .mockRejectedValueOnce(new TypeError("fetch failed"))
      .mockResolvedValueOnce(jsonResponse(200, QUERY_RESPONSE));
    vi.stubGlobal("fetch", fetchMock);
    mountQueryPage(root, new ApiClient());
    fillAndSubmitQuery(JOHN_TEXT, "x = 5 + 6");
    await vi.waitFor(() => {
      expect(root.querySelector('[data-testid="banner"]')).not.toBeNull();
    });
    expect(root.querySelector<HTMLTextAreaElement>(
      'textarea[name="text"]')!.value).toBe(JOHN_TEXT);

    root.querySelector<HTMLButtonElement>('[data-action="retry"]')!.click();
    await vi.waitFor(() => {
      expect(root.querySelector('[data-testid="results"]')).not.toBeNull();
    });
    expect(fetchMock).toHaveBeenCalledTimes(2);
  });

  it("aborts the previous request on rapid resubmit", async () => {
    const signals: AbortSignal[] = [];
    const fetchMock = vi.fn((_url: string, init: RequestInit) => {
      signals.push(init.signal as AbortSignal);
      if (signals.length === 1) {
        return new Promise<Response>(() => undefined);  // never settles
      }
      return Promise.resolve(jsonResponse(200, QUERY_RESPONSE));
    });
    vi.stubGlobal("fetch", fetchMock);
    mountQueryPage(root, new ApiClient());
    fillAndSubmitQuery(JOHN_TEXT, "x = 5 + 6");
    fillAndSubmitQuery(JOHN_TEXT, "x = 5 + 6");
    await vi.waitFor(() => {
      expect(root.querySelector('[data-testid="results"]')).not.toBeNull();
    });
    expect(signals).toHaveLength(2);
    expect(signals[0].aborted).toBe(true);
    expect(signals[1].aborted).toBe(false);
  });
});

describe("repository page", () => {
  it("shows stats from the service", async () => {
    vi.stubGlobal("fetch", vi.fn().mockResolvedValue(jsonResponse(200, STATS)));
    mountRepositoryPage(root, new ApiClient());
    await vi.waitFor(() => {
      expect(root.querySelector('[data-testid="stats"]')).not.toBeNull();
    });
    expect(root.innerHTML).toContain("3 problems, 2 buckets");
  });

  it("surfaces a duplicate-id conflict inline", async () => {
    const fetchMock = vi.fn((url: string) => {
      if (url.endsWith("/api/stats")) {
        return Promise.resolve(jsonResponse(200, STATS));
      }
      return Promise.resolve(jsonResponse(409, {
        code: "DUPLICATE_ID", message: "duplicate problem id 'q1'",
      }));
    });
    vi.stubGlobal("fetch", fetchMock);
    mountRepositoryPage(root, new ApiClient());
    root.querySelector<HTMLInputElement>('input[name="id"]')!.value = "q1";
    root.querySelector<HTMLTextAreaElement>('textarea[name="text"]')!.value =
      "again 1";
    root.querySelector<HTMLInputElement>('input[name="equation"]')!.value = "N0";
    root.querySelector<HTMLFormElement>("#add-form")!
      .dispatchEvent(new Event("submit", { cancelable: true }));
    await vi.waitFor(() => {
      expect(root.querySelector('[data-testid="inline-error"]')).not.toBeNull();
    });
    expect(root.innerHTML).toContain("DUPLICATE_ID");
    expect(root.innerHTML).toContain("duplicate problem id");
  });

  it("adds a problem and refreshes the stats", async () => {
    let statsCalls = 0;
    const fetchMock = vi.fn((url: string, init?: RequestInit) => {
      if (url.endsWith("/api/stats")) {
        statsCalls += 1;
        return Promise.resolve(jsonResponse(200,
          { ...STATS, total: statsCalls > 1 ? 4 : 3 }));
      }
      expect(init?.method).toBe("POST");
      return Promise.resolve(jsonResponse(201,
        { id: "q4", indexed: true, error: null }));
    });
    vi.stubGlobal("fetch", fetchMock);
    mountRepositoryPage(root, new ApiClient());
    await vi.waitFor(() => {
      expect(root.querySelector('[data-testid="stats"]')).not.toBeNull();
    });
    root.querySelector<HTMLInputElement>('input[name="id"]')!.value = "q4";
    root.querySelector<HTMLTextAreaElement>('textarea[name="text"]')!.value =
      "Rex hid 7 bones and dug up 2 more, total?";
    root.querySelector<HTMLInputElement>('input[name="equation"]')!.value =
      "x = 7 + 2";
    root.querySelector<HTMLFormElement>("#add-form")!
      .dispatchEvent(new Event("submit", { cancelable: true }));
    await vi.waitFor(() => {
      expect(root.querySelector('[data-testid="add-ok"]')).not.toBeNull();
    });
    expect(root.innerHTML).toContain("4 problems");
  });

  it("renders a problem detail and a not-found view", async () => {
    const fetchMock = vi.fn((url: string) => {
      if (url.endsWith("/api/problems/q1")) {
        return Promise.resolve(jsonResponse(200, {
          id: "q1", text: "John had 5 apples", equation: "x = 5 + 6",
          textNumbers: [5, 6], source: "fixture", solution: 11,
        }));
      }
      return Promise.resolve(jsonResponse(404, {
        code: "NOT_FOUND", message: "no problem with id 'ghost'",
      }));
    });
    vi.stubGlobal("fetch", fetchMock);
    mountRepositoryPage(root, new ApiClient(), "q1");
    await vi.waitFor(() => {
      expect(root.querySelector('[data-testid="problem-detail"]')).not.toBeNull();
    });
    mountRepositoryPage(root, new ApiClient(), "ghost");
    await vi.waitFor(() => {
      expect(root.querySelector('[data-testid="not-found"]')).not.toBeNull();
    });
  });
});

describe("router", () => {
  it("parses the two routes and the detail route", () => {
    expect(parseRoute("")).toEqual({ page: "query" });
    expect(parseRoute("#/query")).toEqual({ page: "query" });
    expect(parseRoute("#/repository")).toEqual({ page: "repository" });
    expect(parseRoute("#/repository/q%201"))
      .toEqual({ page: "repository", problemId: "q 1" });
    expect(parseRoute("#/unknown")).toEqual({ page: "query" });
  });
});

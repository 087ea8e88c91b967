import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

function jsonResponse(
  body: unknown,
  status = 200,
  headers: Record<string, string> = {},
): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json", ...headers },
  });
}

afterEach(() => vi.unstubAllGlobals());

describe("ApiClient", () => {
  it("prefixes every route with the base URL", async () => {
    const fetchMock = vi.fn(async () => jsonResponse({ status: "ok", version: "1" }));
    vi.stubGlobal("fetch", fetchMock);
    const client = new ApiClient("http://box:9000");
    await client.health();
    expect(fetchMock).toHaveBeenCalledWith("http://box:9000/api/health");
  });

  it("posts the config verbatim to analyze and keeps the raw bytes", async () => {
    const payload = { version: "1", config_hash: "abc", field: [] };
    const fetchMock = vi.fn(async () =>
      jsonResponse(payload, 200, { "x-config-hash": "abc" }),
    );
    vi.stubGlobal("fetch", fetchMock);

    const client = new ApiClient();
    const result = await client.analyze({ cell: { r_ohms: 3000 } });

    const [url, init] = fetchMock.mock.calls[0] as unknown as [string, RequestInit];
    expect(url).toBe("/api/analyze");
    expect(init.method).toBe("POST");
    expect(JSON.parse(init.body as string)).toEqual({ cell: { r_ohms: 3000 } });

    expect(result.hash).toBe("abc");
    expect(result.doc.config_hash).toBe("abc");
    // raw is exactly what the transport delivered, not a reserialisation
    expect(result.raw).toBe(JSON.stringify(payload));
  });

  it("raises ApiError with the machine-readable body on 400", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () =>
        jsonResponse(
          { error: "config-error", path: "cell.r_ohms", message: "must be positive" },
          400,
        ),
      ),
    );
    const client = new ApiClient();
    const err = await client.analyze({}).catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(400);
    expect((err as ApiError).body.path).toBe("cell.r_ohms");
    expect((err as ApiError).message).toBe("must be positive");
  });

  it("treats a 422 trajectory as a result, not an error", async () => {
    const failing = {
      initial: { v_c: 1.25, n_d: 1e27 },
      terminal: { v_c: 1.3, n_d: 9e26 },
      points: [[0, 1.25, 1e27]],
      status: "non-finite-derivative",
      diagnostic: {},
      solver_stats: { steps: 1, rejected_steps: 0, min_step: 0 },
    };
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => jsonResponse(failing, 422, { "x-config-hash": "h" })),
    );
    const client = new ApiClient();
    const result = await client.trajectory({ v_c0: 1.25, n_d0: 1e27 });
    expect(result.ok).toBe(false);
    expect(result.trajectory.status).toBe("non-finite-derivative");
    expect(result.hash).toBe("h");
  });

  it("sends the optional config block with trajectory seeds", async () => {
    const fetchMock = vi.fn(async () =>
      jsonResponse({ status: "ok", points: [] }, 200, { "x-config-hash": "h" }),
    );
    vi.stubGlobal("fetch", fetchMock);
    const client = new ApiClient();
    await client.trajectory({ v_c0: 0, n_d0: 1e27 }, { cell: { r_ohms: 3000 } });
    const [, init] = fetchMock.mock.calls[0] as unknown as [string, RequestInit];
    expect(JSON.parse(init.body as string)).toEqual({
      v_c0: 0,
      n_d0: 1e27,
      config: { cell: { r_ohms: 3000 } },
    });
  });

  it("passes the abort signal through to fetch", async () => {
    const fetchMock = vi.fn(async (_url: unknown, init?: RequestInit) => {
      expect(init?.signal).toBeInstanceOf(AbortSignal);
      return jsonResponse({}, 200, { "x-config-hash": "" });
    });
    vi.stubGlobal("fetch", fetchMock);
    const controller = new AbortController();
    await new ApiClient().analyze({}, controller.signal);
    expect(fetchMock).toHaveBeenCalled();
  });

  it("falls back to a synthetic error body on non-JSON failures", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => new Response("<html>bad gateway</html>", { status: 502 })),
    );
    const err = await new ApiClient().defaults().catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).body.error).toBe("http-502");
  });
});

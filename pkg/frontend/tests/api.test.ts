// @vitest-environment jsdom
import { afterEach, describe, expect, it, vi } from "vitest";

import { ConflictError, interventionId, listRules, patchRule, putItem } from "../src/api.js";

function stubFetch(status: number, body: unknown): ReturnType<typeof vi.fn> {
  const fn = vi.fn(async () =>
    new Response(JSON.stringify(body), {
      status,
      headers: { "Content-Type": "application/json" },
    })
  );
  vi.stubGlobal("fetch", fn);
  return fn;
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("api client", () => {
  it("lists rules with query params", async () => {
    const fn = stubFetch(200, { total: 0, page: 1, page_size: 50, rules: [] });
    await listRules({ page: 2, kept: false, sort: "support" });
    const url = String(fn.mock.calls[0]?.[0]);
    expect(url).toContain("/rules?");
    expect(url).toContain("page=2");
    expect(url).toContain("kept=false");
    expect(url).toContain("sort=support");
  });

  it("url-encodes rule ids and echoes the version", async () => {
    const fn = stubFetch(200, {});
    await patchRule("bmi=[35.0,inf)→event", { version: 3, kept: false });
    const [url, init] = fn.mock.calls[0] as [string, RequestInit];
    expect(url).toContain(encodeURIComponent("bmi=[35.0,inf)→event"));
    expect(url).not.toContain("→");
    expect(JSON.parse(String(init.body))).toEqual({ version: 3, kept: false });
  });

  it("maps 409 to ConflictError and never retries silently", async () => {
    const fn = stubFetch(409, { detail: "rule x: version 0 != current 2" });
    await expect(putItem("A=yes", { version: 0, category: "c" })).rejects.toBeInstanceOf(
      ConflictError
    );
    expect(fn).toHaveBeenCalledTimes(1);
  });

  it("raises plain errors for other failures", async () => {
    stubFetch(500, { detail: "boom" });
    await expect(listRules()).rejects.toThrow();
  });

  it("generates readable unique intervention ids", () => {
    const a = interventionId("Enroll in a weight loss program!");
    expect(a).toMatch(/^iv-enroll-in-a-weight-loss-program-/);
    expect(interventionId("x")).not.toEqual(interventionId("x"));
  });
});

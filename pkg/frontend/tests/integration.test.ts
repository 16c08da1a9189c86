/**
 * End-to-end pass against the real curation service: the suite boots
 * `mgo serve` on a free port with the bundled otitis externa fixtures,
 * resolves the ambiguous "discharge" phrase through the review model and
 * checks that the next build carries the drainage link, then renders the
 * fixture graph with a clean validation badge.
 *
 * Tests in this file share one service process and run in order.
 */

import { type ChildProcess, spawn } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../dist/api.js";
import { renderBadge, renderGraph, validationBadge } from "../dist/graph.js";
import { ReviewModel, renderQueue, visibleItems } from "../dist/review.js";

const REPO_ROOT = resolve(fileURLToPath(new URL(".", import.meta.url)), "..", "..");

function freePort(): Promise<number> {
  return new Promise((resolvePort, reject) => {
    const probe = createServer();
    probe.once("error", reject);
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address();
      if (address === null || typeof address === "string") {
        reject(new Error("no port assigned"));
        return;
      }
      probe.close(() => resolvePort(address.port));
    });
  });
}

let service: ChildProcess | null = null;
let workdir = "";
let client: ApiClient;
let stderrTail = "";

beforeAll(async () => {
  const port = await freePort();
  workdir = mkdtempSync(join(tmpdir(), "mgo-ui-"));
  service = spawn(
    "python3",
    [
      "-m",
      "mgo.cli",
      "serve",
      "--guideline",
      join(REPO_ROOT, "fixtures", "otitis_externa.md"),
      "--terminology",
      join(REPO_ROOT, "fixtures", "otitis_terminology.tsv"),
      "--decisions",
      join(workdir, "decisions.jsonl"),
      "--host",
      "127.0.0.1",
      "--port",
      String(port),
    ],
    { cwd: REPO_ROOT, stdio: ["ignore", "ignore", "pipe"] },
  );
  service.stderr?.on("data", (chunk: Buffer) => {
    stderrTail = (stderrTail + chunk.toString()).slice(-2000);
  });
  client = new ApiClient(`http://127.0.0.1:${port}`);
  const deadline = Date.now() + 30_000;
  for (;;) {
    if (service.exitCode !== null) {
      throw new Error(`service exited early (${service.exitCode}): ${stderrTail}`);
    }
    try {
      await client.validate();
      break;
    } catch {
      if (Date.now() > deadline) {
        throw new Error(`service did not come up: ${stderrTail}`);
      }
      await new Promise((wake) => setTimeout(wake, 250));
    }
  }
});

afterAll(() => {
  service?.kill();
  if (workdir !== "") {
    rmSync(workdir, { recursive: true, force: true });
  }
});

describe("review queue against the live service", () => {
  it("loads the seeded queue with its pending ambiguities", async () => {
    const model = new ReviewModel(client);
    await model.refresh();
    expect(model.state.error).toBeNull();
    expect(model.state.items).toHaveLength(55);
    const pending = visibleItems(model.state);
    expect(pending).toHaveLength(5);
    const discharge = pending.find((item) => item.normalized === "discharge");
    expect(discharge).toBeDefined();
    expect(discharge?.candidates.map((option) => option.concept)).toEqual([19, 37]);
    const html = renderQueue(model.state);
    expect(html).toContain("<mark>Discharge</mark>");
    expect(html).toContain("fluid drainage");
  });
});

describe("graph preview against the live service", () => {
  it("renders the unresolved build with a clean validation badge", async () => {
    const [graphPayload, violations] = await Promise.all([client.graph(), client.validate()]);
    expect(graphPayload.nodes).toHaveLength(34);
    expect(graphPayload.edges).toHaveLength(55);
    const svg = renderGraph(graphPayload);
    const kinds = new Set([...svg.matchAll(/data-kind="([^"]+)"/g)].map((match) => match[1]));
    expect(kinds.size).toBeGreaterThanOrEqual(5);
    expect(violations).toEqual([]);
    expect(validationBadge(violations)).toEqual({ label: "0 violations", clean: true });
    expect(renderBadge(violations)).toContain("clean");
  });
});

describe("resolving the discharge ambiguity", () => {
  it("routes the decision through one POST and rebuilds with the drainage link", async () => {
    const model = new ReviewModel(client);
    await model.refresh();
    const discharge = model.state.items.find(
      (item) => item.normalized === "discharge" && item.status === "pending",
    );
    expect(discharge).toBeDefined();
    if (discharge === undefined) {
      return;
    }
    const finding = discharge.candidates.find((option) => option.kind === "Finding");
    expect(finding?.concept).toBe(19);

    const ok = await model.decide(discharge.id, "accepted", finding?.concept ?? null);
    expect(ok).toBe(true);
    expect(model.state.revision).toBe(1);
    const updated = model.state.items.find((item) => item.id === discharge.id);
    expect(updated?.status).toBe("accepted");
    expect(updated?.concept).toBe(19);
    expect(visibleItems(model.state)).toHaveLength(4);

    const preview = await client.preview();
    expect(preview.partition_counts.PSO).toBe(13);
    expect(preview.overridden_mappings).toEqual([discharge.id]);

    const graphPayload = await client.graph();
    expect(graphPayload.edges).toContainEqual({
      src: "anat:externalAuditoryCanal",
      rel: "hasSymptom",
      partition: "PSO",
      dst: "symp:fluidDrainage",
    });
    const violations = await client.validate();
    expect(validationBadge(violations).clean).toBe(true);
  });
});

describe("rejections", () => {
  it("keeps rejected items reachable under the rejected filter", async () => {
    const model = new ReviewModel(client);
    await model.refresh();
    const culture = model.state.items.find(
      (item) => item.normalized === "culture" && item.status === "pending",
    );
    expect(culture).toBeDefined();
    if (culture === undefined) {
      return;
    }
    await model.decide(culture.id, "rejected");
    expect(model.state.error).toBeNull();

    model.setFilter("rejected");
    const rejected = visibleItems(model.state);
    expect(rejected.map((item) => item.id)).toContain(culture.id);
    expect(renderQueue(model.state)).toContain(`data-id="${culture.id}"`);

    const filtered = await client.candidates("rejected");
    expect(filtered.map((item) => item.id)).toContain(culture.id);
  });
});

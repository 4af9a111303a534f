// @vitest-environment jsdom
//
// Full UI round-trip against the real service: create a session, post
// injected synthetic frames, check the 21 rendered overlay points against the
// service JSON, label two classes, train, and render the returned report.
// The service and its fixtures are built by the backend's own CLI.

import { spawn, spawnSync, ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, readdirSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { VisageClient } from "../src/api.js";
import { AppElements, TrainerApp } from "../src/app.js";

const PYTHON = process.env.PYTHON ?? "python3";
const CLI = ["-m", "visage.frontdoor.cli"];

let fixtureDir: string;
let server: ChildProcess | null = null;
let baseUrl: string;

function runCli(args: string[]): void {
  const result = spawnSync(PYTHON, [...CLI, ...args], { encoding: "utf-8" });
  if (result.status !== 0) {
    throw new Error(`CLI ${args[0]} failed: ${result.stderr}`);
  }
}

function sequenceFrames(name: string): Uint8Array[] {
  const dir = join(fixtureDir, "data", name);
  return readdirSync(dir)
    .filter((f) => f.startsWith("frame_"))
    .sort()
    .map((f) => new Uint8Array(readFileSync(join(dir, f))));
}

async function waitForHealth(client: VisageClient, ms = 15000): Promise<void> {
  const deadline = Date.now() + ms;
  while (Date.now() < deadline) {
    if (await client.health()) return;
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error("service never became healthy");
}

beforeAll(async () => {
  fixtureDir = mkdtempSync(join(tmpdir(), "visage-ui-"));
  runCli(["train-cascade", "--out", join(fixtureDir, "front.cascade"),
          "--synth-seed", "7"]);
  runCli(["gen-synth", "--out", join(fixtureDir, "data"), "--seed", "7",
          "--classes", "Neutral,Smile", "--sequences-per-class", "1",
          "--frames", "30"]);
  writeFileSync(join(fixtureDir, "session.cfg"),
    "frontal_cascade = front.cascade\n" +
    "scan.scale_start = 3.0\n" +
    "scan.step = 3\n" +
    "svm.c_grid = 2.0,32.0\n" +
    "svm.gamma_grid = 0.5,8.0\n" +
    "svm.folds = 2\n");

  server = spawn(PYTHON, [...CLI, "serve", "--config",
                          join(fixtureDir, "session.cfg"), "--port", "0"]);
  baseUrl = await new Promise<string>((resolve, reject) => {
    let buffer = "";
    const timer = setTimeout(() => reject(new Error(`no port line: ${buffer}`)), 20000);
    server!.stderr!.on("data", (chunk: Buffer) => {
      buffer += chunk.toString();
      const match = buffer.match(/listening on (http:\/\/[\d.]+:\d+)/);
      if (match) {
        clearTimeout(timer);
        resolve(match[1]);
      }
    });
    server!.on("exit", (code) => reject(new Error(`server exited ${code}: ${buffer}`)));
  });
  await waitForHealth(new VisageClient(baseUrl));
}, 120000);

afterAll(() => {
  server?.kill();
  if (fixtureDir) rmSync(fixtureDir, { recursive: true, force: true });
});

class MemoryStorage implements Storage {
  private store = new Map<string, string>();
  get length(): number { return this.store.size; }
  clear(): void { this.store.clear(); }
  getItem(key: string): string | null { return this.store.get(key) ?? null; }
  key(index: number): string | null { return [...this.store.keys()][index] ?? null; }
  removeItem(key: string): void { this.store.delete(key); }
  setItem(key: string, value: string): void { this.store.set(key, value); }
}

function mountApp(storage: Storage): { app: TrainerApp; el: AppElements } {
  const html = readFileSync(join(__dirname, "..", "index.html"), "utf-8");
  const body = html.match(/<body>([\s\S]*)<\/body>/)![1]
    .replace(/<script[\s\S]*?<\/script>/, "");
  document.body.innerHTML = body;
  const el: AppElements = {
    status: document.getElementById("status")!,
    modeBadge: document.getElementById("mode-badge")!,
    prediction: document.getElementById("prediction")!,
    overlay: document.getElementById("overlay") as unknown as SVGSVGElement,
    labelBar: document.getElementById("label-bar")!,
    poolCounts: document.getElementById("pool-counts")!,
    trainButton: document.getElementById("train-button") as HTMLButtonElement,
    resetButton: document.getElementById("reset-button") as HTMLButtonElement,
    report: document.getElementById("report")!,
    toasts: document.getElementById("toasts")!,
  };
  const app = new TrainerApp(new VisageClient(baseUrl), el, storage);
  return { app, el };
}

async function settle(): Promise<void> {
  await new Promise((resolve) => setTimeout(resolve, 20));
}

describe("trainer UI round-trip", () => {
  it("drives capture, labeling, training and live prediction end to end", async () => {
    const storage = new MemoryStorage();
    const { app, el } = mountApp(storage);
    await app.init();
    expect(app.sessionId).toBeTruthy();

    // label buttons exist but are disabled before any face is found
    const buttons = [...el.labelBar.querySelectorAll("button")];
    expect(buttons.map((b) => b.textContent)).toEqual(
      ["Neutral", "Smile", "Angry", "Excited"]);
    expect(buttons.every((b) => b.disabled)).toBe(true);

    // inject the first synthetic frame; overlay must match the service JSON
    const neutral = sequenceFrames("Neutral_00");
    const result = (await app.sendFrame(neutral[0]))!;
    expect(result.landmarks).not.toBeNull();
    const validPoints = result.landmarks!.filter((p) => p.valid);
    expect(validPoints.length).toBe(21);
    const dots = [...el.overlay.querySelectorAll("circle")];
    expect(dots.length).toBe(21);
    dots.forEach((dot, i) => {
      expect(dot.getAttribute("cx")).toBe(String(validPoints[i].x));
      expect(dot.getAttribute("cy")).toBe(String(validPoints[i].y));
    });
    expect(buttons.every((b) => !b.disabled)).toBe(true);

    // training with a single labeled class surfaces the 409 as a toast
    const neutralButton = el.labelBar.querySelector("button")!;
    neutralButton.dispatchEvent(new MouseEvent("mousedown"));
    await settle();
    for (const frame of neutral.slice(1)) await app.sendFrame(frame);
    neutralButton.dispatchEvent(new MouseEvent("mouseup"));
    await settle();
    expect(el.poolCounts.textContent).toContain("Neutral 3");

    el.trainButton.dispatchEvent(new MouseEvent("click"));
    await new Promise((resolve) => setTimeout(resolve, 300));
    expect(el.toasts.textContent).toContain("409");
    expect(app.mode).toBe("train");

    // label the second class
    const smileButton = buttons.find((b) => b.textContent === "Smile")!;
    smileButton.dispatchEvent(new MouseEvent("mousedown"));
    await settle();
    for (const frame of sequenceFrames("Smile_00")) await app.sendFrame(frame);
    smileButton.dispatchEvent(new MouseEvent("mouseup"));
    await settle();
    expect(el.poolCounts.textContent).toContain("Smile 3");

    // train for real; mode badge flips and the report renders
    el.trainButton.dispatchEvent(new MouseEvent("click"));
    const deadline = Date.now() + 60000;
    while (app.mode !== "evaluate" && Date.now() < deadline) await settle();
    expect(app.mode).toBe("evaluate");
    expect(el.modeBadge.textContent).toBe("evaluate");

    const table = el.report.querySelector("table.confusion")!;
    expect(table).toBeTruthy();
    const rows = [...table.querySelectorAll("tbody tr")];
    expect(rows.length).toBe(4);
    // report table rows sum to the per-class vector counts
    const poolText = el.poolCounts.textContent!;
    for (const row of rows) {
      const label = row.getAttribute("data-row")!;
      const cells = [...row.querySelectorAll("td")].slice(0, 4);
      const sum = cells.reduce((acc, c) => acc + Number(c.textContent), 0);
      const match = poolText.match(new RegExp(`${label} (\\d+)`));
      expect(sum).toBe(Number(match![1]));
    }

    // subsequent windows produce live predictions
    app.overlay.clear();
    el.prediction.classList.remove("visible");
    let predicted: string | null = null;
    for (const frame of sequenceFrames("Smile_00")) {
      const r = await app.sendFrame(frame);
      if (r?.predicted) predicted = r.predicted;
    }
    expect(predicted).not.toBeNull();
    expect(el.prediction.classList.contains("visible")).toBe(true);
    expect(el.prediction.textContent).toBe(predicted);

    // a reload restores the session id from storage
    const { app: reloaded } = mountApp(storage);
    await reloaded.init();
    expect(reloaded.sessionId).toBe(app.sessionId);
  }, 120000);

  it("reports an unreachable service without crashing", async () => {
    const { app, el } = mountApp(new MemoryStorage());
    const dead = new TrainerApp(new VisageClient("http://127.0.0.1:1"), {
      ...el,
    } as AppElements, new MemoryStorage());
    dead.sessionId = "ghost";
    const result = await dead.sendFrame(new Uint8Array([1, 2, 3]));
    expect(result).toBeNull();
    expect(el.status.dataset.kind).toBe("error");
    expect(el.status.textContent).toContain("retrying");
    void app;
  }, 30000);
});

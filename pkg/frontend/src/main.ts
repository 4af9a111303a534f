// Browser bootstrap: wire the DOM, open the webcam, start the capture loop.

import { VisageClient } from "./api.js";
import { AppElements, TrainerApp } from "./app.js";
import { openWebcam } from "./capture.js";

function grab<T extends Element>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as unknown as T;
}

async function boot(): Promise<void> {
  const params = new URLSearchParams(location.search);
  const base = params.get("service") ?? "http://127.0.0.1:8750";
  const client = new VisageClient(base);

  const elements: AppElements = {
    status: grab("status"),
    modeBadge: grab("mode-badge"),
    prediction: grab("prediction"),
    overlay: grab<SVGSVGElement>("overlay"),
    labelBar: grab("label-bar"),
    poolCounts: grab("pool-counts"),
    trainButton: grab<HTMLButtonElement>("train-button"),
    resetButton: grab<HTMLButtonElement>("reset-button"),
    report: grab("report"),
    toasts: grab("toasts"),
  };
  const app = new TrainerApp(client, elements);

  if (!(await client.health())) {
    app.status(`service not reachable at ${base}`, "error");
    return;
  }
  await app.init();

  const video = grab<HTMLVideoElement>("camera");
  app.overlay.setFrameSize(320, 240);
  try {
    const source = await openWebcam(video, 320, 240);
    app.attachSource(source, 8).start();
  } catch (err) {
    app.status(`camera unavailable: ${err}`, "error");
  }
}

void boot();

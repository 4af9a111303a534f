// Frame capture: webcam (via a hidden canvas downscale) or any injected
// source, pumped at a fixed cadence with at most one request in flight
// (drop-newest backpressure).

import { GrayFrame, grayFromRgba } from "./pgm.js";

export type FrameSource = () => GrayFrame | null;

export class CaptureLoop {
  private timer: ReturnType<typeof setInterval> | null = null;
  private inFlight = false;

  constructor(
    private readonly source: FrameSource,
    private readonly onFrame: (frame: GrayFrame) => Promise<void>,
    readonly fps: number = 10,
  ) {}

  get running(): boolean {
    return this.timer !== null;
  }

  start(): void {
    if (this.timer !== null) return;
    this.timer = setInterval(() => void this.tick(), 1000 / this.fps);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  async tick(): Promise<void> {
    if (this.inFlight) return; // drop the newest frame rather than queueing
    const frame = this.source();
    if (!frame) return;
    this.inFlight = true;
    try {
      await this.onFrame(frame);
    } finally {
      this.inFlight = false;
    }
  }
}

export async function openWebcam(
  video: HTMLVideoElement,
  width = 320,
  height = 240,
): Promise<FrameSource> {
  const stream = await navigator.mediaDevices.getUserMedia({
    video: { width: { ideal: 640 }, height: { ideal: 480 } },
  });
  video.srcObject = stream;
  await video.play();

  const canvas = document.createElement("canvas");
  canvas.width = width;
  canvas.height = height;
  const ctx = canvas.getContext("2d", { willReadFrequently: true });
  if (!ctx) throw new Error("canvas 2d context unavailable");

  return () => {
    if (video.readyState < 2) return null;
    ctx.drawImage(video, 0, 0, width, height);
    const image = ctx.getImageData(0, 0, width, height);
    return grayFromRgba(image.data, width, height);
  };
}

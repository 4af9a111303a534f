// SVG overlay: landmark dots color-coded by region, the face box, and the
// prediction banner. Coordinates from the service are drawn verbatim; the
// SVG viewBox maps frame pixels onto the displayed size.

import type { FrameResult } from "./api.js";

export const REGION_COLORS: Record<string, string> = {
  left_eye: "#4dabf7",
  right_eye: "#3bc9db",
  nose: "#ffd43b",
  mouth: "#ff6b6b",
};

const SVG_NS = "http://www.w3.org/2000/svg";

export class Overlay {
  constructor(
    readonly svg: SVGSVGElement,
    readonly banner: HTMLElement,
  ) {}

  setFrameSize(width: number, height: number): void {
    this.svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  }

  clear(): void {
    while (this.svg.firstChild) this.svg.removeChild(this.svg.firstChild);
  }

  render(result: FrameResult): void {
    this.clear();
    if (result.box) {
      const [x, y, w, h] = result.box;
      const rect = document.createElementNS(SVG_NS, "rect");
      rect.setAttribute("x", String(x));
      rect.setAttribute("y", String(y));
      rect.setAttribute("width", String(w));
      rect.setAttribute("height", String(h));
      rect.setAttribute("class", `face-box face-box-${result.source}`);
      this.svg.appendChild(rect);
    }
    if (result.landmarks) {
      for (const point of result.landmarks) {
        if (!point.valid) continue; // only valid landmarks are drawn
        const dot = document.createElementNS(SVG_NS, "circle");
        dot.setAttribute("cx", String(point.x));
        dot.setAttribute("cy", String(point.y));
        dot.setAttribute("r", "2.5");
        dot.setAttribute("fill", REGION_COLORS[point.region] ?? "#ffffff");
        dot.setAttribute("class", `landmark landmark-${point.region}`);
        this.svg.appendChild(dot);
      }
    }
    if (result.predicted) {
      this.banner.textContent = result.predicted;
      this.banner.classList.add("visible");
    }
  }
}

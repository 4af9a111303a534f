import { describe, expect, it } from "vitest";
import { encodePgm, grayFromRgba } from "../src/pgm.js";

describe("encodePgm", () => {
  it("writes a P5 header and the raw raster", () => {
    const frame = { width: 3, height: 2, pixels: new Uint8Array([0, 1, 2, 3, 4, 5]) };
    const bytes = encodePgm(frame);
    const header = new TextDecoder().decode(bytes.slice(0, bytes.length - 6));
    expect(header).toBe("P5\n3 2\n255\n");
    expect([...bytes.slice(-6)]).toEqual([0, 1, 2, 3, 4, 5]);
  });

  it("rejects mismatched pixel counts", () => {
    expect(() =>
      encodePgm({ width: 2, height: 2, pixels: new Uint8Array(3) }),
    ).toThrow();
  });
});

describe("grayFromRgba", () => {
  it("applies the standard luma weights", () => {
    const rgba = new Uint8ClampedArray([255, 0, 0, 255, 0, 255, 0, 255]);
    const frame = grayFromRgba(rgba, 2, 1);
    expect(frame.pixels[0]).toBe(76); // round(0.299 * 255)
    expect(frame.pixels[1]).toBe(150); // round(0.587 * 255)
  });

  it("maps black and white to the extremes", () => {
    const rgba = new Uint8ClampedArray([0, 0, 0, 255, 255, 255, 255, 255]);
    const frame = grayFromRgba(rgba, 1, 2);
    expect([...frame.pixels]).toEqual([0, 255]);
  });
});

// Grayscale frames and binary PGM (P5) encoding for upload.

export interface GrayFrame {
  width: number;
  height: number;
  pixels: Uint8Array; // row-major, one byte per pixel
}

export function encodePgm(frame: GrayFrame): Uint8Array {
  if (frame.pixels.length !== frame.width * frame.height) {
    throw new Error(
      `pixel count ${frame.pixels.length} != ${frame.width}x${frame.height}`,
    );
  }
  const header = `P5\n${frame.width} ${frame.height}\n255\n`;
  const headerBytes = new TextEncoder().encode(header);
  const out = new Uint8Array(headerBytes.length + frame.pixels.length);
  out.set(headerBytes, 0);
  out.set(frame.pixels, headerBytes.length);
  return out;
}

// Luma conversion of an RGBA buffer, same weights the service uses.
export function grayFromRgba(
  rgba: Uint8ClampedArray,
  width: number,
  height: number,
): GrayFrame {
  const pixels = new Uint8Array(width * height);
  for (let i = 0; i < pixels.length; i++) {
    const r = rgba[4 * i];
    const g = rgba[4 * i + 1];
    const b = rgba[4 * i + 2];
    pixels[i] = Math.round(0.299 * r + 0.587 * g + 0.114 * b);
  }
  return { width, height, pixels };
}

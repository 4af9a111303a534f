// HTTP client for the local expression-recognition service. The UI renders
// whatever this returns verbatim; no landmark math happens client-side.

export interface LandmarkPoint {
  x: number;
  y: number;
  region: string;
  valid: boolean;
}

export interface FrameResult {
  frame: number;
  source: string;
  box: number[] | null;
  skin_checked: boolean;
  skin_fraction: number | null;
  landmarks: LandmarkPoint[] | null;
  window_complete: boolean;
  predicted: string | null;
  timings_us: Record<string, number>;
}

export interface ConfusionReport {
  labels: string[];
  counts: number[][];
  per_class: (number | null)[];
  overall: number;
}

export interface TrainReport {
  best_c: number;
  best_gamma: number;
  cv_accuracy: number;
  pool_counts: Record<string, number>;
  confusion: ConfusionReport;
}

export interface LabelResponse {
  label: string | null;
  pool_counts: Record<string, number>;
}

export class ServiceError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

async function readError(response: Response): Promise<ServiceError> {
  let message = `${response.status}`;
  try {
    const payload = await response.json();
    if (payload && payload.error) message = payload.error;
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ServiceError(response.status, message);
}

export class VisageClient {
  constructor(readonly baseUrl: string) {}

  async health(): Promise<boolean> {
    try {
      const response = await fetch(`${this.baseUrl}/healthz`);
      return response.ok;
    } catch {
      return false;
    }
  }

  async createSession(): Promise<string> {
    const response = await fetch(`${this.baseUrl}/sessions`, { method: "POST" });
    if (!response.ok) throw await readError(response);
    const payload = await response.json();
    return payload.session_id as string;
  }

  async postFrame(sessionId: string, pgmBytes: Uint8Array): Promise<FrameResult> {
    const body = new Uint8Array(pgmBytes).buffer as ArrayBuffer;
    const response = await fetch(`${this.baseUrl}/sessions/${sessionId}/frames`, {
      method: "POST",
      headers: { "Content-Type": "image/x-portable-graymap" },
      body,
    });
    if (!response.ok) throw await readError(response);
    return (await response.json()) as FrameResult;
  }

  async setLabel(sessionId: string, label: string | null): Promise<LabelResponse> {
    const response = await fetch(`${this.baseUrl}/sessions/${sessionId}/label`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ label }),
    });
    if (!response.ok) throw await readError(response);
    return (await response.json()) as LabelResponse;
  }

  async train(sessionId: string): Promise<TrainReport> {
    const response = await fetch(`${this.baseUrl}/sessions/${sessionId}/train`, {
      method: "POST",
    });
    if (!response.ok) throw await readError(response);
    return (await response.json()) as TrainReport;
  }

  async modelText(sessionId: string): Promise<string> {
    const response = await fetch(`${this.baseUrl}/sessions/${sessionId}/model`);
    if (!response.ok) throw await readError(response);
    return await response.text();
  }

  async resetReference(sessionId: string): Promise<void> {
    const response = await fetch(
      `${this.baseUrl}/sessions/${sessionId}/reset-reference`,
      { method: "POST" },
    );
    if (!response.ok) throw await readError(response);
  }
}

/** Thin fetch wrapper over the analysis service; every displayed number
 * in the UI originates from one of these responses. */

import {
  AnalysisReport,
  AnalyzeRequest,
  ApiError,
  FieldError,
  FitResult,
} from "./types.js";

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function parseError(resp: Response): Promise<ApiError> {
  let fieldErrors: FieldError[] = [];
  let message = `service error (${resp.status})`;
  try {
    const body = await resp.json();
    if (Array.isArray(body.errors)) {
      fieldErrors = body.errors as FieldError[];
      message = fieldErrors
        .map((e) => (e.field ? `${e.field}: ${e.message}` : e.message))
        .join("; ");
    } else if (typeof body.error === "string") {
      message = body.error;
    }
  } catch {
    // non-JSON body: keep the status message
  }
  return new ApiError(resp.status, message, fieldErrors);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async post<T>(path: string, payload: unknown): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
    if (!resp.ok) {
      throw await parseError(resp);
    }
    return (await resp.json()) as T;
  }

  async health(): Promise<{ status: string }> {
    const resp = await this.fetchFn(this.baseUrl + "/v1/health");
    if (!resp.ok) {
      throw await parseError(resp);
    }
    return (await resp.json()) as { status: string };
  }

  fitRoulette(
    binEdges: number[],
    chipCounts: number[],
    df: number | null,
  ): Promise<FitResult> {
    return this.post<FitResult>("/v1/fit-roulette", {
      bin_edges: binEdges,
      chip_counts: chipCounts,
      df,
    });
  }

  fitQuantiles(
    p33: number,
    p50: number,
    p66: number,
    df: number,
  ): Promise<FitResult> {
    return this.post<FitResult>("/v1/fit-quantiles", { p33, p50, p66, df });
  }

  analyze(request: AnalyzeRequest): Promise<AnalysisReport> {
    return this.post<AnalysisReport>("/v1/analyze", request);
  }
}

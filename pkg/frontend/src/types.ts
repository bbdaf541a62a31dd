/** JSON shapes returned by the analysis service. */

export interface PriorDto {
  family: "t" | "normal";
  location?: number;
  scale?: number;
  df?: number;
  mean?: number;
  variance?: number;
  truncation: "none" | "pos" | "neg";
}

export interface PercentileFeedback {
  p33: number;
  p50: number;
  p66: number;
}

export interface OverlayCurve {
  delta: number[];
  density: number[];
}

export interface FitResult {
  schema_version: number;
  prior: PriorDto;
  loss: number;
  percentile_feedback: PercentileFeedback;
  converged: boolean;
  df_at_bound: boolean;
  overlay?: OverlayCurve;
}

export interface BfFields {
  log_bf: number;
  bf: number | null;
  bf_log_only: boolean;
  orientation?: string;
}

export interface AnalysisReport {
  schema_version: number;
  bf10: BfFields;
  one_sided?: BfFields;
  posterior: {
    median: number;
    ci_lower_95: number;
    ci_upper_95: number;
    normalization_check: number;
  };
  grid?: {
    delta: number[];
    prior_density: number[];
    posterior_density: number[];
  };
  default_comparison?: {
    prior: PriorDto;
    bf10: BfFields;
    one_sided?: BfFields;
    informed_vs_default: BfFields;
  };
}

export interface AnalyzeRequest {
  design: "one" | "two";
  t: number;
  n1: number;
  n2?: number;
  prior: PriorDto;
  direction?: "pos" | "neg";
  compare_default?: boolean;
  grid?: boolean;
}

export interface FieldError {
  field: string;
  message: string;
}

/** Non-2xx service responses, surfaced verbatim with field details. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
    readonly fieldErrors: FieldError[] = [],
  ) {
    super(message);
  }
}

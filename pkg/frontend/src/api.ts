/** Typed client for the analysis service. The UI computes no physics:
 *  every number it shows comes out of one of these responses. */

export interface StatePoint {
  v_c: number;
  n_d: number;
}

export interface TrajectoryDict {
  initial: StatePoint;
  terminal: StatePoint;
  /** [t, v_c, n_d] rows, report times merged with accepted steps. */
  points: Array<[number, number, number]>;
  status: string;
  diagnostic: Record<string, unknown>;
  solver_stats: { steps: number; rejected_steps: number; min_step: number };
}

export interface PortraitAxes {
  v_c_min: number;
  v_c_max: number;
  n_d_min: number;
  n_d_max: number;
  v_c_samples: number;
  n_d_samples: number;
  n_d_axis_scale: "log" | "linear";
}

export interface PortraitDocument {
  version: string;
  config_hash: string;
  config: Config;
  axes: PortraitAxes;
  normalization: Record<string, unknown>;
  field: unknown[];
  nullclines: { v_c: number[][][]; n_d: number[][][] };
  equilibria: Array<{
    point: StatePoint;
    kind: string;
    classification: string;
    eigenvalues: Array<[number, number]>;
    refined: boolean;
  }>;
  trajectories: TrajectoryDict[];
}

/** Resolved or partial run configuration (JSON document, five blocks). */
export type Config = Record<string, unknown>;

export interface ErrorBody {
  error: string;
  path?: string;
  message?: string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: ErrorBody,
  ) {
    super(body.message ?? body.error ?? `HTTP ${status}`);
    this.name = "ApiError";
  }
}

export interface AnalyzeResult {
  doc: PortraitDocument;
  /** Exact bytes as served; the export button downloads this string. */
  raw: string;
  hash: string;
}

export interface SvgResult {
  svg: string;
  hash: string;
}

export interface TrajectoryResult {
  trajectory: TrajectoryDict;
  hash: string;
  /** false when the solver reported a numerical failure (HTTP 422). */
  ok: boolean;
}

async function errorBody(resp: Response): Promise<ErrorBody> {
  try {
    return (await resp.json()) as ErrorBody;
  } catch {
    return { error: `http-${resp.status}` };
  }
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  async health(): Promise<{ status: string; version: string }> {
    const resp = await fetch(this.url("/api/health"));
    if (!resp.ok) throw new ApiError(resp.status, await errorBody(resp));
    return (await resp.json()) as { status: string; version: string };
  }

  async defaults(): Promise<Config> {
    const resp = await fetch(this.url("/api/defaults"));
    if (!resp.ok) throw new ApiError(resp.status, await errorBody(resp));
    return (await resp.json()) as Config;
  }

  async analyze(config: Config, signal?: AbortSignal): Promise<AnalyzeResult> {
    const resp = await fetch(this.url("/api/analyze"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(config),
      signal,
    });
    if (!resp.ok) throw new ApiError(resp.status, await errorBody(resp));
    const raw = await resp.text();
    return {
      doc: JSON.parse(raw) as PortraitDocument,
      raw,
      hash: resp.headers.get("x-config-hash") ?? "",
    };
  }

  async portraitSvg(config: Config, signal?: AbortSignal): Promise<SvgResult> {
    const resp = await fetch(this.url("/api/portrait.svg"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(config),
      signal,
    });
    if (!resp.ok) throw new ApiError(resp.status, await errorBody(resp));
    return {
      svg: await resp.text(),
      hash: resp.headers.get("x-config-hash") ?? "",
    };
  }

  async trajectory(
    seed: { v_c0: number; n_d0: number },
    config?: Config,
    signal?: AbortSignal,
  ): Promise<TrajectoryResult> {
    const body: Record<string, unknown> = { ...seed };
    if (config !== undefined) body.config = config;
    const resp = await fetch(this.url("/api/trajectory"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
    // 422 still carries the partial trajectory; it renders dashed red
    if (resp.status !== 200 && resp.status !== 422) {
      throw new ApiError(resp.status, await errorBody(resp));
    }
    return {
      trajectory: (await resp.json()) as TrajectoryDict,
      hash: resp.headers.get("x-config-hash") ?? "",
      ok: resp.status === 200,
    };
  }
}

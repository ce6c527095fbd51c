// Typed client for the scheme service. The editor never touches the
// document except through these endpoints.

export interface PickCandidate {
  kind: string;
  id: number;
  sub: string;
  dist: number;
}

export interface PickResponse {
  candidates: PickCandidate[];
  ops: Record<string, string[]>;
}

export interface OrientationVariant {
  u: number[];
  v: number[];
  n: number[];
  extAxis: string;
  rot: number;
  mir: number;
}

export type DimensionVariant = [string, number]; // axis, side

export interface ProjectionFrame {
  ex: [number, number];
  ey: [number, number];
  ez: [number, number];
  name: string;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ServiceUnreachable extends Error {
  constructor(cause: unknown) {
    super(`scheme service unreachable: ${cause}`);
  }
}

export class ApiError extends Error {
  constructor(
    readonly code: string,
    readonly status: number,
    detail: string,
  ) {
    super(`${code}: ${detail}`);
  }
}

export class ApiClient {
  constructor(
    private readonly base: string,
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    let resp: Response;
    try {
      resp = await this.fetchFn(this.base + path, init);
    } catch (err) {
      throw new ServiceUnreachable(err);
    }
    if (!resp.ok) {
      let code = `HTTP${resp.status}`;
      let detail = resp.statusText;
      try {
        const body = await resp.json();
        if (body && body.error) {
          code = body.error;
          detail = body.detail ?? detail;
        }
      } catch {
        // non-JSON error body: keep the status text
      }
      throw new ApiError(code, resp.status, detail);
    }
    return resp;
  }

  private async getJson<T>(path: string): Promise<T> {
    return (await this.request(path)).json() as Promise<T>;
  }

  async op<T = Record<string, unknown>>(
    verb: string,
    args: Record<string, unknown> = {},
  ): Promise<T> {
    const resp = await this.request(`/op/${verb}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(args),
    });
    return resp.json() as Promise<T>;
  }

  confirm(token: string): Promise<Record<string, unknown>> {
    return this.request(`/confirm/${token}`, { method: "POST" }).then((r) =>
      r.json(),
    );
  }

  cancel(token: string): Promise<Record<string, unknown>> {
    return this.request(`/cancel/${token}`, { method: "POST" }).then((r) =>
      r.json(),
    );
  }

  scheme(): Promise<Record<string, unknown>> {
    return this.getJson("/scheme");
  }

  pick(x: number, y: number, classes: string[]): Promise<PickResponse> {
    const params = new URLSearchParams({
      x: String(x),
      y: String(y),
      classes: classes.join(","),
    });
    return this.getJson(`/pick?${params}`);
  }

  applicable(kind: string, id: number): Promise<{ ops: string[] }> {
    return this.getJson(`/applicable/${kind}/${id}`);
  }

  async renderSvg(opts: {
    projection?: string;
    glyph?: boolean;
    token?: string;
    frame?: ProjectionFrame;
  } = {}): Promise<string> {
    const params = new URLSearchParams();
    if (opts.projection) params.set("projection", opts.projection);
    if (opts.glyph) params.set("glyph", "true");
    if (opts.token) params.set("token", opts.token);
    if (opts.frame) {
      params.set("ex", opts.frame.ex.join(","));
      params.set("ey", opts.frame.ey.join(","));
      params.set("ez", opts.frame.ez.join(","));
    }
    const query = params.toString();
    const resp = await this.request(`/render.svg${query ? "?" + query : ""}`);
    return resp.text();
  }

  variantsOrientation(
    symbol: string,
    pipes: number[],
  ): Promise<{ count: number; variants: OrientationVariant[] }> {
    const params = new URLSearchParams({
      symbol,
      pipes: pipes.join(","),
    });
    return this.getJson(`/variants/orientation?${params}`);
  }

  variantsDimension(
    origins: string[],
  ): Promise<{ variants: DimensionVariant[] }> {
    const params = new URLSearchParams({ origins: origins.join(" ") });
    return this.getJson(`/variants/dimension?${params}`);
  }

  flyAround(step: number, n: number): Promise<{ frames: ProjectionFrame[] }> {
    return this.op("fly_around", { step, n });
  }

  library(): Promise<{ name: string | null; symbols: Record<string, unknown> }> {
    return this.getJson("/library");
  }

  catalogs(): Promise<{ catalogs: unknown[] }> {
    return this.getJson("/catalogs");
  }

  projections(): Promise<{ presets: string[]; current: string }> {
    return this.getJson("/projections");
  }
}

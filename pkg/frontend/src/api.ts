import { CatalogEntry, ProgramRef, TimelineDocument, ValidationReport } from "./types.js";

/** HTTP error from the planning service, carrying the status and detail text. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client for the service endpoints the planning board needs. */
export class PlannerApi {
  constructor(
    private readonly baseUrl = "",
    private readonly fetchLike: FetchLike = (input, init) => fetch(input, init),
  ) {}

  programs(): Promise<ProgramRef[]> {
    return this.get<ProgramRef[]>("/api/programs");
  }

  catalog(programId: string, version: string): Promise<CatalogEntry[]> {
    const path = `/api/programs/${encodeURIComponent(programId)}/${encodeURIComponent(version)}/catalog`;
    return this.get<CatalogEntry[]>(path);
  }

  async validate(doc: TimelineDocument): Promise<ValidationReport> {
    const res = await this.fetchLike(this.baseUrl + "/api/validate", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(doc),
    });
    return this.decode<ValidationReport>(res);
  }

  private async get<T>(path: string): Promise<T> {
    const res = await this.fetchLike(this.baseUrl + path);
    return this.decode<T>(res);
  }

  private async decode<T>(res: Response): Promise<T> {
    if (!res.ok) {
      let detail = `request failed with status ${res.status}`;
      try {
        const body: unknown = await res.json();
        if (
          typeof body === "object" &&
          body !== null &&
          typeof (body as { detail?: unknown }).detail === "string"
        ) {
          detail = (body as { detail: string }).detail;
        }
      } catch {
        // keep the generic message when the error body is not JSON
      }
      throw new ApiError(res.status, detail);
    }
    return (await res.json()) as T;
  }
}

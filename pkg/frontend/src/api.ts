/** Typed client for the review-summary service; no business logic here. */

export interface SummaryRecord {
  product_id: string;
  summary_text: string;
  aspects_used: string[];
  review_count_at_generation: number;
  generated_at: string;
  model_id: string;
  length_ok: boolean;
  target_length: [number, number];
}

export interface SentimentCounts {
  positive: number;
  negative: number;
  mixed: number;
}

export interface AspectEntry {
  aspect: string;
  total: number;
  counts: SentimentCounts;
}

export interface AspectProfile {
  product_id: string;
  aspects: AspectEntry[];
}

export interface ReviewRow {
  review_id: string;
  product_id: string;
  text: string;
  created_at: string;
  verified_purchaser?: boolean | null;
  language?: string | null;
}

export interface ReviewPage {
  product_id: string;
  page: number;
  page_size: number;
  total: number;
  reviews: ReviewRow[];
}

export interface ReviewQuery {
  aspect?: string | null;
  sentiment?: string | null;
  page?: number;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function errorMessage(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { message?: string };
    return body.message ?? response.statusText;
  } catch {
    return response.statusText;
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async get<T>(path: string, signal?: AbortSignal): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, { signal });
    if (!response.ok) {
      throw new ApiError(response.status, await errorMessage(response));
    }
    return (await response.json()) as T;
  }

  /** Latest summary, or null when the product has none yet. */
  async getSummary(productId: string): Promise<SummaryRecord | null> {
    try {
      return await this.get<SummaryRecord>(`/products/${encodeURIComponent(productId)}/summary`);
    } catch (error) {
      if (error instanceof ApiError && error.status === 404) return null;
      throw error;
    }
  }

  /** Ranked aspects with per-sentiment counts, or null when no profile exists. */
  async getAspects(productId: string): Promise<AspectProfile | null> {
    try {
      return await this.get<AspectProfile>(`/products/${encodeURIComponent(productId)}/aspects`);
    } catch (error) {
      if (error instanceof ApiError && error.status === 404) return null;
      throw error;
    }
  }

  async getReviews(
    productId: string,
    query: ReviewQuery = {},
    signal?: AbortSignal,
  ): Promise<ReviewPage> {
    const params = new URLSearchParams();
    if (query.aspect) params.set("aspect", query.aspect);
    if (query.sentiment) params.set("sentiment", query.sentiment);
    if (query.page && query.page > 1) params.set("page", String(query.page));
    const suffix = params.toString() ? `?${params.toString()}` : "";
    return this.get<ReviewPage>(
      `/products/${encodeURIComponent(productId)}/reviews${suffix}`,
      signal,
    );
  }
}

/** Filter state for the review list, kept in sync with the page URL query. */

export type SentimentFilter = "positive" | "negative" | "mixed";

const SENTIMENTS: readonly SentimentFilter[] = ["positive", "negative", "mixed"];

export interface FilterState {
  aspect: string | null;
  sentiment: SentimentFilter | null;
  page: number;
}

export const EMPTY_FILTER: FilterState = { aspect: null, sentiment: null, page: 1 };

export function isSentimentFilter(value: string): value is SentimentFilter {
  return (SENTIMENTS as readonly string[]).includes(value);
}

/** Serialize to a URL query ("" when everything is at its default). */
export function toQuery(state: FilterState): string {
  const params = new URLSearchParams();
  if (state.aspect) params.set("aspect", state.aspect);
  if (state.aspect && state.sentiment) params.set("sentiment", state.sentiment);
  if (state.page > 1) params.set("page", String(state.page));
  const encoded = params.toString();
  return encoded ? `?${encoded}` : "";
}

/** Parse a URL query; unknown values degrade to the defaults. */
export function fromQuery(search: string): FilterState {
  const params = new URLSearchParams(search.startsWith("?") ? search.slice(1) : search);
  const aspect = params.get("aspect");
  const sentimentRaw = params.get("sentiment") ?? "";
  const sentiment = aspect && isSentimentFilter(sentimentRaw) ? sentimentRaw : null;
  const pageRaw = Number(params.get("page"));
  const page = Number.isInteger(pageRaw) && pageRaw > 1 ? pageRaw : 1;
  return { aspect: aspect || null, sentiment, page };
}

/** Chip click: activate the aspect, or clear the filter when already active. */
export function toggleAspect(state: FilterState, aspect: string): FilterState {
  if (state.aspect === aspect) return { ...EMPTY_FILTER };
  return { aspect, sentiment: null, page: 1 };
}

/** Sentiment toggle inside the active chip; same value switches it off. */
export function toggleSentiment(state: FilterState, sentiment: SentimentFilter): FilterState {
  if (!state.aspect) return state;
  return {
    aspect: state.aspect,
    sentiment: state.sentiment === sentiment ? null : sentiment,
    page: 1,
  };
}

export function withPage(state: FilterState, page: number): FilterState {
  return { ...state, page: Math.max(1, page) };
}

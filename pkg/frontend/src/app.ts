/** Product-page controller: fetch, render, and keep the URL in sync. */

import { ApiClient, type AspectProfile, type ReviewPage, type SummaryRecord } from "./api.js";
import {
  EMPTY_FILTER,
  fromQuery,
  toQuery,
  toggleAspect,
  toggleSentiment,
  withPage,
  type FilterState,
  type SentimentFilter,
} from "./filterState.js";
import { renderChips, renderErrorBanner, renderReviews, renderSummaryPanel } from "./view.js";

export interface UrlSync {
  read(): string;
  write(query: string): void;
}

const FILTER_KEYS = ["aspect", "sentiment", "page"] as const;

/** Mirrors the filter into location.search without adding history entries;
 * query params the filter does not own (e.g. product) are preserved. */
export function browserUrlSync(): UrlSync {
  return {
    read: () => window.location.search,
    write: (query) => {
      const merged = new URLSearchParams(window.location.search);
      for (const key of FILTER_KEYS) merged.delete(key);
      const incoming = new URLSearchParams(query.startsWith("?") ? query.slice(1) : query);
      incoming.forEach((value, key) => merged.set(key, value));
      const text = merged.toString();
      const url = `${window.location.pathname}${text ? `?${text}` : ""}`;
      window.history.replaceState(null, "", url);
    },
  };
}

export class ReviewExplorer {
  private filter: FilterState = { ...EMPTY_FILTER };
  private summary: SummaryRecord | null = null;
  private profile: AspectProfile | null = null;
  private reviewPage: ReviewPage | null = null;
  private errorText: string | null = null;
  private inflight: AbortController | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly productId: string,
    private readonly urlSync: UrlSync,
  ) {}

  /** Initial load; the filter state is restored from the page URL. */
  async start(): Promise<void> {
    this.filter = fromQuery(this.urlSync.read());
    try {
      [this.summary, this.profile] = await Promise.all([
        this.api.getSummary(this.productId),
        this.api.getAspects(this.productId),
      ]);
    } catch (error) {
      this.errorText = `Could not load product data: ${String(error)}`;
    }
    await this.refreshReviews();
  }

  currentFilter(): FilterState {
    return { ...this.filter };
  }

  async onChipClick(aspect: string): Promise<void> {
    this.filter = toggleAspect(this.filter, aspect);
    await this.refreshReviews();
  }

  async onSentimentToggle(sentiment: SentimentFilter): Promise<void> {
    this.filter = toggleSentiment(this.filter, sentiment);
    await this.refreshReviews();
  }

  async onPageChange(page: number): Promise<void> {
    this.filter = withPage(this.filter, page);
    await this.refreshReviews();
  }

  /** Reload the list from the filter endpoint; a failed reload keeps the
   * previous list and shows a non-blocking banner. Only one request is in
   * flight: starting a new one aborts its predecessor. */
  private async refreshReviews(): Promise<void> {
    this.urlSync.write(toQuery(this.filter));
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    try {
      const page = await this.api.getReviews(
        this.productId,
        {
          aspect: this.filter.aspect,
          sentiment: this.filter.sentiment,
          page: this.filter.page,
        },
        controller.signal,
      );
      if (this.inflight !== controller) return; // superseded by a later click
      this.reviewPage = page;
      this.errorText = null;
    } catch (error) {
      if (controller.signal.aborted) return;
      this.errorText = `Could not load reviews: ${String(error)}`;
    }
    this.render();
  }

  render(): void {
    this.root.textContent = "";
    const banner = renderErrorBanner(this.errorText);
    if (banner) this.root.appendChild(banner);
    const panel = renderSummaryPanel(this.summary);
    if (panel) this.root.appendChild(panel);
    const chips = renderChips(this.profile, this.filter, {
      onAspect: (aspect) => void this.onChipClick(aspect),
      onSentiment: (sentiment) => void this.onSentimentToggle(sentiment),
    });
    if (chips) this.root.appendChild(chips);
    this.root.appendChild(
      renderReviews(this.reviewPage, { onPage: (page) => void this.onPageChange(page) }),
    );
  }
}

/** DOM rendering. Pure render-from-data functions; no fetching, no state. */

import type { AspectProfile, ReviewPage, SummaryRecord } from "./api.js";
import type { FilterState, SentimentFilter } from "./filterState.js";

export interface ChipHandlers {
  onAspect(aspect: string): void;
  onSentiment(sentiment: SentimentFilter): void;
}

const SENTIMENTS: readonly SentimentFilter[] = ["positive", "negative", "mixed"];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

/** Summary panel above the reviews; absent summaries render nothing. */
export function renderSummaryPanel(summary: SummaryRecord | null): HTMLElement | null {
  if (!summary) return null;
  const panel = el("section", "summary-panel");
  panel.appendChild(el("h2", "summary-title", "What customers say"));
  panel.appendChild(el("p", "summary-text", summary.summary_text));
  panel.appendChild(
    el(
      "p",
      "summary-meta",
      `Based on ${summary.review_count_at_generation} reviews`,
    ),
  );
  return panel;
}

function breakdownTitle(counts: { positive: number; negative: number; mixed: number }): string {
  return `positive ${counts.positive} · negative ${counts.negative} · mixed ${counts.mixed}`;
}

/** Aspect chips labeled "<aspect> (<count>)"; the active chip carries the
 * sentiment toggle and an is-active marker. */
export function renderChips(
  profile: AspectProfile | null,
  filter: FilterState,
  handlers: ChipHandlers,
): HTMLElement | null {
  if (!profile || profile.aspects.length === 0) return null;
  const bar = el("nav", "chip-bar");
  for (const entry of profile.aspects) {
    const active = filter.aspect === entry.aspect;
    const chip = el("button", active ? "chip is-active" : "chip");
    chip.type = "button";
    chip.dataset.aspect = entry.aspect;
    chip.title = breakdownTitle(entry.counts);
    chip.textContent = `${entry.aspect} (${entry.total})`;
    chip.addEventListener("click", () => handlers.onAspect(entry.aspect));
    bar.appendChild(chip);

    if (active) {
      const toggle = el("span", "sentiment-toggle");
      for (const sentiment of SENTIMENTS) {
        const option = el(
          "button",
          filter.sentiment === sentiment
            ? "sentiment-option is-active"
            : "sentiment-option",
        );
        option.type = "button";
        option.dataset.sentiment = sentiment;
        option.textContent = `${sentiment} (${entry.counts[sentiment]})`;
        option.addEventListener("click", () => handlers.onSentiment(sentiment));
        toggle.appendChild(option);
      }
      bar.appendChild(toggle);
    }
  }
  return bar;
}

export interface PagerHandlers {
  onPage(page: number): void;
}

/** Review list exactly as returned by the API; never re-filtered locally. */
export function renderReviews(
  page: ReviewPage | null,
  handlers: PagerHandlers,
): HTMLElement {
  const section = el("section", "review-list");
  if (!page || page.total === 0) {
    section.appendChild(el("p", "empty-state", "No reviews to show."));
    return section;
  }
  const list = el("ul", "reviews");
  for (const review of page.reviews) {
    const item = el("li", "review");
    item.dataset.reviewId = review.review_id;
    item.appendChild(el("p", "review-text", review.text));
    item.appendChild(el("p", "review-meta", review.created_at));
    list.appendChild(item);
  }
  section.appendChild(list);

  const pages = Math.ceil(page.total / page.page_size);
  if (pages > 1) {
    const pager = el("div", "pager");
    const prev = el("button", "pager-prev", "Previous");
    prev.type = "button";
    prev.disabled = page.page <= 1;
    prev.addEventListener("click", () => handlers.onPage(page.page - 1));
    const next = el("button", "pager-next", "Next");
    next.type = "button";
    next.disabled = page.page >= pages;
    next.addEventListener("click", () => handlers.onPage(page.page + 1));
    pager.appendChild(prev);
    pager.appendChild(el("span", "pager-label", `Page ${page.page} of ${pages}`));
    pager.appendChild(next);
    section.appendChild(pager);
  }
  return section;
}

export function renderErrorBanner(message: string | null): HTMLElement | null {
  if (!message) return null;
  return el("div", "error-banner", message);
}

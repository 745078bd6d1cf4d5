import { describe, expect, it } from "vitest";

import {
  EMPTY_FILTER,
  fromQuery,
  toQuery,
  toggleAspect,
  toggleSentiment,
  withPage,
  type FilterState,
} from "../src/filterState.js";

describe("URL round-trip", () => {
  const states: FilterState[] = [
    { aspect: null, sentiment: null, page: 1 },
    { aspect: "assembly", sentiment: null, page: 1 },
    { aspect: "assembly", sentiment: "negative", page: 1 },
    { aspect: "value for money", sentiment: "mixed", page: 3 },
    { aspect: "color", sentiment: "positive", page: 2 },
  ];

  it("fromQuery(toQuery(state)) restores every state", () => {
    for (const state of states) {
      expect(fromQuery(toQuery(state))).toEqual(state);
    }
  });

  it("defaults serialize to an empty query", () => {
    expect(toQuery(EMPTY_FILTER)).toBe("");
  });

  it("aspect with spaces survives encoding", () => {
    const query = toQuery({ aspect: "value for money", sentiment: null, page: 1 });
    expect(fromQuery(query).aspect).toBe("value for money");
  });

  it("ignores unknown sentiment values", () => {
    expect(fromQuery("?aspect=color&sentiment=great").sentiment).toBeNull();
  });

  it("sentiment without an aspect is dropped", () => {
    expect(fromQuery("?sentiment=positive")).toEqual(EMPTY_FILTER);
  });

  it("bad page values fall back to 1", () => {
    expect(fromQuery("?page=0").page).toBe(1);
    expect(fromQuery("?page=robot").page).toBe(1);
    expect(fromQuery("?page=2.5").page).toBe(1);
  });

  it("unrelated query params are ignored", () => {
    const state = fromQuery("?product=p-1&aspect=color");
    expect(state.aspect).toBe("color");
  });
});

describe("toggleAspect", () => {
  it("activates a new aspect and resets sentiment and page", () => {
    const state: FilterState = { aspect: "color", sentiment: "positive", page: 4 };
    expect(toggleAspect(state, "assembly")).toEqual({
      aspect: "assembly",
      sentiment: null,
      page: 1,
    });
  });

  it("clicking the active aspect clears the filter", () => {
    const state: FilterState = { aspect: "assembly", sentiment: "negative", page: 2 };
    expect(toggleAspect(state, "assembly")).toEqual(EMPTY_FILTER);
  });
});

describe("toggleSentiment", () => {
  it("sets and unsets within the active chip", () => {
    const active: FilterState = { aspect: "assembly", sentiment: null, page: 1 };
    const withSentiment = toggleSentiment(active, "negative");
    expect(withSentiment.sentiment).toBe("negative");
    expect(toggleSentiment(withSentiment, "negative").sentiment).toBeNull();
  });

  it("is a no-op without an active aspect", () => {
    expect(toggleSentiment(EMPTY_FILTER, "positive")).toEqual(EMPTY_FILTER);
  });

  it("resets the page", () => {
    const state: FilterState = { aspect: "color", sentiment: null, page: 5 };
    expect(toggleSentiment(state, "mixed").page).toBe(1);
  });
});

describe("withPage", () => {
  it("clamps to page 1", () => {
    expect(withPage(EMPTY_FILTER, 0).page).toBe(1);
    expect(withPage(EMPTY_FILTER, 7).page).toBe(7);
  });
});

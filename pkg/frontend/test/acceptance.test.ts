// End-to-end behavior replay over the golden fixture, headless: only the
// pure ViewState transitions and the graph queries are involved.
import { describe, expect, it } from "vitest";

import { EMPTY_STATE, ViewState, explore, highlight, hoverColumn, selectTable } from "../src/state";
import { exampleGraph } from "./fixture";

const graph = exampleGraph();

function tables(state: ViewState): Set<string> {
  return new Set(state.visible.keys());
}

describe("explorer workflow replay", () => {
  it("walks the impact-analysis session step by step", () => {
    // select the table of interest: one node, all four columns
    let state = selectTable(graph, EMPTY_STATE, "web");
    expect(tables(state)).toEqual(new Set(["web"]));
    expect(graph.columnsOf("web")).toEqual(["cid", "date", "page", "reg"]);

    // first explore: only the direct dependents appear
    state = explore(graph, state, "web");
    expect(tables(state)).toEqual(new Set(["web", "webinfo", "webact"]));

    // second explore: the last dependent appears
    state = explore(graph, state, "webact");
    expect(tables(state)).toEqual(new Set(["web", "webinfo", "webact", "info"]));

    // nothing further downstream of info: the view stays as it is
    const settled = explore(graph, state, "info");
    expect(tables(settled)).toEqual(tables(state));

    // hovering page lights up its entire impact set
    const hovered = hoverColumn(graph, settled, "web.page");
    const lit = highlight(graph, hovered);
    expect(lit.columns).toEqual(
      new Set([
        "webinfo.wpage",
        "webact.wcid",
        "webact.wdate",
        "webact.wpage",
        "webact.wreg",
        "info.name",
        "info.age",
        "info.oid",
        "info.wcid",
        "info.wdate",
        "info.wpage",
        "info.wreg",
      ]),
    );

    const colorOf = (src: string, dst: string) =>
      lit.edges.find((entry) => entry.edge.src === src && entry.edge.dst === dst)?.color;
    expect(colorOf("web.page", "webinfo.wpage")).toBe("red"); // contributes
    expect(colorOf("web.page", "webact.wpage")).toBe("orange"); // both
  });
});

describe("layout invariant", () => {
  it("orders the fixture left to right along the data flow", () => {
    expect(graph.layerOf("web")).toBeLessThan(graph.layerOf("webinfo"));
    expect(graph.layerOf("webinfo")).toBeLessThan(graph.layerOf("webact"));
    expect(graph.layerOf("webact")).toBeLessThan(graph.layerOf("info"));
    expect(graph.layerOf("customers")).toBeLessThan(graph.layerOf("webinfo"));
  });
});

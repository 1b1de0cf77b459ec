import { LineageGraph, tableOf } from "./graph";
import { EdgeKind, LineageEdge } from "./types";

/**
 * Direction a visible table may still expand in. The selected table of
 * interest explores both ways; a table revealed as someone's downstream
 * keeps exploring downstream (and vice versa), so an impact walk never
 * drags in the unrelated upstreams of the tables it passes through.
 */
export type Direction = "up" | "down" | "both";

export interface ViewState {
  /** Visible tables and the direction each one expands in. */
  readonly visible: ReadonlyMap<string, Direction>;
  /** Hovered column ("relation.column"), driving the highlight overlay. */
  readonly focused: string | null;
  /** Transient message for the toast area; null when nothing to say. */
  readonly notice: string | null;
}

export const EMPTY_STATE: ViewState = {
  visible: new Map(),
  focused: null,
  notice: null,
};

/** Semantic edge colors; the renderer maps these to concrete styles. */
export type EdgeColor = "red" | "blue" | "orange";

export const EDGE_COLORS: Readonly<Record<EdgeKind, EdgeColor>> = {
  contributes: "red",
  references: "blue",
  both: "orange",
};

export interface HighlightEdge {
  edge: LineageEdge;
  color: EdgeColor;
}

export interface Highlight {
  /** Downstream closure of the focused column, visible tables only. */
  columns: ReadonlySet<string>;
  /** Edges connecting the focused column and the highlighted columns. */
  edges: readonly HighlightEdge[];
}

const NO_HIGHLIGHT: Highlight = { columns: new Set(), edges: [] };

/** Show exactly one table; unknown names leave the view alone with a toast. */
export function selectTable(graph: LineageGraph, state: ViewState, name: string): ViewState {
  if (!graph.hasTable(name)) {
    return { ...state, notice: `no table named '${name}'` };
  }
  return {
    visible: new Map([[name, "both"]]),
    focused: null,
    notice: null,
  };
}

/** Reveal the table's not-yet-visible neighbors along its direction. */
export function explore(graph: LineageGraph, state: ViewState, name: string): ViewState {
  const direction = state.visible.get(name);
  if (direction === undefined) {
    return state;
  }
  const additions = new Map<string, Direction>();
  if (direction !== "up") {
    for (const neighbor of graph.downstreamTables(name)) {
      if (!state.visible.has(neighbor)) {
        additions.set(neighbor, "down");
      }
    }
  }
  if (direction !== "down") {
    for (const neighbor of graph.upstreamTables(name)) {
      if (!state.visible.has(neighbor)) {
        additions.set(neighbor, additions.has(neighbor) ? "both" : "up");
      }
    }
  }
  if (additions.size === 0) {
    return { ...state, notice: `no more tables to reveal from '${name}'` };
  }
  const visible = new Map(state.visible);
  for (const [neighbor, dir] of additions) {
    visible.set(neighbor, dir);
  }
  return { visible, focused: state.focused, notice: null };
}

/** Focus a column for highlighting; anything not visible clears the focus. */
export function hoverColumn(graph: LineageGraph, state: ViewState, ref: string): ViewState {
  if (!graph.hasColumn(ref) || !state.visible.has(tableOf(ref))) {
    return clearHover(state);
  }
  if (state.focused === ref) {
    return state;
  }
  return { ...state, focused: ref };
}

export function clearHover(state: ViewState): ViewState {
  if (state.focused === null) {
    return state;
  }
  return { ...state, focused: null };
}

export function clearNotice(state: ViewState): ViewState {
  if (state.notice === null) {
    return state;
  }
  return { ...state, notice: null };
}

/** Case-insensitive substring filter over table names, for the dropdown. */
export function filterTables(graph: LineageGraph, query: string): string[] {
  const needle = query.trim().toLowerCase();
  const names = graph.tables();
  if (needle === "") {
    return names;
  }
  return names.filter((name) => name.toLowerCase().includes(needle));
}

/** Edges whose endpoints both belong to visible tables. */
export function visibleEdges(graph: LineageGraph, state: ViewState): LineageEdge[] {
  return graph
    .edges()
    .filter(
      (edge) => state.visible.has(tableOf(edge.src)) && state.visible.has(tableOf(edge.dst)),
    );
}

/**
 * The highlight induced by the focused column: its downstream closure cut
 * down to visible tables, plus the closure-internal edges, colored by kind.
 * Pure derivation; the graph stays the single source of truth.
 */
export function highlight(graph: LineageGraph, state: ViewState): Highlight {
  if (state.focused === null) {
    return NO_HIGHLIGHT;
  }
  const closure = graph.downstreamClosure(state.focused);
  const columns = new Set<string>();
  for (const ref of closure) {
    if (state.visible.has(tableOf(ref))) {
      columns.add(ref);
    }
  }
  const members = new Set(columns);
  members.add(state.focused);
  const edges: HighlightEdge[] = [];
  for (const edge of graph.edges()) {
    if (members.has(edge.src) && columns.has(edge.dst)) {
      edges.push({ edge, color: EDGE_COLORS[edge.kind] });
    }
  }
  return { columns, edges };
}

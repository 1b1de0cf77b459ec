import {
  EDGE_KINDS,
  LineageDocument,
  LineageEdge,
  NODE_KINDS,
  RelationNode,
} from "./types";

/** Relation part of a qualified column ("a.b.c" -> "a.b"). */
export function tableOf(ref: string): string {
  const dot = ref.lastIndexOf(".");
  if (dot <= 0) {
    throw new Error(`not a qualified column: '${ref}'`);
  }
  return ref.slice(0, dot);
}

/** Column part of a qualified column ("a.b.c" -> "c"). */
export function columnOf(ref: string): string {
  return ref.slice(ref.lastIndexOf(".") + 1);
}

function checkDocument(raw: unknown): LineageDocument {
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new Error("lineage document must be a JSON object");
  }
  const doc = raw as Partial<LineageDocument>;
  if (doc.version !== 1) {
    throw new Error(`unsupported lineage document version: ${doc.version}`);
  }
  if (typeof doc.nodes !== "object" || doc.nodes === null || Array.isArray(doc.nodes)) {
    throw new Error("'nodes' must be an object");
  }
  for (const [name, node] of Object.entries(doc.nodes)) {
    const entry = node as Partial<RelationNode>;
    if (!NODE_KINDS.includes(entry.kind as RelationNode["kind"])) {
      throw new Error(`node '${name}' has unknown kind '${entry.kind}'`);
    }
    if (!Array.isArray(entry.columns) || entry.columns.some((c) => typeof c !== "string")) {
      throw new Error(`node '${name}' has a malformed column list`);
    }
  }
  if (!Array.isArray(doc.edges)) {
    throw new Error("'edges' must be an array");
  }
  if (!Array.isArray(doc.diagnostics)) {
    throw new Error("'diagnostics' must be an array");
  }
  return doc as LineageDocument;
}

/**
 * Immutable lineage graph over a parsed document, with the indexes the
 * explorer needs: per-column adjacency, table-level neighbors, BFS closures
 * and a left-to-right layer assignment.
 */
export class LineageGraph {
  readonly doc: LineageDocument;

  private readonly columnSet: Set<string>;
  private readonly outgoing: Map<string, LineageEdge[]>;
  private readonly incoming: Map<string, LineageEdge[]>;
  private readonly tableDown: Map<string, Set<string>>;
  private readonly tableUp: Map<string, Set<string>>;
  private readonly layerIndex: Map<string, number>;

  constructor(doc: LineageDocument) {
    this.doc = checkDocument(doc);

    this.columnSet = new Set<string>();
    for (const [name, node] of Object.entries(this.doc.nodes)) {
      for (const column of node.columns) {
        this.columnSet.add(`${name}.${column}`);
      }
    }

    this.outgoing = new Map();
    this.incoming = new Map();
    this.tableDown = new Map();
    this.tableUp = new Map();
    for (const name of Object.keys(this.doc.nodes)) {
      this.tableDown.set(name, new Set());
      this.tableUp.set(name, new Set());
    }
    for (const edge of this.doc.edges) {
      if (!EDGE_KINDS.includes(edge.kind)) {
        throw new Error(`edge ${edge.src} -> ${edge.dst} has unknown kind '${edge.kind}'`);
      }
      // endpoints must exist as (node, column) slots
      for (const endpoint of [edge.src, edge.dst]) {
        if (!this.columnSet.has(endpoint)) {
          throw new Error(`edge endpoint '${endpoint}' is not a column of any node`);
        }
      }
      push(this.outgoing, edge.src, edge);
      push(this.incoming, edge.dst, edge);
      const srcTable = tableOf(edge.src);
      const dstTable = tableOf(edge.dst);
      if (srcTable !== dstTable) {
        this.tableDown.get(srcTable)!.add(dstTable);
        this.tableUp.get(dstTable)!.add(srcTable);
      }
    }

    this.layerIndex = assignLayers(this.tableUp);
  }

  /** Parse a document (object or raw JSON text) into a graph. */
  static parse(raw: unknown): LineageGraph {
    const doc = typeof raw === "string" ? JSON.parse(raw) : raw;
    return new LineageGraph(doc);
  }

  tables(): string[] {
    return Object.keys(this.doc.nodes).sort();
  }

  hasTable(name: string): boolean {
    return name in this.doc.nodes;
  }

  nodeOf(name: string): RelationNode {
    const node = this.doc.nodes[name];
    if (node === undefined) {
      throw new Error(`unknown relation '${name}'`);
    }
    return node;
  }

  columnsOf(name: string): string[] {
    return this.nodeOf(name).columns.slice();
  }

  hasColumn(ref: string): boolean {
    return this.columnSet.has(ref);
  }

  edges(): readonly LineageEdge[] {
    return this.doc.edges;
  }

  edgesFrom(ref: string): readonly LineageEdge[] {
    return this.outgoing.get(ref) ?? [];
  }

  edgesInto(ref: string): readonly LineageEdge[] {
    return this.incoming.get(ref) ?? [];
  }

  /** Every column reachable along edge direction; the seed is excluded. */
  downstreamClosure(ref: string): Set<string> {
    return this.closure(ref, this.outgoing, (edge) => edge.dst);
  }

  /** Every column that reaches `ref`; the seed is excluded. */
  upstreamClosure(ref: string): Set<string> {
    return this.closure(ref, this.incoming, (edge) => edge.src);
  }

  private closure(
    ref: string,
    adjacency: Map<string, LineageEdge[]>,
    step: (edge: LineageEdge) => string,
  ): Set<string> {
    if (!this.columnSet.has(ref)) {
      throw new Error(`unknown column '${ref}'`);
    }
    const seen = new Set<string>([ref]);
    const queue = [ref];
    while (queue.length > 0) {
      const current = queue.shift()!;
      for (const edge of adjacency.get(current) ?? []) {
        const next = step(edge);
        if (!seen.has(next)) {
          seen.add(next);
          queue.push(next);
        }
      }
    }
    seen.delete(ref);
    return seen;
  }

  /** Tables receiving at least one edge from `name`'s columns. */
  downstreamTables(name: string): Set<string> {
    this.nodeOf(name);
    return new Set(this.tableDown.get(name));
  }

  /** Tables feeding at least one edge into `name`'s columns. */
  upstreamTables(name: string): Set<string> {
    this.nodeOf(name);
    return new Set(this.tableUp.get(name));
  }

  /**
   * Left-to-right layer of a relation: 0 for tables with no upstream,
   * otherwise one past the deepest upstream. Data flows from lower to
   * higher layers, so every edge satisfies layer(src) < layer(dst) when
   * the graph is acyclic.
   */
  layerOf(name: string): number {
    const layer = this.layerIndex.get(name);
    if (layer === undefined) {
      throw new Error(`unknown relation '${name}'`);
    }
    return layer;
  }

  layers(): Map<string, number> {
    return new Map(this.layerIndex);
  }
}

function push(index: Map<string, LineageEdge[]>, key: string, edge: LineageEdge): void {
  const bucket = index.get(key);
  if (bucket === undefined) {
    index.set(key, [edge]);
  } else {
    bucket.push(edge);
  }
}

/**
 * Longest-path layering over the table-level dependency graph. Tables are
 * processed in topological order; members of dependency cycles (possible in
 * graphs extracted with CyclicDependency diagnostics) are placed one past
 * the deepest already-layered upstream instead of looping forever.
 */
function assignLayers(tableUp: Map<string, Set<string>>): Map<string, number> {
  const layers = new Map<string, number>();
  const names = [...tableUp.keys()].sort();
  const remaining = new Set(names);

  let progressed = true;
  while (remaining.size > 0 && progressed) {
    progressed = false;
    for (const name of names) {
      if (!remaining.has(name)) {
        continue;
      }
      const upstreams = tableUp.get(name)!;
      let ready = true;
      let depth = -1;
      for (const upstream of upstreams) {
        const layer = layers.get(upstream);
        if (layer === undefined) {
          ready = false;
          break;
        }
        depth = Math.max(depth, layer);
      }
      if (ready) {
        layers.set(name, depth + 1);
        remaining.delete(name);
        progressed = true;
      }
    }
  }

  // leftovers are cycle members; settle them without recursion
  for (const name of names) {
    if (!remaining.has(name)) {
      continue;
    }
    let depth = -1;
    for (const upstream of tableUp.get(name)!) {
      depth = Math.max(depth, layers.get(upstream) ?? -1);
    }
    layers.set(name, depth + 1);
    remaining.delete(name);
  }
  return layers;
}

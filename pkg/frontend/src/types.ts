/**
 * Shapes of the canonical lineage document (version 1) produced by
 * `lineage-forge extract`. The JSON is the single source of truth; the UI
 * only runs closure and neighbor queries over it.
 */

export type EdgeKind = "contributes" | "references" | "both";

export type NodeKind = "base" | "view" | "query";

export type Severity = "warning" | "error";

export interface LineageEdge {
  src: string; // qualified "relation.column"
  dst: string;
  kind: EdgeKind;
}

export interface RelationNode {
  kind: NodeKind;
  columns: string[]; // declaration order, preserved for display
}

export interface Diagnostic {
  severity: Severity;
  code: string;
  message: string;
  query: string;
}

export interface LineageDocument {
  version: number;
  nodes: Record<string, RelationNode>;
  edges: LineageEdge[];
  diagnostics: Diagnostic[];
}

export const EDGE_KINDS: readonly EdgeKind[] = ["contributes", "references", "both"];

export const NODE_KINDS: readonly NodeKind[] = ["base", "view", "query"];

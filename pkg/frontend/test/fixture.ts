import { readFileSync } from "node:fs";

import { LineageGraph } from "../src/graph";
import { LineageDocument } from "../src/types";

const FIXTURE = new URL("../../tests/fixtures/example1_lineage.json", import.meta.url);

export function exampleDocument(): LineageDocument {
  return JSON.parse(readFileSync(FIXTURE, "utf8"));
}

export function exampleGraph(): LineageGraph {
  return new LineageGraph(exampleDocument());
}

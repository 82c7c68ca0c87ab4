/**
 * AnnotationSet JSONL schema shared with the graph-building pipeline.
 *
 * All spans are [start, end) over the flat token list of a document.
 */

export type Span = [number, number];

export interface AnnotationSet {
  doc_id: string;
  /** [surface, lemma, pos] per token */
  tokens: [string, string, string][];
  sentences: Span[];
  np: Span[];
  vp: Span[];
  adj: Span[];
  coref: Span[][];
}

export class SchemaError extends Error {}

function checkSpan(span: Span, n: number, docId: string, label: string): void {
  const [s, e] = span;
  if (!Number.isInteger(s) || !Number.isInteger(e) || s < 0 || s >= e || e > n) {
    throw new SchemaError(`${label} span out of range in ${docId}: (${s},${e})`);
  }
}

function checkDisjoint(spans: Span[], docId: string, label: string): void {
  const sorted = [...spans].sort((a, b) => a[0] - b[0]);
  for (let i = 1; i < sorted.length; i++) {
    if (sorted[i][0] < sorted[i - 1][1]) {
      throw new SchemaError(`overlapping ${label} spans in ${docId}`);
    }
  }
}

/** Throws SchemaError on any structural violation; returns its input. */
export function validateAnnotation(ann: AnnotationSet): AnnotationSet {
  if (typeof ann.doc_id !== "string" || ann.doc_id.length === 0) {
    throw new SchemaError("annotation record missing doc_id");
  }
  const n = ann.tokens.length;
  for (const tok of ann.tokens) {
    if (tok.length !== 3 || tok.some((part) => typeof part !== "string")) {
      throw new SchemaError(`malformed token triple in ${ann.doc_id}`);
    }
  }
  for (const span of ann.sentences) checkSpan(span, n, ann.doc_id, "sentence");
  for (const span of ann.np) checkSpan(span, n, ann.doc_id, "np");
  for (const span of ann.vp) checkSpan(span, n, ann.doc_id, "vp");
  for (const span of ann.adj) checkSpan(span, n, ann.doc_id, "adj");
  checkDisjoint(ann.np, ann.doc_id, "np");
  checkDisjoint(ann.vp, ann.doc_id, "vp");
  checkDisjoint(ann.adj, ann.doc_id, "adj");
  for (const chain of ann.coref) {
    if (chain.length < 2) {
      throw new SchemaError(`coref chain of <2 spans in ${ann.doc_id}`);
    }
    for (const span of chain) checkSpan(span, n, ann.doc_id, "coref");
  }
  return ann;
}

/** One JSONL line with stable key order. */
export function serializeAnnotation(ann: AnnotationSet): string {
  validateAnnotation(ann);
  return JSON.stringify({
    doc_id: ann.doc_id,
    tokens: ann.tokens,
    sentences: ann.sentences,
    np: ann.np,
    vp: ann.vp,
    adj: ann.adj,
    coref: ann.coref,
  });
}

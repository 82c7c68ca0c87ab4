/**
 * Convert a parser-server document into the flat annotation record consumed
 * by the graph-building pipeline: global token triples, sentence boundaries,
 * phrase spans, and coreference chains, all as 0-based end-exclusive offsets.
 */
import type { ServerDocument } from "./client.js";
import type { AnnotationSet, Span } from "./schema.js";
import { basicNounPhrases, leavesWithPos, parseTree, TreeParseError } from "./tree.js";

function shift(span: Span, offset: number): Span {
  return [span[0] + offset, span[1] + offset];
}

export function convertDocument(docId: string, doc: ServerDocument): AnnotationSet {
  const tokens: [string, string, string][] = [];
  const sentences: Span[] = [];
  const np: Span[] = [];
  const vp: Span[] = [];
  const adj: Span[] = [];

  const sentenceOffsets: number[] = [];
  for (const sent of doc.sentences) {
    const offset = tokens.length;
    sentenceOffsets.push(offset);
    for (const tok of sent.tokens) {
      tokens.push([tok.word, tok.lemma, tok.pos]);
    }
    sentences.push([offset, tokens.length]);
    if (!sent.parse) continue;
    let tree;
    try {
      tree = parseTree(sent.parse);
    } catch (err) {
      if (err instanceof TreeParseError) continue;
      throw err;
    }
    for (const span of basicNounPhrases(tree)) np.push(shift(span, offset));
    for (const span of leavesWithPos(tree, (p) => p.startsWith("VB"))) {
      vp.push(shift(span, offset));
    }
    for (const span of leavesWithPos(tree, (p) => p.startsWith("JJ"))) {
      adj.push(shift(span, offset));
    }
  }

  const coref: Span[][] = [];
  for (const chain of Object.values(doc.corefs ?? {})) {
    const spans: Span[] = [];
    for (const mention of chain) {
      const offset = sentenceOffsets[mention.sentNum - 1];
      if (offset === undefined) continue;
      spans.push([offset + mention.startIndex - 1, offset + mention.endIndex - 1]);
    }
    if (spans.length >= 2) coref.push(spans);
  }

  return { doc_id: docId, tokens, sentences, np, vp, adj, coref };
}

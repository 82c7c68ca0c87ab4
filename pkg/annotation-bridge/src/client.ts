/**
 * Minimal client for a CoreNLP-style document server: POST the raw document
 * text, receive the JSON document with sentences, tokens, parse trees, and
 * coreference chains.
 */

export interface ServerToken {
  index: number; // 1-based within the sentence
  word: string;
  lemma: string;
  pos: string;
}

export interface ServerSentence {
  index: number;
  tokens: ServerToken[];
  parse: string;
}

export interface CorefMention {
  sentNum: number; // 1-based sentence number
  startIndex: number; // 1-based token index, inclusive
  endIndex: number; // 1-based token index, exclusive
}

export interface ServerDocument {
  sentences: ServerSentence[];
  corefs?: Record<string, CorefMention[]>;
}

export class ToolchainError extends Error {}

const ANNOTATORS = "tokenize,ssplit,pos,lemma,parse,coref";

export async function fetchServerVersion(endpoint: string): Promise<string> {
  const res = await fetch(new URL("/version", endpoint));
  if (!res.ok) {
    throw new ToolchainError(`version probe failed: HTTP ${res.status}`);
  }
  return (await res.text()).trim();
}

export async function annotateDocument(
  endpoint: string,
  text: string,
): Promise<ServerDocument> {
  const url = new URL(endpoint);
  url.searchParams.set(
    "properties",
    JSON.stringify({ annotators: ANNOTATORS, outputFormat: "json" }),
  );
  let res: Response;
  try {
    res = await fetch(url, { method: "POST", body: text });
  } catch (err) {
    throw new ToolchainError(`annotation server unreachable: ${err}`);
  }
  if (!res.ok) {
    throw new ToolchainError(`annotation failed: HTTP ${res.status}`);
  }
  const doc = (await res.json()) as ServerDocument;
  if (!Array.isArray(doc.sentences)) {
    throw new ToolchainError("server response missing sentences");
  }
  return doc;
}

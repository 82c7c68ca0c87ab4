/**
 * Annotate a corpus of documents against a parser server, with optional disk
 * caching and bounded parallelism, producing one annotation record per line.
 */
import { annotateDocument, fetchServerVersion } from "./client.js";
import { AnnotationCache } from "./cache.js";
import { convertDocument } from "./convert.js";
import { serializeAnnotation, validateAnnotation } from "./schema.js";
import type { AnnotationSet } from "./schema.js";

export interface CorpusDocument {
  id: string;
  text: string;
}

export interface DocError {
  doc_id: string;
  error: string;
}

export interface AnnotateResult {
  annotations: AnnotationSet[];
  errors: DocError[];
}

export interface AnnotateOptions {
  endpoint: string;
  cacheDir?: string;
  concurrency?: number;
}

export function parseCorpusLines(raw: string): CorpusDocument[] {
  const docs: CorpusDocument[] = [];
  const seen = new Set<string>();
  for (const [i, line] of raw.split("\n").entries()) {
    if (!line.trim()) continue;
    let obj: unknown;
    try {
      obj = JSON.parse(line);
    } catch {
      throw new Error(`malformed JSON on line ${i + 1}`);
    }
    const rec = obj as Partial<CorpusDocument>;
    if (typeof rec.id !== "string" || typeof rec.text !== "string") {
      throw new Error(`line ${i + 1} must have string "id" and "text" fields`);
    }
    if (seen.has(rec.id)) throw new Error(`duplicate document id: ${rec.id}`);
    seen.add(rec.id);
    docs.push({ id: rec.id, text: rec.text });
  }
  return docs;
}

export async function annotateCorpus(
  docs: CorpusDocument[],
  options: AnnotateOptions,
): Promise<AnnotateResult> {
  let cache: AnnotationCache | null = null;
  if (options.cacheDir) {
    const version = await fetchServerVersion(options.endpoint);
    cache = new AnnotationCache(options.cacheDir, version);
  }
  const concurrency = Math.max(1, options.concurrency ?? 4);
  const annotations: (AnnotationSet | null)[] = docs.map(() => null);
  const errors: DocError[] = [];

  let next = 0;
  async function worker(): Promise<void> {
    while (true) {
      const i = next++;
      if (i >= docs.length) return;
      const doc = docs[i];
      try {
        let annotation = await cache?.get(doc.text);
        if (!annotation) {
          const serverDoc = await annotateDocument(options.endpoint, doc.text);
          annotation = convertDocument(doc.id, serverDoc);
          validateAnnotation(annotation);
          await cache?.put(doc.text, annotation);
        } else {
          annotation = { ...annotation, doc_id: doc.id };
          validateAnnotation(annotation);
        }
        annotations[i] = annotation;
      } catch (err) {
        errors.push({ doc_id: doc.id, error: String(err) });
      }
    }
  }
  await Promise.all(Array.from({ length: concurrency }, worker));

  return {
    annotations: annotations.filter((a): a is AnnotationSet => a !== null),
    errors,
  };
}

export function toJsonLines(annotations: AnnotationSet[]): string {
  return annotations.map((a) => serializeAnnotation(a) + "\n").join("");
}

#!/usr/bin/env node
/**
 * Command line entry point: read a JSONL corpus, annotate each document
 * against a parser server, and write one annotation record per line.
 */
import { readFile, writeFile } from "node:fs/promises";
import { parseArgs } from "node:util";
import { annotateCorpus, parseCorpusLines, toJsonLines } from "./annotate.js";

const USAGE =
  "usage: annotate-bridge --in corpus.jsonl --out annotations.jsonl " +
  "--endpoint URL [--cache-dir DIR] [--concurrency N]";

async function main(): Promise<number> {
  let args;
  try {
    args = parseArgs({
      options: {
        in: { type: "string" },
        out: { type: "string" },
        endpoint: { type: "string" },
        "cache-dir": { type: "string" },
        concurrency: { type: "string", default: "4" },
        help: { type: "boolean", default: false },
      },
    });
  } catch (err) {
    console.error(String(err));
    console.error(USAGE);
    return 1;
  }
  const { values } = args;
  if (values.help) {
    console.log(USAGE);
    return 0;
  }
  if (!values.in || !values.out || !values.endpoint) {
    console.error(USAGE);
    return 1;
  }
  const concurrency = Number(values.concurrency);
  if (!Number.isInteger(concurrency) || concurrency < 1) {
    console.error("--concurrency must be a positive integer");
    return 1;
  }

  let raw: string;
  try {
    raw = await readFile(values.in, "utf8");
  } catch (err) {
    console.error(`cannot read ${values.in}: ${err}`);
    return 2;
  }
  let docs;
  try {
    docs = parseCorpusLines(raw);
  } catch (err) {
    console.error(String(err));
    return 2;
  }

  const result = await annotateCorpus(docs, {
    endpoint: values.endpoint,
    cacheDir: values["cache-dir"],
    concurrency,
  });
  await writeFile(values.out, toJsonLines(result.annotations), "utf8");
  for (const e of result.errors) {
    console.error(`error annotating ${e.doc_id}: ${e.error}`);
  }
  console.log(
    `annotated ${result.annotations.length}/${docs.length} documents -> ${values.out}`,
  );
  return result.errors.length > 0 ? 2 : 0;
}

main().then((code) => {
  process.exitCode = code;
});

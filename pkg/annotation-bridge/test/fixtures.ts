/**
 * Handcrafted parser-server responses for a five-document corpus, plus a tiny
 * HTTP server that replays them keyed on the posted text.
 */
import { createServer, Server } from "node:http";
import type { AddressInfo } from "node:net";
import type { ServerDocument, ServerSentence } from "../src/client.js";

function sentence(
  index: number,
  words: [string, string, string][],
  parse: string,
): ServerSentence {
  return {
    index,
    parse,
    tokens: words.map(([word, lemma, pos], i) => ({
      index: i + 1,
      word,
      lemma,
      pos,
    })),
  };
}

export const CORPUS: { id: string; text: string }[] = [
  { id: "cat", text: "The cat sat." },
  { id: "lunar", text: "The lunar module lands. It carries the crew." },
  { id: "deep", text: "Deep learning models read long documents." },
  { id: "empty", text: "" },
  { id: "adj", text: "A bright star shines." },
];

export const RESPONSES: Record<string, ServerDocument> = {
  "The cat sat.": {
    sentences: [
      sentence(
        0,
        [
          ["The", "the", "DT"],
          ["cat", "cat", "NN"],
          ["sat", "sit", "VBD"],
          [".", ".", "."],
        ],
        "(ROOT (S (NP (DT The) (NN cat)) (VP (VBD sat)) (. .)))",
      ),
    ],
  },
  "The lunar module lands. It carries the crew.": {
    sentences: [
      sentence(
        0,
        [
          ["The", "the", "DT"],
          ["lunar", "lunar", "JJ"],
          ["module", "module", "NN"],
          ["lands", "land", "VBZ"],
          [".", ".", "."],
        ],
        "(ROOT (S (NP (DT The) (JJ lunar) (NN module)) (VP (VBZ lands)) (. .)))",
      ),
      sentence(
        1,
        [
          ["It", "it", "PRP"],
          ["carries", "carry", "VBZ"],
          ["the", "the", "DT"],
          ["crew", "crew", "NN"],
          [".", ".", "."],
        ],
        "(ROOT (S (NP (PRP It)) (VP (VBZ carries) (NP (DT the) (NN crew))) (. .)))",
      ),
    ],
    corefs: {
      "1": [
        { sentNum: 1, startIndex: 1, endIndex: 4 },
        { sentNum: 2, startIndex: 1, endIndex: 2 },
      ],
    },
  },
  "Deep learning models read long documents.": {
    sentences: [
      sentence(
        0,
        [
          ["Deep", "deep", "JJ"],
          ["learning", "learning", "NN"],
          ["models", "model", "NNS"],
          ["read", "read", "VBP"],
          ["long", "long", "JJ"],
          ["documents", "document", "NNS"],
          [".", ".", "."],
        ],
        "(ROOT (S (NP (JJ Deep) (NN learning) (NNS models)) (VP (VBP read) (NP (JJ long) (NNS documents))) (. .)))",
      ),
    ],
  },
  "": { sentences: [] },
  "A bright star shines.": {
    sentences: [
      sentence(
        0,
        [
          ["A", "a", "DT"],
          ["bright", "bright", "JJ"],
          ["star", "star", "NN"],
          ["shines", "shine", "VBZ"],
          [".", ".", "."],
        ],
        "(ROOT (S (NP (DT A) (JJ bright) (NN star)) (VP (VBZ shines)) (. .)))",
      ),
    ],
  },
};

export interface FakeServer {
  endpoint: string;
  requestCount: () => number;
  close: () => Promise<void>;
}

export async function startFakeServer(version = "fake-1.0"): Promise<FakeServer> {
  let requests = 0;
  const server: Server = createServer((req, res) => {
    if (req.method === "GET" && req.url?.startsWith("/version")) {
      res.writeHead(200, { "content-type": "text/plain" });
      res.end(version);
      return;
    }
    let body = "";
    req.on("data", (chunk) => (body += chunk));
    req.on("end", () => {
      requests++;
      const doc = RESPONSES[body];
      if (!doc) {
        res.writeHead(500);
        res.end("unknown document");
        return;
      }
      res.writeHead(200, { "content-type": "application/json" });
      res.end(JSON.stringify(doc));
    });
  });
  await new Promise<void>((resolve) => server.listen(0, "127.0.0.1", resolve));
  const { port } = server.address() as AddressInfo;
  return {
    endpoint: `http://127.0.0.1:${port}/`,
    requestCount: () => requests,
    close: () =>
      new Promise<void>((resolve, reject) =>
        server.close((err) => (err ? reject(err) : resolve())),
      ),
  };
}

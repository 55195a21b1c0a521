#!/usr/bin/env python3
# Copyright 2026 The seqrec Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes an SREMB1 table of e5 vectors for every item of a seqrec corpus.

Each catalog item gets two rows, keyed "passage: Title: ..." and
"query: Title: ...", which covers the queries issued by the last-item and
oracle generators. Use the result with dense.provider=file.

    python3 tools/precompute_embeddings.py work/corpus.seqrec beauty.sremb
"""

import argparse
import json
import re
import struct
import sys

MAGIC = b"SREMB1"
VERSION = 1
SPACE = " \t\r\n\f\v"


def read_titles(corpus_path):
    with open(corpus_path, encoding="utf-8") as f:
        if f.readline().rstrip("\n") != "SEQREC1":
            raise SystemExit(f"{corpus_path}: not a SEQREC1 corpus")
        return [rec["title"] for rec in map(json.loads, f) if rec.get("kind") == "item"]


def render_item(title, item_line="Title: {title}"):
    title = re.sub(r"\r\n|\r|\n", " ", title).strip(SPACE)
    return item_line.replace("{title}", title, 1).strip(SPACE)


def write_table(path, provider, keys, rows):
    dim = len(rows[0]) if rows else 0
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<IIQ", VERSION, dim, len(rows)))
        name = provider.encode("utf-8")
        f.write(struct.pack("<I", len(name)) + name)
        for row in rows:
            f.write(struct.pack(f"<{dim}f", *row))
        for key in keys:
            raw = key.encode("utf-8")
            f.write(struct.pack("<I", len(raw)) + raw)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("corpus")
    parser.add_argument("output")
    parser.add_argument("--model", default="intfloat/e5-small-v2")
    parser.add_argument("--provider-name", default="e5-small-v2")
    parser.add_argument("--batch-size", type=int, default=256)
    parser.add_argument("--item-line", default="Title: {title}")
    args = parser.parse_args(argv)

    from sentence_transformers import SentenceTransformer

    texts = sorted({render_item(t, args.item_line) for t in read_titles(args.corpus)})
    keys = [f"{role}: {t}" for role in ("passage", "query") for t in texts]
    model = SentenceTransformer(args.model)
    vectors = model.encode(keys, batch_size=args.batch_size, normalize_embeddings=True,
                           show_progress_bar=True)
    write_table(args.output, args.provider_name, keys, vectors.tolist())
    print(f"{args.output}: {len(keys)} rows, dim {vectors.shape[1]}", file=sys.stderr)


if __name__ == "__main__":
    main()

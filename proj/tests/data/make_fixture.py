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
"""Writes the 20-user fixture dumps (reviews.json, meta.json) next to this file.

Lines alternate between strict JSON and the single-quoted literal style of
the 2014 Amazon dumps.
"""

import json
import random
from pathlib import Path

BRANDS = ["Sigma", "SKIN79", "SKINFOOD", "Etude House", "Laneige", "MapofBeauty", "Revlon",
          "Maybelline"]
KINDS = ["Flat Kabuki Brush", "BB Cream", "Concealer Cream", "Sleeping Pack", "Curly Hair Wig",
         "Nail Polish", "Lip Balm", "Eye Liner", "Face Mask", "Hair Serum"]
SHADES = ["Light Beige", "Natural Beige", "Honey", "Black", "Red Dark", "Rose", "30ml", "40g"]


def loose(record):
    parts = []
    for key, value in record.items():
        if isinstance(value, str):
            parts.append("'%s': '%s'" % (key, value.replace("'", "\\'")))
        else:
            parts.append("'%s': %r" % (key, value))
    return "{" + ", ".join(parts) + "}"


def main():
    rng = random.Random(20240611)
    here = Path(__file__).resolve().parent
    items = []
    for i in range(30):
        title = "%s %s %s" % (BRANDS[i % len(BRANDS)], KINDS[(i * 3) % len(KINDS)],
                              SHADES[(i * 5) % len(SHADES)])
        items.append(("B%05d" % (1000 + i * 7), title))
    # Two items share a title so the duplicate-title rate is non-zero.
    items[17] = (items[17][0], items[4][1])
    # A title with an apostrophe exercises \' escapes in the loose lines.
    items[9] = (items[9][0], "Maybelline Women's Eye Liner Black")
    untitled = "B09999"

    meta_lines = []
    for n, (asin, title) in enumerate(items):
        record = {"asin": asin, "title": title, "price": 9.99 + n}
        meta_lines.append(json.dumps(record) if n % 2 == 0 else loose(record))
    meta_lines.append(loose({"asin": untitled, "price": 1.0}))
    meta_lines.append(json.dumps({"asin": items[3][0], "title": "Duplicate record, ignored"}))

    review_lines = []
    for u in range(20):
        user = "U%03d" % u
        n = 5 + (u * 7) % 9
        t = 1_400_000_000 + u * 1000
        picks = rng.sample(range(len(items)), n)
        for j, idx in enumerate(picks):
            t += rng.choice([0, 86400, 3600])
            record = {"reviewerID": user, "asin": items[idx][0], "unixReviewTime": t,
                      "overall": 5.0}
            review_lines.append(json.dumps(record) if (u + j) % 3 else loose(record))
        if u % 5 == 0:
            review_lines.append(json.dumps(
                {"reviewerID": user, "asin": untitled, "unixReviewTime": t + 1}))
    rng.shuffle(review_lines)

    (here / "meta.json").write_text("\n".join(meta_lines) + "\n")
    (here / "reviews.json").write_text("\n".join(review_lines) + "\n")


if __name__ == "__main__":
    main()

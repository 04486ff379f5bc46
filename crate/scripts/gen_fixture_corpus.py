#!/usr/bin/env python3
"""Regenerate the bundled replay corpus under crates/core/data/fixtures.

Every value the study states explicitly (a maximum with its holder, a
stated minimum, a stated zero) is pinned. The remaining cells are synthetic:
drawn from a seeded RNG, shaped by each company's published index so the
corpus is loosely realistic, and then scaled so per-indicator totals hit the
stated averages exactly.

Usage: python3 scripts/gen_fixture_corpus.py
"""

import csv
import json
import math
import random
import shutil
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import toml as tomllib
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "crates" / "core" / "data"
FIXTURES = DATA / "fixtures"
N = 30
SEED = 20140424

rng = random.Random(SEED)

universe = tomllib.loads((DATA / "universe.toml").read_text())["company"]
catalog = tomllib.loads((DATA / "catalog.toml").read_text())["indicator"]
ids = [c["id"] for c in universe]
strength = {}
with open(DATA / "golden" / "appendix_wri.csv", encoding="utf-8") as fh:
    for row in csv.DictReader(fh):
        strength[row["company_id"]] = float(row["wri"])

values = {ind["id"]: {} for ind in catalog}
anchored = {ind["id"]: set() for ind in catalog}


def pin(indicator, company, value):
    values[indicator][company] = value
    anchored[indicator].add(company)


def fill_total(indicator, total, cap, zeros=(), power=2.0, jitter=0.35, floor=1):
    """Fill unpinned cells with integers summing to `total`, each < cap."""
    fixed = values[indicator]
    for z in zeros:
        fixed.setdefault(z, 0)
    free = [c for c in ids if c not in fixed]
    remaining = total - sum(fixed.values())
    assert remaining >= floor * len(free), (indicator, remaining)
    weights = {
        c: (strength[c] ** power) * math.exp(rng.uniform(-jitter, jitter)) for c in free
    }
    # Water-fill: cap any cell at cap-1 and redistribute the excess.
    alloc = {}
    pool = dict(weights)
    budget = remaining - floor * len(free)
    limit = cap - 1 - floor
    while pool:
        wsum = sum(pool.values())
        over = {c for c, w in pool.items() if budget * w / wsum > limit}
        if not over:
            for c, w in pool.items():
                alloc[c] = budget * w / wsum
            break
        for c in over:
            alloc[c] = limit
            budget -= limit
            del pool[c]
    ints = {c: math.floor(v) for c, v in alloc.items()}
    short = (remaining - floor * len(free)) - sum(ints.values())
    order = sorted(free, key=lambda c: (alloc[c] - ints[c], c), reverse=True)
    for c in order[:short]:
        ints[c] += 1
    for c in free:
        fixed[c] = ints[c] + floor
        assert fixed[c] < cap, (indicator, c, fixed[c])
    assert sum(fixed.values()) == total, indicator


def fill_free(indicator, lo, hi, power=1.0, jitter=0.3, zeros=()):
    """Fill unpinned cells with integers in [lo, hi] shaped by strength."""
    fixed = values[indicator]
    for z in zeros:
        fixed.setdefault(z, 0)
    for c in ids:
        if c in fixed:
            continue
        w = strength[c] ** power * math.exp(rng.uniform(-jitter, jitter))
        fixed[c] = max(lo, min(hi, round(lo + (hi - lo) * min(w, 1.0))))


# -- wiki --------------------------------------------------------------------
# One company has no Wikipedia entry (0 views, 0 languages); THY holds both maxima.
pin("wiki_page_views", "THY", 12259)
pin("wiki_page_views", "KOZA_MADENCILIK", 0)
fill_free("wiki_page_views", 40, 12258, power=2.2)
pin("wiki_language_count", "THY", 46)
pin("wiki_language_count", "KOZA_MADENCILIK", 0)
fill_free("wiki_language_count", 1, 45, power=1.6)

# -- linkedin ----------------------------------------------------------------
pin("linkedin_followers", "TURKCELL", 68114)
fill_free(
    "linkedin_followers", 150, 68113, power=2.0,
    zeros=("KOZA_ALTIN", "IHLAS_HOLDING", "KARDEMIR", "DOGAN_HOLDING"),
)

# -- complaint sites ---------------------------------------------------------
b2b = ("KOZA_MADENCILIK", "KOZA_ALTIN", "ERDEMIR", "KARDEMIR", "ENKA_INSAAT", "PETKIM")
pin("hate_marks", "GARANTI", 18964)
fill_free("hate_marks", 3, 18963, power=2.5, jitter=0.5, zeros=b2b)
pin("love_marks", "GARANTI", 822)
fill_free("love_marks", 1, 821, power=2.5, jitter=0.5, zeros=b2b)

# -- facebook ----------------------------------------------------------------
# Exactly one company has no page: flag 0 and zero likes (the stated minimum).
for c in ids:
    values["has_facebook_page"][c] = 0 if c == "KOZA_MADENCILIK" else 1
anchored["has_facebook_page"].add("KOZA_MADENCILIK")
pin("fb_likes", "TURKCELL", 2747255)
pin("fb_likes", "KOZA_MADENCILIK", 0)
fill_total("fb_likes", 273693 * N, 2747255, power=2.5, floor=500)
pin("fb_shares", "TURKCELL", 1969)
fill_total("fb_shares", 211 * N, 1969, power=2.0, floor=1)

# -- web-o-metrics -----------------------------------------------------------
pin("site_value_usd", "GARANTI", 621305)
fill_total("site_value_usd", 105724 * N, 621305, power=2.0, floor=2000)
pin("bing_backlinks", "AKBANK", 3540)
fill_total("bing_backlinks", 137 * N, 3540, power=1.5, floor=1)
pin("google_backlinks", "TURK_TELEKOM", 3313000)
fill_total("google_backlinks", 307817 * N, 3313000, power=2.5, floor=100)
pin("daily_unique_visitors", "GARANTI", 637285)
fill_total("daily_unique_visitors", 62656 * N, 637285, power=2.5, floor=100)

# Ranks: smaller is better. Turkey rank spans [24, 65836]; global minimum
# 1442 with a stated average of 570013.
pin("alexa_rank_tr", "GARANTI", 24)
pin("alexa_rank_tr", "KOZA_MADENCILIK", 65836)
used = {24, 65836}
for c in ids:
    if c in values["alexa_rank_tr"]:
        continue
    # log-linear between the extremes, inverse to strength
    t = (1.0 - strength[c]) / (1.0 - min(strength.values()))
    t = min(max(t + rng.uniform(-0.08, 0.08), 0.02), 0.98)
    v = round(math.exp(math.log(24) + t * (math.log(65836) - math.log(24))))
    while v in used:
        v += 1
    used.add(v)
    values["alexa_rank_tr"][c] = v

pin("alexa_rank_global", "GARANTI", 1442)
inv = {c: 1.0 / strength[c] for c in ids}
free = [c for c in ids if c != "GARANTI"]
budget = 570013 * N - 1442
w = {c: (inv[c] ** 2.0) * math.exp(rng.uniform(-0.3, 0.3)) for c in free}
wsum = sum(w.values())
alloc = {c: max(1443, math.floor(budget * w[c] / wsum)) for c in free}
alloc[max(free, key=lambda c: w[c])] += budget - sum(alloc.values())
for c in free:
    values["alexa_rank_global"][c] = alloc[c]
assert sum(values["alexa_rank_global"].values()) == 570013 * N
assert min(values["alexa_rank_global"].values()) == 1442

# Time on site, seconds: maximum about 8 minutes, average about 4 minutes.
pin("time_on_site", "ISBANK", 480)
fill_total("time_on_site", 240 * N, 480, power=0.6, jitter=0.25, floor=60)

# Google Trends brand score spans 19..100.
pin("google_trends", "TURKCELL", 100)
pin("google_trends", "KOZA_ALTIN", 19)
fill_free("google_trends", 20, 99, power=1.0, jitter=0.25)

# Tweets: Halkbank holds the maximum (276), average 22.
pin("tweets", "HALKBANK", 276)
fill_total("tweets", 22 * N, 276, power=2.0, floor=0)

# -- write -------------------------------------------------------------------
by_source = {}
for ind in catalog:
    by_source.setdefault(ind["source_id"], []).append(ind["id"])

if FIXTURES.exists():
    shutil.rmtree(FIXTURES)
entries = []
for source, indicator_ids in sorted(by_source.items()):
    (FIXTURES / source).mkdir(parents=True)
    for c in sorted(ids):
        payload = {i: values[i][c] for i in indicator_ids}
        rel = f"{source}/{c}.json"
        (FIXTURES / rel).write_text(json.dumps(payload, indent=2) + "\n")
        entries.append(
            {
                "source_id": source,
                "company_id": c,
                "path": rel,
                "origin": "synthetic-constrained",
                "cells": {
                    i: ("paper_anchored" if c in anchored[i] else "synthetic")
                    for i in indicator_ids
                },
            }
        )

manifest = {
    "label": "synthetic-constrained",
    "seed": SEED,
    "entries": entries,
}
(FIXTURES / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
print(f"wrote {len(entries)} fixtures")
for ind in catalog:
    col = [values[ind["id"]][c] for c in ids]
    print(f'{ind["id"]:24} min={min(col):>10} max={max(col):>10} mean={sum(col)/N:>14.3f}')

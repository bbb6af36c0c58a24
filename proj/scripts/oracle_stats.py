#!/usr/bin/env python3
"""Brute-force stats tables for a transfer fixture.

Writes table_full.csv, table_pre.csv and table_post.csv with the same columns
as `tmlg stats`, computed with plain Python sets, exact decimals and
networkx. Used to produce tests/golden/.

    python3 scripts/oracle_stats.py data/fixture tests/golden
"""

import csv
import sys
from collections import defaultdict
from datetime import datetime, timezone
from decimal import Decimal, getcontext
from pathlib import Path

import networkx as nx

getcontext().prec = 80

PERIODS = {
    "full": ("2022-04-01", "2022-06-16"),
    "pre": ("2022-04-01", "2022-05-02"),
    "post": ("2022-05-17", "2022-06-16"),
}

COLUMNS = [
    "layer", "nodes", "unique_edges", "transactions", "token_volume", "usd_volume", "active_out", "active_in",
    "sources", "sinks", "reciprocity", "avg_degree", "density", "clustering", "largest_wcc_fraction",
]


def unix(day):
    return int(datetime.strptime(day, "%Y-%m-%d").replace(tzinfo=timezone.utc).timestamp())


def fmt_decimal(d):
    text = format(d.normalize(), "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


def row(label, events, closes):
    nodes, senders, receivers = set(), set(), set()
    pairs = set()
    volume = Decimal(0)
    usd = 0.0
    for src, dst, ts, amount, ticker in events:
        nodes.update((src, dst))
        senders.add(src)
        receivers.add(dst)
        pairs.add((src, dst))
        volume += amount
        close = closes.get((ticker, ts - ts % 86400))
        if close is not None:
            usd += float(amount) * close
    plain = {p for p in pairs if p[0] != p[1]}
    n = len(nodes)
    recip = sum(1 for a, b in plain if (b, a) in plain) / len(plain) if plain else 0.0
    partners = defaultdict(set)
    for a, b in pairs:
        partners[a].add(b)
        partners[b].add(a)
    avg_degree = sum(len(s) for s in partners.values()) / n if n else 0.0
    density = len(plain) / (n * (n - 1)) if n > 1 else 0.0
    g = nx.Graph()
    g.add_nodes_from(nodes)
    g.add_edges_from(plain)
    clustering = nx.average_clustering(g) if n else 0.0
    wcc = max((len(c) for c in nx.connected_components(g)), default=0) / n if n else 0.0
    return {
        "layer": label,
        "nodes": n,
        "unique_edges": len(pairs),
        "transactions": len(events),
        "token_volume": fmt_decimal(volume),
        "usd_volume": repr(usd),
        "active_out": len(senders),
        "active_in": len(receivers),
        "sources": len(senders - receivers),
        "sinks": len(receivers - senders),
        "reciprocity": repr(recip),
        "avg_degree": repr(avg_degree),
        "density": repr(density),
        "clustering": repr(clustering),
        "largest_wcc_fraction": repr(wcc),
    }


def main(fixture, out):
    fixture, out = Path(fixture), Path(out)
    with open(fixture / "registry.csv", newline="") as f:
        registry = [(r["contract_address"].lower(), r["ticker"], int(r["decimals"])) for r in csv.DictReader(f)]
    by_contract = {c: (t, d) for c, t, d in registry}
    events = []
    with open(fixture / "transfers.csv", newline="") as f:
        for r in csv.DictReader(f):
            ticker, decimals = by_contract[r["contract_address"].lower()]
            amount = Decimal(r["value"]).scaleb(-decimals)
            events.append((r["from_address"].lower(), r["to_address"].lower(), int(r["time_stamp"]), amount, ticker))
    closes = {}
    with open(fixture / "prices.csv", newline="") as f:
        for r in csv.DictReader(f):
            closes[(r["ticker"], unix(r["date"]))] = float(r["close"])

    out.mkdir(parents=True, exist_ok=True)
    for name, (start, end) in PERIODS.items():
        lo, hi = unix(start), unix(end)
        window = [e for e in events if lo <= e[2] < hi]
        rows = [row("full", window, closes)]
        for _, ticker, _ in registry:
            rows.append(row(ticker, [e for e in window if e[4] == ticker], closes))
        with open(out / f"table_{name}.csv", "w", newline="") as f:
            w = csv.DictWriter(f, fieldnames=COLUMNS, lineterminator="\n")
            w.writeheader()
            w.writerows(rows)


if __name__ == "__main__":
    main(*sys.argv[1:3])

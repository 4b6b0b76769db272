#!/usr/bin/env python3
"""Writes the bundled mini fixture: 3 titles x 5 years that survive filtering,
plus records that the filters must drop. Rerun to regenerate; output is fixed
by the seed below."""
import json
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent
FT, RT, SD = b"\x1e", b"\x1d", b"\x1f"


def iso2709(leader, control, data):
    """control: [(tag, value)], data: [(tag, ind, [(code, value)])]"""
    fields = [(t, v.encode() + FT) for t, v in control]
    for tag, ind, subs in data:
        body = ind.encode() + b"".join(SD + c.encode() + v.encode() for c, v in subs) + FT
        fields.append((tag, body))
    directory, pos = b"", 0
    for tag, body in fields:
        directory += tag.encode() + b"%04d%05d" % (len(body), pos)
        pos += len(body)
    directory += FT
    base = 24 + len(directory)
    total = base + pos + 1
    lead = b"%05d" % total + leader[5:12].encode() + b"%05d" % base + leader[17:].encode()
    return lead + directory + b"".join(b for _, b in fields) + RT


def xml_record(leader, control, data):
    esc = lambda s: s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    out = ["  <record>", f"    <leader>{leader}</leader>"]
    out += [f'    <controlfield tag="{t}">{esc(v)}</controlfield>' for t, v in control]
    for tag, ind, subs in data:
        out.append(f'    <datafield tag="{tag}" ind1="{ind[0]}" ind2="{ind[1]}">')
        out += [f'      <subfield code="{c}">{esc(v)}</subfield>' for c, v in subs]
        out.append("    </datafield>")
    out.append("  </record>")
    return "\n".join(out)


LEADER = "00000nas a2200000 a 4500"


def f008(lang):
    return "850101d18901910xx wkr ne      0    " + lang + " d"


TITLES = [
    ("sn00000001", "ger", "Der Beobachter :", "ein deutsches Wochenblatt.",
     [("785", "00", [("t", "Die Abendpost"), ("w", "(DLC)sn00000002")])]),
    ("sn00000002", "ger", "Die Abendpost.", None,
     [("780", "00", [("t", "Der Beobachter"), ("w", "(DLC)sn00000001")])]),
    ("sn00000003", "ita", "L'Eco italiano /", None,
     [("775", "1 ", [("t", "The Italian Echo")])]),
    ("sn00000004", "eng", "The County Herald.", None, []),
]


def marc_record(lccn, lang, title_a, title_b, links):
    control = [("001", lccn), ("008", f008(lang))]
    t245 = [("a", title_a)] + ([("b", title_b)] if title_b else [])
    data = [("010", "  ", [("a", "  " + lccn + " ")]), ("245", "00", t245)]
    if lang == "ger":
        data.append(("041", "0 ", [("a", "gereng")]))
    data.append(("546", "  ", [("a", {"ger": "In German.", "ita": "In Italian.", "eng": "In English."}[lang])]))
    data += links
    return control, data


def main():
    recs = [marc_record(*t) for t in TITLES]
    with open(HERE / "titles.mrc", "wb") as f:
        for control, data in recs[:2]:
            f.write(iso2709(LEADER, control, data))
    with open(HERE / "titles.xml", "w", encoding="utf-8") as f:
        f.write('<?xml version="1.0" encoding="UTF-8"?>\n<collection xmlns="http://www.loc.gov/MARC21/slim">\n')
        f.write("\n".join(xml_record(LEADER, c, d) for c, d in recs[2:]))
        f.write("\n</collection>\n")

    with open(HERE / "editors.csv", "w", encoding="utf-8") as f:
        f.write("lccn,editor_name,group,language\n")
        f.write("sn00000001,Karl Weber,German,ger\n")
        f.write("sn00000001,Anna Roth,German,ger\n")
        f.write("sn00000002,Karl Weber,German,ger\n")
        f.write("sn00000003,\"Rossi, Giovanni\",Italian,ita\n")
        f.write("sn00000003,\"Rossi, Giovanni\",Italian,ita\n")  # duplicate row

    rng = random.Random(20240607)

    def jitter(b, s=0.02):
        x1, y1, x2, y2 = (min(1.0, max(0.0, v + rng.uniform(-s, s))) for v in b)
        return [round(min(x1, x2), 4), round(min(y1, y2), 4), round(max(x1, x2), 4), round(max(y1, y2), 4)]

    archetypes = {
        "sn00000001": [("advertisement", (0.05, 0.55, 0.48, 0.95)), ("advertisement", (0.52, 0.55, 0.95, 0.95)),
                       ("headline", (0.05, 0.02, 0.95, 0.08))],
        "sn00000002": [("headline", (0.03, 0.02, 0.97, 0.18)), ("headline", (0.03, 0.20, 0.48, 0.26)),
                       ("advertisement", (0.70, 0.85, 0.95, 0.97))],
        "sn00000003": [("illustration", (0.30, 0.30, 0.70, 0.65)), ("photograph", (0.38, 0.36, 0.62, 0.58)),
                       ("headline", (0.05, 0.02, 0.95, 0.07))],
        "sn00000004": [("map", (0.1, 0.1, 0.9, 0.9))],
    }

    lines = []

    def page(lccn, date, seq, boxes):
        lines.append(json.dumps({"lccn": lccn, "issue_date": date, "page_seq": seq, "boxes": boxes}))

    for lccn, boxes in archetypes.items():
        for year in range(1895, 1900):
            for issue in range(5):
                date = f"{year}-{3 + 2 * issue:02d}-{1 + 3 * issue:02d}"
                bs = [{"class": c, "score": round(rng.uniform(0.6, 0.99), 3), "box": jitter(b)} for c, b in boxes]
                bs.append({"class": "comic", "score": 0.2, "box": jitter((0.4, 0.4, 0.6, 0.6))})  # below threshold
                page(lccn, date, 1, bs)
                page(lccn, date, 2, [{"class": "map", "score": 0.9, "box": [0.0, 0.0, 1.0, 1.0]}])  # not a front page
        # out of the year range, and a title-year below min_pages
        page(lccn, "1912-01-02", 1, [{"class": "map", "score": 0.9, "box": [0.1, 0.1, 0.5, 0.5]}])
        page(lccn, "1900-01-02", 1, [{"class": "map", "score": 0.9, "box": [0.1, 0.1, 0.5, 0.5]}])
    (HERE / "predictions.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")

    (HERE / "mini.conf").write_text(
        "# mini fixture run; paths are relative to the repository root\n"
        "marc = data/mini/titles.mrc,data/mini/titles.xml\n"
        "editors = data/mini/editors.csv\n"
        "predictions = data/mini/predictions.jsonl\n"
        "perplexity = 4\n"
        "k = 3\n", encoding="utf-8")


if __name__ == "__main__":
    main()

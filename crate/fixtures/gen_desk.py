"""Regenerates fixtures/desk: a 50-paper two-type corpus.

Run from the repository root: python3 fixtures/gen_desk.py
Output is deterministic; the checked-in files are what the tests read.
"""

import os
import random
import shutil

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "desk")

LAB = """experiment laboratory subjects participants payoff reciprocity punishment cooperation
dictator ultimatum trust fairness incentive endowment questionnaire students altruism contribution
bargaining elicitation monetary earnings recruited instructions session anonymity conditional norms
beliefs inequality treatment deception framing envelope volunteers lottery""".split()

ML = """algorithm gradient kernel classifier training convergence regularization neural optimization
features benchmark accuracy boosting stochastic loss embedding sparse matrix complexity sampling
bayesian ensemble hyperparameter dataset generalization perceptron margin backpropagation
tensor pruning quantization minibatch iteration overfitting""".split()

SHARED = """study results evidence propose analysis effect approach framework measure
observed compare significant outcome""".split()

LAB_AUTHORS = [
    ("Brenner", "Aldous"), ("Vestergaard", "Carla"), ("Olanov", "Dmitri"), ("Sar{\\i}kaya", "Elif"),
    ("Roskam", "Fenna"), ("Quist", "Halvard"), ("Pelletier", "Ingrid"), ("Wrede", "Jonas"),
    ("Orlowska", "Kasia"), ("Abt", "Lorenz"), ("Dobo{\\c{s}}", "Mirela"), ("Hale", "Odile"),
]
ML_AUTHORS = [
    ("Ferhat", "Nadir"), ("Lindqvist", "Oona"), ("Verhulst", "Piet"), ("Marsault", "Quentin"),
    ("Tandon", "Rhea"), ("Kj{\\ae}r", "S{\\o}ren"), ("Wilk", "Tomasz"), ("Haapala", "Ulla"),
    ("K{\\\"o}nig", "Vera"), ("Zhao", "Wen"), ("Olmedo", "Xavier"), ("Haddad", "Yara"),
]
BRIDGE = [("Albrecht", "Zeno"), ("Gi{\\`e}", "Mauro")]

VENUES_LAB = ["Journal of Experimental Choice", "Behavioral Lab Letters", "Games and Conduct"]
VENUES_ML = ["Proceedings of Learning Systems", "Journal of Algorithmic Learning", "Machine Methods Review"]

N_PER_TYPE = 25
CROSSOVERS = 3


def plain(surname):
    return (surname.replace("{\\i}", "i").replace("{\\c{s}}", "s").replace("{\\ae}", "ae")
            .replace("{\\\"o}", "o").replace("{\\`e}", "e").replace("{\\o}", "o"))


def words(rng, n, mix):
    pools = [(LAB, mix[0]), (ML, mix[1]), (SHARED, mix[2])]
    out = []
    for _ in range(n):
        r = rng.random()
        acc = 0.0
        for pool, w in pools:
            acc += w
            if r < acc:
                out.append(rng.choice(pool))
                break
        else:
            out.append(rng.choice(SHARED))
    return out


def sentence_text(rng, n, mix):
    ws = words(rng, n, mix)
    sentences = []
    i = 0
    while i < len(ws):
        k = rng.randint(6, 11)
        chunk = ws[i:i + k]
        sentences.append("We " + " ".join(chunk) + ".")
        i += k
    return " ".join(sentences)


def main():
    rng = random.Random(20240611)
    if os.path.isdir(OUT):
        shutil.rmtree(OUT)
    os.makedirs(os.path.join(OUT, "text"))
    os.makedirs(os.path.join(OUT, "refs"))

    papers = []
    titles = set()
    for kind in ("Labbehavior", "MLalgo"):
        for i in range(N_PER_TYPE):
            crossover = kind == "Labbehavior" and i >= N_PER_TYPE - CROSSOVERS
            if kind == "MLalgo":
                mix, pool, authors, venues = (0.0, 0.75, 0.25), ML, ML_AUTHORS, VENUES_ML
            elif crossover:
                mix, pool, authors, venues = (0.15, 0.65, 0.20), ML, LAB_AUTHORS, VENUES_LAB
            else:
                mix, pool, authors, venues = (0.75, 0.0, 0.25), LAB, LAB_AUTHORS, VENUES_LAB
            while True:
                tw = rng.sample(pool, 3)
                title = f"{tw[0].capitalize()} and {tw[1].capitalize()} in {tw[2].capitalize()} Studies"
                if crossover:
                    title = f"{tw[0].capitalize()} and {tw[1].capitalize()} for Laboratory Data"
                if title not in titles:
                    titles.add(title)
                    break
            team = rng.sample(authors, rng.randint(1, 3))
            if rng.random() < 0.15:
                team.append(rng.choice(BRIDGE))
            year = 2004 + (i * 12) // N_PER_TYPE + (1 if kind == "MLalgo" else 0)
            papers.append({
                "kind": kind,
                "crossover": crossover,
                "title": title,
                "authors": team,
                "year": year,
                "venue": rng.choice(venues),
                "abstract": sentence_text(rng, rng.randint(45, 70), mix),
                "body": "\n\n".join(sentence_text(rng, rng.randint(80, 120), mix) for _ in range(2)),
            })

    keys = set()
    for p in papers:
        base = f"{plain(p['authors'][0][0]).lower()}{p['year']}{p['title'].split()[0].lower()}"
        key = base
        suffix = "b"
        while key in keys:
            key = base + suffix
            suffix = chr(ord(suffix) + 1)
        keys.add(key)
        p["key"] = key

    lab = [p for p in papers if p["kind"] == "Labbehavior"]
    ml = [p for p in papers if p["kind"] == "MLalgo"]

    # Citations go to strictly older papers: mostly within a type, and
    # learning papers reuse data from laboratory papers.
    for p in papers:
        older_same = [q for q in (lab if p["kind"] == "Labbehavior" else ml) if q["year"] < p["year"]]
        older_lab = [q for q in lab if q["year"] < p["year"] and not q["crossover"]]
        cites = set()
        if older_same:
            for q in rng.sample(older_same, min(len(older_same), rng.randint(1, 3))):
                cites.add(q["key"])
        if p["kind"] == "MLalgo" and older_lab and rng.random() < 0.5:
            cites.add(rng.choice(older_lab)["key"])
        p["cites"] = sorted(cites)

    # Planted edges the tests look for.
    ml[-1]["cites"] = sorted(set(ml[-1]["cites"]) | {lab[0]["key"]})
    lab[10]["cites"] = sorted(set(lab[10]["cites"]) | {lab[1]["key"]})

    by_key = {p["key"]: p for p in papers}

    def author_field(team, style):
        if style == 0:
            return " and ".join(f"{s}, {g}" for s, g in team)
        return " and ".join(f"{g} {s}" for s, g in team)

    def ref_line(q, style):
        surname, given = q["authors"][0]
        names = f"{plain(surname)}, {given[0] if given[0] != '{' else 'S'}."
        if len(q["authors"]) > 1:
            s2, g2 = q["authors"][1]
            names += f" and {plain(s2)}, {g2[0] if g2[0] != '{' else 'S'}."
        if style == 0:
            return f"{names} ({q['year']}). {q['title']}. {q['venue']}."
        return f"{names} {q['year']}. \"{q['title'].lower()}.\" {q['venue']}."

    entries = []
    for n, p in enumerate(papers):
        fields = [
            ("author", author_field(p["authors"], n % 2)),
            ("title", p["title"]),
            ("journal", p["venue"]),
            ("year", str(p["year"])),
        ]
        if n % 7 == 3:
            fields.append(("abstract", p["abstract"]))
        body = ",\n".join(f"  {k} = {{{v}}}" for k, v in fields)
        entries.append(f"@article{{{p['key']},\n{body}\n}}\n")

        with open(os.path.join(OUT, "text", p["key"] + ".txt"), "w") as f:
            f.write(p["abstract"] + "\n\n" + p["body"] + "\n")
        refs = [ref_line(by_key[c], i % 2) for i, c in enumerate(p["cites"])]
        refs.append(f"Unknown, A. ({p['year'] - 3}). An unpublished working paper on {rng.choice(SHARED)}. Mimeo.")
        with open(os.path.join(OUT, "refs", p["key"] + ".txt"), "w") as f:
            f.write("\n".join(refs) + "\n")

    # Two duplicate records under other keys, with small formatting differences.
    for p, key in ((lab[2], "dup-lab"), (ml[6], "dup-ml")):
        entries.append(
            f"@inproceedings{{{key},\n  author = {{{author_field(p['authors'], 1)}}},\n"
            f"  title = {{{p['title'].upper()}.}},\n  booktitle = {{{p['venue']}}},\n"
            f"  year = {{{p['year']}}},\n  doi = {{10.5555/{key}}}\n}}\n"
        )

    with open(os.path.join(OUT, "metadata.bib"), "w") as f:
        f.write("% Desk corpus: two planted types.\n\n")
        f.write("@comment{generated by fixtures/gen_desk.py}\n\n")
        f.write("\n".join(entries))

    descriptions = {
        "Labbehavior": "Laboratory experiments observing incentivized human behaviour",
        "MLalgo": "Machine learning algorithms evaluated on data",
    }
    with open(os.path.join(OUT, "seeds.tsv"), "w") as f:
        f.write("type_id\tdescription\tpaper_id\n")
        for group in (lab, ml):
            for p in group[:5]:
                f.write(f"{p['kind']}\t{descriptions[p['kind']]}\t{p['key']}\n")

    with open(os.path.join(OUT, "labels.tsv"), "w") as f:
        f.write("paper_id\ttype_id\n")
        for p in sorted(papers, key=lambda p: p["key"]):
            f.write(f"{p['key']}\t{p['kind']}\n")

    with open(os.path.join(OUT, "corrections.tsv"), "w") as f:
        f.write("paper_id\ttype_id\n")
        for p in sorted((p for p in papers if p["crossover"]), key=lambda p: p["key"]):
            f.write(f"{p['key']}\t{p['kind']}\n")

    with open(os.path.join(OUT, "planted_edges.tsv"), "w") as f:
        f.write("from\tto\tcitation_type\n")
        f.write(f"{ml[-1]['key']}\t{lab[0]['key']}\tdata-reuse\n")
        f.write(f"{lab[10]['key']}\t{lab[1]['key']}\tinsight\n")

    with open(os.path.join(OUT, "rules.tsv"), "w") as f:
        f.write("# priority\tciting\tcited\tresult\trule_id\n")
        f.write("evaluation-kind\tMLalgo\n")
        f.write("100\t@eval\t!=\tdata-reuse\teval-cites-other\n")
        f.write("50\t*\t=\tinsight\tsame-type\n")
        f.write("0\t*\t*\tunknown\tdefault\n")


if __name__ == "__main__":
    main()

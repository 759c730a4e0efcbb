#!/usr/bin/env python3
"""Regenerates fixtures/catalog50: a 50-software catalog with a small CDX
archive and captured landing pages.

The layout follows the fixture backend convention:
    software.jsonl, publications.jsonl
    archive/captures.cdx
    archive/bodies/<urlkey with / -> _>/<timestamp>.html

Run from the repository root:  python3 fixtures/generate.py
"""
import json
import os
import random
import re
import shutil
from urllib.parse import urlsplit

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "catalog50")
rng = random.Random(20161005)

B32 = "ABCDEFGHIJKLMNOPQRSTUVWXYZ234567"


def digest():
    return "".join(rng.choice(B32) for _ in range(32))


def urlkey(url):
    # Enough of the canonical form for the URLs used here: lowercase host,
    # strip www., reverse labels, drop trailing slash except at root.
    parts = urlsplit(url)
    host = parts.hostname.lower()
    while host.startswith("www.") and "." in host[4:]:
        host = host[4:]
    key = ",".join(reversed(host.split("."))) + ")"
    path = parts.path.rstrip("/") or "/"
    return key + path


NAMES = [
    "SolverX", "Singular", "Quadrix", "Meshforge", "Polyhedra", "Lattix", "Integrand", "Fermata",
    "Kryolov", "Tensorium", "Gradiant", "Symbolica", "Numerion", "Varifold", "Homotopix", "Curvelet",
    "Spectra", "Primal", "Ellipsoid", "Simplexa", "Quaternio", "Monodromy", "Fourierix", "Stokeslet",
    "Eigenvue", "Cohomix", "Tropica", "Modulus", "Wavelab", "Bifurc", "Chebyx", "Dunfordia",
    "Galoisia", "Hilberto", "Jacobix", "Kummer", "Laplacia", "Markovia", "Noetheria", "Orbifold",
    "Padeon", "Quadtree", "Riemannia", "Sobolev", "Toeplix", "Ulamix", "Voronix", "Weylon",
    "Yamabe", "Zariskon",
]
assert len(NAMES) == 50

# (year, total, archived, past_archived); every past_archived one changed except one in 2012.
PLAN = [
    (1996, 2, 0, 0), (1999, 3, 1, 0), (2001, 3, 1, 1), (2003, 4, 1, 0), (2005, 4, 2, 1),
    (2007, 5, 2, 1), (2009, 5, 2, 1), (2010, 5, 2, 2), (2011, 5, 2, 2), (2012, 6, 3, 2),
    (2013, 8, 4, 2),
]

KEYWORDS = {
    "documentation": ["documentation", "manual", "user guide", "tutorial", "docs", "faq", "handbook", "reference"],
    "publications": ["publications", "papers", "bibliography", "cite", "references"],
    "downloads": ["download", "install", "release"],
    "open_source": ["source code", "git", "license"],
    "updates_news": ["news", "changelog", "change log", "release notes", "what's new", "history"],
}
HREFS = {
    "documentation": [],
    "publications": ["doi.org", "arxiv.org"],
    "downloads": [".zip", ".tar.gz", ".tgz", ".tar.bz2", ".exe", ".dmg", ".jar"],
    "open_source": ["github.com", "gitlab.com", "sourceforge.net", "bitbucket.org"],
    "updates_news": [],
}
CATEGORIES = list(KEYWORDS)


def starts_word(text, kw):
    return any(m.start() == 0 or not text[m.start() - 1].isalnum() for m in re.finditer(re.escape(kw), text))


def check_profile(links, headings):
    out = {}
    for cat in CATEGORIES:
        hit = False
        for href, text in links:
            t, h = text.lower(), href.lower()
            path = re.split(r"[?#]", h)[0]
            if any(starts_word(t, k) for k in KEYWORDS[cat]):
                hit = True
            if any(path.endswith(p) if p.startswith(".") else p in h for p in HREFS[cat]):
                hit = True
        if any(starts_word(x.lower(), k) for x in headings for k in KEYWORDS[cat]):
            hit = True
        out[cat] = hit
    return out


CATEGORY_LINKS = {
    "documentation": [("doc/", "Documentation"), ("manual.pdf", "User Manual"), ("tutorial.html", "Tutorial"),
                      ("faq.html", "FAQ"), (None, "Documentation")],
    "publications": [("pubs.html", "Publications"), ("papers/", "Papers"), ("cite.html", "How to cite"),
                     ("https://doi.org/10.1000/sw.{n}", "Journal article"), ("bib.html", "Bibliography")],
    "downloads": [("download.html", "Download"), ("files/{slug}-2.1.tar.gz", "Version 2.1"),
                  ("setup.exe", "Windows installer"), ("dist/{slug}.zip", "Get it")],
    "open_source": [("src/", "Source code"), ("https://github.com/mathsw/{slug}", "GitHub"),
                    ("https://gitlab.com/mathsw/{slug}", "Repository"), ("LICENSE.txt", "License"),
                    ("https://sourceforge.net/projects/{slug}/", "Project page")],
    "updates_news": [("news.html", "News"), ("CHANGES.txt", "Changelog"), ("new.html", "What's new")],
}
NEUTRAL = [("index.html", "Home"), ("contact.html", "Contact"), ("people.html", "Team"),
           ("examples.html", "Examples"), ("partners.html", "Digital library partners"),
           ("list.html", "Excited? Join the mailing list"), ("imprint.html", "Imprint")]


def render_page(name, slug, flags, n):
    links, headings = [], [f"{name} homepage"]
    for href, text in rng.sample(NEUTRAL, 3):
        links.append((href, text))
    for cat in CATEGORIES:
        if not flags[cat]:
            continue
        options = CATEGORY_LINKS[cat]
        if name == "SolverX" and cat == "documentation":
            pick = ("manual.pdf", "Manual")
        else:
            pick = options[(n + CATEGORIES.index(cat)) % len(options)]
        href, text = pick
        if href is None:
            headings.append(text)
        else:
            links.append((href.format(slug=slug, n=n), text))
    rng.shuffle(links)
    parts = ["<!DOCTYPE html>", "<html><head><title>%s</title></head><body>" % name]
    parts.append("<h1>%s</h1>" % headings[0])
    parts.append("<p>%s is mathematical software for research use. Downloads and documentation are "
                 "described below where available.</p>" % name)
    parts.append("<ul>")
    for href, text in links:
        parts.append('  <li><a href="%s">%s</a></li>' % (href, text))
    parts.append("</ul>")
    for h in headings[1:]:
        parts.append("<h2>%s</h2><p>See the pages linked above.</p>" % h)
    parts.append("</body></html>")
    return "\n".join(parts) + "\n", links, headings


def main():
    if os.path.isdir(OUT):
        shutil.rmtree(OUT)
    os.makedirs(os.path.join(OUT, "archive", "bodies"))

    # Assign (year, status, changed) to softwares.
    slots = []
    for year, total, archived, past in PLAN:
        for i in range(total):
            if i < past:
                slots.append((year, "past_archived"))
            elif i < archived:
                slots.append((year, "archived"))
            else:
                slots.append((year, "not_archived"))
    order = list(range(50))
    rng.shuffle(order)
    # SolverX (index 0) must be a 2013 past_archived software.
    solverx_slot = slots.index((2013, "past_archived"))
    order.remove(solverx_slot)
    order.insert(0, solverx_slot)
    assigned = [slots[k] for k in order]

    softwares, publications, cdx, bodies = [], [], [], {}
    pub_n = 0
    archived_ids = []
    unchanged_done = False
    specials = {}

    for idx, name in enumerate(NAMES):
        sid = "sw%03d" % (idx + 1)
        slug = name.lower()
        year, status = assigned[idx]
        url = "http://www.%s.example.org/" % slug
        if idx % 7 == 3:
            url = "https://%s.example.org/" % slug
        urls = [url]
        if idx % 11 == 5:
            url = "http://www.math.example.edu/~group/%s/index.html" % slug
            urls = [url]
        aliases = ["%s2" % name] if idx % 5 == 0 else []
        captures = []  # (url, ts, status, digest, mimetype)

        def ts(y, mmdd="0615", hms="120000"):
            return "%04d%s%s" % (y, mmdd, hms)

        if status == "past_archived":
            changed = True
            if year == 2012 and not unchanged_done:
                changed = False
                unchanged_done = True
            if name == "SolverX":
                captures = [(url, "20130214120000", "200", "AAAAQX3JM5K7", "text/html"),
                            (url, "20150601000000", "200", "BBBB2222CCCC", "text/html")]
            elif year == 2013:
                # last second of the year still counts
                captures = [(url, ts(2011), "200", digest(), "text/html"),
                            (url, "20131231235959", "200", digest(), "text/html"),
                            (url, "20140101000000", "200", digest(), "text/html")]
                specials["year_boundary"] = sid
            elif year == 2010 and "multi_url" not in specials:
                old = "http://www.uni-example.example.edu/~numerics/%s/" % slug
                new = "https://%s.example.net/" % slug
                urls = [new, old]
                d_old = digest()
                captures = [(old, ts(2009, "0101"), "200", digest(), "text/html"),
                            (old, ts(2010, "0315"), "200", d_old, "text/html"),
                            (old, ts(2010, "0901"), "-", d_old, "warc/revisit"),
                            (old, ts(2011, "0101"), "200", digest(), "text/html"),
                            (new, ts(2016, "0202"), "200", digest(), "text/html")]
                specials["multi_url"] = sid
            elif year == 2009:
                a, b, c = digest(), digest(), digest()
                captures = [(url, ts(2009, "0301"), "200", a, "text/html"),
                            (url, ts(2009, "1101"), "200", b, "text/html"),
                            (url, ts(2010, "0101"), "-", b, "warc/revisit"),
                            (url, ts(2012, "0101"), "200", c, "text/html")]
                specials["skip_same_digest"] = sid
            elif not changed:
                z = digest()
                captures = [(url, ts(2012, "0505"), "200", z, "text/html"),
                            (url, ts(2014, "0505"), "-", z, "warc/revisit"),
                            (url, ts(2016, "0505"), "200", z, "text/html")]
                specials["unchanged"] = sid
            else:
                d0 = digest()
                captures = [(url, ts(year, "0420"), "200", d0, "text/html"),
                            (url, ts(year + 1, "0420"), "-", d0, "warc/revisit"),
                            (url, ts(year + 3, "0420"), "200", digest(), "text/html")]
                if idx % 2:
                    captures.append((url, ts(year, "0110"), "302", digest(), "text/html"))
        elif status == "archived":
            if year == 2013 and "after_boundary" not in specials:
                captures = [(url, "20140101000000", "200", digest(), "text/html"),
                            (url, ts(2015), "200", digest(), "text/html")]
                specials["after_boundary"] = sid
            elif year == 2012 and "status_filtered" not in specials:
                # the in-year capture is a 404, so only the later one counts
                captures = [(url, ts(2012), "404", digest(), "text/html"),
                            (url, ts(2014), "200", digest(), "text/html")]
                specials["status_filtered"] = sid
            else:
                later = min(year + 2 + idx % 4, 2016)
                captures = [(url, ts(later, "0808"), "200", digest(), "text/html"),
                            (url, ts(later + 1, "0808"), "200", digest(), "text/html")]
        else:
            if year == 2009 and "only_404" not in specials:
                captures = [(url, ts(2011, "0707"), "404", digest(), "text/html")]
                specials["only_404"] = sid
            elif year == 2003 and "only_redirect" not in specials:
                captures = [(url, ts(2004, "0707"), "301", digest(), "text/html")]
                specials["only_redirect"] = sid
            elif year == 1999 and "other_path" not in specials:
                other = url.rstrip("/") + "/about.html"
                captures = [(other, ts(2005), "200", digest(), "text/html")]
                specials["other_path"] = sid
            elif year == 1996 and "never" not in specials:
                specials["never"] = sid

        for (curl, t, st, dg, mt) in captures:
            length = "-" if st == "-" else str(1200 + (int(t[:8]) % 9000))
            cdx.append((urlkey(curl), t, curl, mt, st, dg, length))

        # publications: top one first
        n_pubs = 3 if idx < 20 else 2
        pids = []
        top_cit = 20 + (idx * 7) % 60
        for k in range(n_pubs):
            pub_n += 1
            pid = "pub%03d" % pub_n
            pids.append(pid)
            if k == 0:
                pyear, cit = year, top_cit
            elif k == 1 and idx % 9 == 2:
                pyear, cit = min(year + 3, 2015), top_cit  # tie: earlier year wins
            else:
                pyear, cit = max(1990, year - 1 - k) if k % 2 else min(2015, year + k), top_cit - 5 - k
            publications.append(make_publication(pid, pyear, cit, name, k, idx))
        if name == "SolverX":
            publications[-n_pubs]["citations"] = 42
        softwares.append({"id": sid, "name": name, "aliases": aliases, "urls": urls, "publication_ids": pids})
        if status != "not_archived":
            archived_ids.append((sid, name, slug, captures, status, year))

    # content categories over the archived (profiled) softwares
    targets = {"documentation": 12, "publications": 10, "downloads": 9, "open_source": 6, "updates_news": 2}
    flags_by = {sid: {c: False for c in CATEGORIES} for sid, *_ in archived_ids}
    for cat, count in targets.items():
        ids = [sid for sid, *_ in archived_ids]
        rng.shuffle(ids)
        if cat == "documentation":
            ids.remove("sw001")
            ids.insert(0, "sw001")
        for sid in ids[:count]:
            flags_by[sid][cat] = True

    for n, (sid, name, slug, captures, status, year) in enumerate(archived_ids):
        ok = [c for c in captures if c[2] in ("200", "-")]
        ok.sort(key=lambda c: (c[1], c[3]))
        if status == "past_archived":
            witness = [c for c in ok if c[1][:4] == str(year)][-1]
        else:
            witness = ok[-1]
        html, links, headings = render_page(name, slug, flags_by[sid], n)
        base = witness[0]
        resolved = [(absolute(base, h), t) for h, t in links]
        assert check_profile(resolved, headings) == flags_by[sid], (sid, flags_by[sid])
        path = os.path.join(OUT, "archive", "bodies", urlkey(witness[0]).replace("/", "_"), witness[1] + ".html")
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "w") as f:
            f.write(html)

    # unrelated archive noise
    for k in range(6):
        u = "http://www.unrelated%d.example.com/" % k
        cdx.append((urlkey(u), "20%02d0101000000" % (5 + k), u, "text/html", "200", digest(), "999"))

    cdx.sort()
    with open(os.path.join(OUT, "archive", "captures.cdx"), "w") as f:
        for line in cdx:
            f.write(" ".join(line) + "\n")
    with open(os.path.join(OUT, "software.jsonl"), "w") as f:
        for s in softwares:
            f.write(json.dumps(s, ensure_ascii=False) + "\n")
    with open(os.path.join(OUT, "publications.jsonl"), "w") as f:
        for p in publications:
            f.write(json.dumps(p, ensure_ascii=False) + "\n")
    with open(os.path.join(OUT, "config.toml"), "w") as f:
        f.write('software = "software.jsonl"\npublications = "publications.jsonl"\n'
                'fixture = "archive"\nout = "out"\nworkers = 4\n')
    print("softwares", len(softwares), "publications", len(publications), "captures", len(cdx))
    print("specials", json.dumps(specials, indent=1))


def absolute(base, href):
    from urllib.parse import urljoin
    return urljoin(base, href)


TITLES = [
    "The {name} software for polynomial computations",
    "Solving large sparse problems with the {name} solver",
    "{name}: a package for computational geometry",
    "Fast algorithms in {name} for structured matrices",
    "A library approach: {name} and its applications",
    "On the convergence of iterative methods",
]
ABSTRACTS = [
    "We describe {name}, a program for exact computation, and report on benchmarks.",
    "Numerical experiments were carried out with the {name} system on several test sets.",
    "This paper studies stability estimates for elliptic problems.",
    "Our implementation builds on {name} and a custom code generator.",
    "",
]


def make_publication(pid, year, citations, name, k, idx):
    title = TITLES[(idx + k) % len(TITLES)].format(name=name)
    abstract = ABSTRACTS[(idx * 3 + k) % len(ABSTRACTS)].format(name=name)
    if name == "Singular" and k == 1:
        abstract = "We bound the smallest singular value decomposition error for random matrices."
    refs = []
    if (idx + k) % 3 == 0:
        refs.append("A. Author, B. Author. %s: a library for computer algebra. J. Symb. Comput. %d." % (name, year - 1))
    if (idx + k) % 4 == 1:
        refs.append("C. Writer. Lectures on numerical analysis. Springer, %d." % (year - 5))
    return {"id": pid, "title": title, "abstract": abstract, "references": refs, "year": year, "citations": citations}


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Writes the replay cassettes in this directory.

The responses are hand-built in the shape of the MediaWiki action API
(formatversion=2) and the Wikimedia per-article pageview API. Run from any
directory; output goes next to this script.
"""

import json
import pathlib
from urllib.parse import quote

HERE = pathlib.Path(__file__).resolve().parent
WIKI = "https://{lang}.wikipedia.org/w/api.php"
VIEWS = ("https://wikimedia.org/api/rest_v1/metrics/pageviews/per-article/{lang}.wikipedia/all-access/user/"
         "{title}/monthly/{start}/{end}")
START, END = "20130501", "20140630"
MONTHS = [f"{y:04}{m:02}" for y, m in [(2013, m) for m in range(5, 13)] + [(2014, m) for m in range(1, 7)]]
HEADERS = {"content-type": "application/json; charset=utf-8"}


def enc(text):
    return quote(text, safe="-_.~")


def wiki_url(lang, params):
    return WIKI.format(lang=lang) + "?" + "&".join(f"{enc(k)}={enc(v)}" for k, v in params)


def info_url(lang, title):
    return wiki_url(lang, [("action", "query"), ("format", "json"), ("formatversion", "2"), ("redirects", "1"),
                           ("titles", title)])


def links_url(lang, title, cont=()):
    params = [("action", "query"), ("format", "json"), ("formatversion", "2"), ("generator", "links"),
              ("titles", title), ("gplnamespace", "0"), ("gpllimit", "max"), ("prop", "pageprops"),
              ("ppprop", "wikibase_item"), ("redirects", "1")]
    return wiki_url(lang, params + list(cont))


def views_url(lang, title):
    return VIEWS.format(lang=lang, title=enc(title.replace(" ", "_")), start=START, end=END)


def write(directory, name, url, status, body):
    cassette = {"request": {"url": url}, "status": status, "headers": HEADERS,
                "body": body if isinstance(body, str) else json.dumps(body, ensure_ascii=False, sort_keys=True)}
    (directory / f"{name}.json").write_text(json.dumps(cassette, indent=2, ensure_ascii=False) + "\n",
                                            encoding="utf-8")


def page(title, qid=None, ns=0, **extra):
    p = {"ns": ns, "title": title, **extra}
    if qid:
        p["pageprops"] = {"wikibase_item": qid}
    return p


def info_body(title, resolved=None, missing=False):
    q = {"pages": [page(resolved or title, missing=True) if missing else {"ns": 0, "pageid": 1000, "title": resolved or title}]}
    if resolved:
        q["redirects"] = [{"from": title, "to": resolved}]
    return {"batchcomplete": True, "query": q}


def views_body(lang, title, counts):
    items = [{"access": "all-access", "agent": "user", "article": title.replace(" ", "_"), "granularity": "monthly",
              "project": f"{lang}.wikipedia", "timestamp": month + "0100", "views": n}
             for month, n in counts.items()]
    return {"items": items}


def main():
    d = HERE
    for old in d.glob("*.json"):
        old.unlink()

    # fr / french: every link kind in one response.
    write(d, "fr_cuisine_info", info_url("fr", "Cuisine française"), 200, info_body("Cuisine française"))
    fr_links = [page("Vin", "Q282"), page("Fromage", "Q10943"), page("Fromages", "Q10943"), page("Pain", "Q7802"),
                page("Beurre", "Q34172"), page("Croissant", "Q207832"), page("Foie gras", "Q182940"),
                page("Baguette", "Q193359"), page("Pâtisserie"), page("Plat imaginaire", missing=True),
                page("Catégorie:Cuisine", "Q1", ns=14)]
    write(d, "fr_cuisine_links", links_url("fr", "Cuisine française"), 200,
          {"batchcomplete": True, "query": {"pages": fr_links}})
    expected = sorted({"Q282", "Q10943", "Q7802", "Q34172", "Q207832", "Q182940", "Q193359", "fr:Pâtisserie"})
    (d / "fr_cuisine_links.expected.json").write_text(
        json.dumps({"language": "fr", "cuisine": "french", "concepts": expected}, indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8")
    fr_views = {m: 5000 + 137 * i for i, m in enumerate(MONTHS)}
    write(d, "fr_cuisine_views", views_url("fr", "Cuisine française"), 200, views_body("fr", "Cuisine française", fr_views))
    (d / "fr_cuisine_views.expected.json").write_text(
        json.dumps({"language": "fr", "cuisine": "french",
                    "records": [[f"{m[:4]}-{m[4:]}", n] for m, n in fr_views.items()]}, indent=2) + "\n",
        encoding="utf-8")

    # fr / italian
    write(d, "fr_italian_info", info_url("fr", "Cuisine italienne"), 200, info_body("Cuisine italienne"))
    write(d, "fr_italian_links", links_url("fr", "Cuisine italienne"), 200,
          {"batchcomplete": True, "query": {"pages": [page("Vin", "Q282"), page("Fromage", "Q10943"),
                                                      page("Pâtes alimentaires", "Q178"), page("Pizza", "Q177"),
                                                      page("Huile d'olive", "Q93165"), page("Tomate", "Q23501")]}})
    write(d, "fr_italian_views", views_url("fr", "Cuisine italienne"), 200,
          views_body("fr", "Cuisine italienne", {m: 3100 + 41 * i for i, m in enumerate(MONTHS)}))

    # fr / german: the article does not exist.
    write(d, "fr_german_info", info_url("fr", "Cuisine germanique"), 200, info_body("Cuisine germanique", missing=True))

    # de / german: no view data at all.
    write(d, "de_german_info", info_url("de", "Deutsche Küche"), 200, info_body("Deutsche Küche"))
    write(d, "de_german_links", links_url("de", "Deutsche Küche"), 200,
          {"batchcomplete": True, "query": {"pages": [page("Bier", "Q44"), page("Wurst", "Q131419"),
                                                      page("Brot", "Q7802"), page("Kartoffel", "Q10998"),
                                                      page("Käse", "Q10943"), page("Sauerkraut", "Q154210")]}})
    write(d, "de_german_views", views_url("de", "Deutsche Küche"), 404,
          {"type": "https://mediawiki.org/wiki/HyperSwitch/errors/not_found", "title": "Not found."})

    # de / french
    write(d, "de_french_info", info_url("de", "Französische Küche"), 200, info_body("Französische Küche"))
    write(d, "de_french_links", links_url("de", "Französische Küche"), 200,
          {"batchcomplete": True, "query": {"pages": [page("Wein", "Q282"), page("Käse", "Q10943"),
                                                      page("Baguette", "Q193359"), page("Croissant", "Q207832"),
                                                      page("Brot", "Q7802")]}})
    write(d, "de_french_views", views_url("de", "Französische Küche"), 200,
          views_body("de", "Französische Küche", {m: 2400 + 29 * i for i, m in enumerate(MONTHS)}))

    # it / italian: links arrive in two batches.
    write(d, "it_italian_info", info_url("it", "Cucina italiana"), 200, info_body("Cucina italiana"))
    write(d, "it_italian_links", links_url("it", "Cucina italiana"), 200,
          {"batchcomplete": True, "continue": {"continue": "gplcontinue||", "gplcontinue": "4242|0|Pomodoro"},
           "query": {"pages": [page("Pasta", "Q178"), page("Pizza", "Q177"), page("Vino", "Q282"),
                               page("Olio di oliva", "Q93165")]}})
    write(d, "it_italian_links_2",
          links_url("it", "Cucina italiana", [("continue", "gplcontinue||"), ("gplcontinue", "4242|0|Pomodoro")]),
          200, {"batchcomplete": True, "query": {"pages": [page("Pomodoro", "Q23501"), page("Formaggio", "Q10943"),
                                                             page("Risotto", "Q212823"), page("Espresso", "Q180289")]}})
    write(d, "it_italian_views", views_url("it", "Cucina italiana"), 200,
          views_body("it", "Cucina italiana", {m: 8800 + 211 * i for i, m in enumerate(MONTHS)}))

    # it / german: the seed title redirects.
    write(d, "it_german_info", info_url("it", "Cucina germanica"), 200, info_body("Cucina germanica", "Cucina tedesca"))
    write(d, "it_german_links", links_url("it", "Cucina tedesca"), 200,
          {"batchcomplete": True, "query": {"pages": [page("Birra", "Q44"), page("Salsiccia", "Q131419"),
                                                      page("Patata", "Q10998"), page("Crauti", "Q154210")]}})
    write(d, "it_german_views", views_url("it", "Cucina tedesca"), 200,
          views_body("it", "Cucina tedesca", {m: 700 + 13 * i for i, m in enumerate(MONTHS)}))

    # it / french: an article without content links, and months missing from the view series.
    write(d, "it_french_info", info_url("it", "Cucina francese"), 200, info_body("Cucina francese"))
    write(d, "it_french_links", links_url("it", "Cucina francese"), 200, {"batchcomplete": True})
    write(d, "it_french_views", views_url("it", "Cucina francese"), 200,
          views_body("it", "Cucina francese", {m: 1500 + 17 * i for i, m in enumerate(MONTHS) if i % 5 != 2}))

    seeds = [("fr", "french", "Cuisine française"), ("fr", "italian", "Cuisine italienne"),
             ("fr", "german", "Cuisine germanique"), ("de", "german", "Deutsche Küche"),
             ("de", "french", "Französische Küche"), ("it", "italian", "Cucina italiana"),
             ("it", "german", "Cucina germanica"), ("it", "french", "Cucina francese")]
    lines = ["language\tcuisine_id\tarticle_title\tarticle_url"]
    lines += [f"{l}\t{c}\t{t}\thttps://{l}.wikipedia.org/wiki/{enc(t.replace(' ', '_'))}" for l, c, t in seeds]
    (d / "seeds.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    # Every seed missing.
    bad = d / "all404"
    bad.mkdir(exist_ok=True)
    for old in bad.glob("*.json"):
        old.unlink()
    bad_seeds = [("fr", "french", "Cuisine perdue"), ("de", "german", "Verlorene Küche")]
    for l, c, t in bad_seeds:
        write(bad, f"{l}_{c}_info", info_url(l, t), 404, "<html><body>Not Found</body></html>")
    lines = ["language\tcuisine_id\tarticle_title\tarticle_url"]
    lines += [f"{l}\t{c}\t{t}\thttps://{l}.wikipedia.org/wiki/{enc(t.replace(' ', '_'))}" for l, c, t in bad_seeds]
    (bad / "seeds.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()

"""Builds the word lists under data/.

  key_dictionary.txt        lemmas in both Webster's 2nd (web2) and GCIDE that
                            wordfreq has seen; plays the shared codebook.
  reference_dictionary.txt  the 20,770 most frequent GCIDE lemmas; the modern
                            dictionary candidates are drawn from.
  table_words.txt           the 1000 most frequent dictionary words, for the
                            synthetic table section.

Needs the english-words and wordfreq packages.
"""

import argparse
import pathlib

import wordfreq
from english_words import get_english_words_set

REFERENCE_SIZE = 20770
TABLE_SIZE = 1000


def write(path, words):
    path.write_text("".join(w + "\n" for w in words), encoding="utf-8")
    print(f"{path}: {len(words)} words")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=pathlib.Path, default=pathlib.Path("data"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    def plain(words):
        return {w for w in words if w.isascii() and w.isalpha()}

    web2 = plain(get_english_words_set(["web2"], lower=True, alpha=True))
    gcide = plain(get_english_words_set(["gcide"], lower=True, alpha=True))
    zipf = {w: wordfreq.zipf_frequency(w, "en") for w in web2 | gcide}

    key = sorted(w for w in web2 & gcide if zipf[w] > 0)
    write(args.out / "key_dictionary.txt", key)

    by_freq = sorted(gcide, key=lambda w: (-zipf[w], w))
    write(args.out / "reference_dictionary.txt", sorted(by_freq[:REFERENCE_SIZE]))

    known = web2 | gcide
    table = []
    for w in wordfreq.iter_wordlist("en"):
        if w in known:
            table.append(w)
            if len(table) == TABLE_SIZE:
                break
    write(args.out / "table_words.txt", table)


if __name__ == "__main__":
    main()

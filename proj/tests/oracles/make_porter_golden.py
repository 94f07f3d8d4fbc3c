"""Freeze Porter stems from NLTK's reference-compatible mode into a TSV."""
import re
import sys
from pathlib import Path

from nltk.stem.porter import PorterStemmer

EXTRA = [
    "caresses", "ponies", "ties", "caress", "cats", "feed", "agreed", "plastered",
    "bled", "motoring", "sing", "conflated", "troubled", "sized", "hopping",
    "tanned", "falling", "hissing", "fizzed", "failing", "filing", "happy", "sky",
    "relational", "conditional", "rational", "valenci", "hesitanci", "digitizer",
    "conformabli", "radicalli", "differentli", "vileli", "analogousli",
    "vietnamization", "predication", "operator", "feudalism", "decisiveness",
    "hopefulness", "callousness", "formaliti", "sensitiviti", "sensibiliti",
    "triplicate", "formative", "formalize", "electriciti", "electrical",
    "hopeful", "goodness", "revival", "allowance", "inference", "airliner",
    "gyroscopic", "adjustable", "defensible", "irritant", "replacement",
    "adjustment", "dependent", "adoption", "homologou", "communism", "activate",
    "angulariti", "homologous", "effective", "bowdlerize", "probate", "rate",
    "cease", "controll", "roll", "generalizations", "oscillators", "archaeology",
    "nets", "net", "recognitions", "online", "offline", "state-of-the-art",
    "e-mail", "x", "by", "yes", "syzygy", "queueing", "sprayed", "flying",
]


def main(out_path: str, sources: list) -> None:
    words = set(EXTRA)
    for name in sources:
        text = Path(name).read_text(encoding="utf-8").lower()
        words.update(re.findall(r"[a-z]+", text))
    stemmer = PorterStemmer(mode=PorterStemmer.MARTIN_EXTENSIONS)
    with open(out_path, "w", encoding="utf-8") as f:
        for w in sorted(words):
            f.write(f"{w}\t{stemmer.stem(w, to_lowercase=False)}\n")


if __name__ == "__main__":
    # usage: make_porter_golden.py OUT.tsv [TEXT_FILE ...]
    main(sys.argv[1], sys.argv[2:])

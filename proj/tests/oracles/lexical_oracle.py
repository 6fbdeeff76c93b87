"""Reference values for the lexical complexity metrics.

Independent of the C++ implementation: tokenization and every metric are written
from their textbook definitions. Run with python3; prints a C++ initializer block
that is pasted into tests/lexical_oracle_values.hpp.
"""
import math
import re
import string

MARKERS = {"xxx", "[unintelligible]", "[inaudible]"}
SUFFIXES = ["ness", "ment", "tion", "ity", "able", "ful", "less", "ly"]
NUMBER_WORDS = set(
    "zero one two three four five six seven eight nine ten eleven twelve thirteen fourteen "
    "fifteen sixteen seventeen eighteen nineteen twenty thirty forty fifty sixty seventy "
    "eighty ninety hundred thousand million billion".split())

CORPORA = [
    ("a b c d", None),
    ("The cat sat. The cat ran!", None),
    ("one 2 three cats", None),
    ("uh xxx okay xxx [inaudible] well", None),
    ("Happiness is a movement of kindness. Kindness is timeless, careful and able!", None),
    ("I saw 12 dogs and 3.5 cats? Twenty birds flew away quickly.", None),
    ("the the the the", None),
    ("We went to the market. The market was closed. We went home.", None),
    ("zebra quietly ate grass near the river bank", {"zebra", "ate", "grass", "near", "the", "river"}),
    ("Honestly the situation became hopeless. Nobody could explain the confusion, "
     "and the committee lost its credibility entirely.", None),
]


def tokenize(text):
    tokens = []
    # '.' between digits is a decimal point, not a sentence boundary
    protected = re.sub(r"(?<=\d)\.(?=\d)", "\x00", text)
    for sentence in re.split(r"[.!?]", protected):
        for raw in sentence.split():
            raw = raw.replace("\x00", ".")
            if raw.lower() in MARKERS:
                tokens.append((raw.lower(), True))
                continue
            core = raw.strip(string.punctuation)
            if core:
                tokens.append((core.lower(), core.lower() in MARKERS))
    return tokens


def metrics(text, dictionary):
    toks = tokenize(text)
    n = len(toks)
    freq = {}
    for w, _ in toks:
        freq[w] = freq.get(w, 0) + 1
    v = len(freq)
    v1 = sum(1 for c in freq.values() if c == 1)
    unintel = sum(1 for w, flag in toks if flag or (dictionary is not None and w not in dictionary))
    h = -sum((c / n) * math.log2(c / n) for c in freq.values())
    entropy = h / math.log2(v) if v > 1 else float("nan")
    suffix = sum(1 for w, _ in toks if any(w.endswith(s) for s in SUFFIXES))
    numeric = sum(1 for w, _ in toks if re.fullmatch(r"[0-9.,]*[0-9][0-9.,]*", w) or w in NUMBER_WORDS)
    brunet = n ** (v ** -0.165)
    honore = float("nan") if v1 == v else 100 * math.log(n) / (1 - v1 / v)
    return [unintel / n, entropy, suffix / n, numeric / n, brunet, honore, v / n]


def fmt(x):
    return "kNaN" if math.isnan(x) else repr(x)


if __name__ == "__main__":
    print("brunet(N=100, V=50) =", 100 ** (50 ** -0.165))
    for text, dictionary in CORPORA:
        vals = metrics(text, dictionary)
        print("    {" + ", ".join(fmt(x) for x in vals) + "},")

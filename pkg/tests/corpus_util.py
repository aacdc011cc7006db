import importlib.resources

from termweaver.parser import parse_program, parse_query

CORPUS = ["list01.pl", "mergesort.pl", "move.pl", "diff.pl", "color_map.pl", "lcount_split.pl", "qrp.pl"]


def corpus_text(name):
    return (importlib.resources.files("termweaver") / "corpus" / name).read_text(encoding="utf-8")


def load(name):
    return parse_program(corpus_text(name))


def q(text):
    return parse_query(text)

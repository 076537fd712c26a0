"""Write corpus/gallery_p*.pd from the gallery and refresh tests/golden/*.json
from every corpus document.

    python scripts/make_corpus.py            # rewrite both
    python scripts/make_corpus.py --check    # fail if anything would change
"""
import argparse
import sys
from pathlib import Path

from pdens.cli import dump
from pdens.dsl import parse, run
from pdens.gallery import GERMS, corpus_document

ROOT = Path(__file__).resolve().parent.parent


def golden_text(pd: Path) -> str:
    results = run(parse(pd.read_text()))
    return "".join(dump(r.payload) + "\n" for r in results)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--check", action="store_true")
    args = ap.parse_args()
    wanted = {}
    for p in sorted({g.p for g in GERMS}):
        wanted[ROOT / "corpus" / f"gallery_p{p}.pd"] = corpus_document(p)
    stale = []
    for path, text in wanted.items():
        if not path.exists() or path.read_text() != text:
            stale.append(path)
            if not args.check:
                path.write_text(text)
    for pd in sorted((ROOT / "corpus").glob("*.pd")):
        gold = ROOT / "tests" / "golden" / (pd.stem + ".json")
        text = golden_text(pd)
        if not gold.exists() or gold.read_text() != text:
            stale.append(gold)
            if not args.check:
                gold.write_text(text)
    for s in stale:
        print(("stale: " if args.check else "wrote: ") + str(s.relative_to(ROOT)))
    return 1 if (args.check and stale) else 0


if __name__ == "__main__":
    sys.exit(main())

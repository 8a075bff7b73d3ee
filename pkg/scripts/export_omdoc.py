"""Write the running example as .omdoc files plus a catalog.

usage: python3 scripts/export_omdoc.py OUTDIR
"""

import argparse
import os

from mmt import examples
from mmt.xmlio import write_file

NAMES = {examples.LF_DOC: "lf", examples.FOL_DOC: "fol", examples.ALG_DOC: "algebra"}


def export(outdir: str) -> str:
    os.makedirs(outdir, exist_ok=True)
    lines = []
    for doc in examples.documents():
        fname = NAMES[doc.uri] + ".omdoc"
        write_file(doc, os.path.join(outdir, fname))
        lines.append(f"PREFIX {doc.uri} {fname}")
    catalog = os.path.join(outdir, "catalog.txt")
    with open(catalog, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return catalog


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("outdir")
    print(export(ap.parse_args().outdir))

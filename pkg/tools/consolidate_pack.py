"""Join per-group ``sg_N_I.perm.json`` exports into one ``*.perm.jsonl`` pack."""

import argparse
import json
import re
from pathlib import Path


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("src", type=Path, help="directory of sg_N_I.perm.json files")
    ap.add_argument("out", type=Path, help="output .perm.jsonl")
    args = ap.parse_args()

    def key(p: Path) -> tuple[int, int]:
        n, i = re.match(r"sg_(\d+)_(\d+)\.perm\.json$", p.name).groups()
        return int(n), int(i)

    files = sorted(args.src.glob("sg_*_*.perm.json"), key=key)
    with open(args.out, "w") as fh:
        for f in files:
            d = json.loads(f.read_text())
            rec = {"label": d["label"], "degree": d["degree"], "generators": d["generators"]}
            fh.write(json.dumps(rec, separators=(",", ":")) + "\n")
    print(f"{len(files)} groups -> {args.out}")


if __name__ == "__main__":
    main()

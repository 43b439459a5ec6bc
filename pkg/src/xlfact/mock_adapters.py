"""Mock adapter processes for tests and offline runs.

Each role reads a JSONL file and writes one output line per input
line, echoing sample_id — the same contract real neural adapters must
honor.  Canned outputs come from a JSON file mapping sample_id to the
payload string.

    python -m xlfact.mock_adapters translator [--canned map.json] IN OUT
    python -m xlfact.mock_adapters generator  [--canned map.json] IN OUT
    python -m xlfact.mock_adapters annotator   --canned map.json  IN OUT

Without --canned the translator is the identity (translation :=
sentence) and the generator emits empty strings; the annotator always
needs canned CoNLL-U blocks.
"""

from __future__ import annotations

import argparse
import json
import sys


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="xlfact-mock-adapter")
    parser.add_argument("role", choices=["translator", "generator", "annotator"])
    parser.add_argument("input")
    parser.add_argument("output")
    parser.add_argument("--canned", help="JSON file mapping sample_id to output payload")
    args = parser.parse_args(argv)

    canned = {}
    if args.canned:
        with open(args.canned, encoding="utf-8") as handle:
            canned = json.load(handle)

    with open(args.input, encoding="utf-8") as handle:
        lines = [json.loads(line) for line in handle if line.strip()]

    out_lines = []
    for line in lines:
        sample_id = line["sample_id"]
        if args.role == "translator":
            payload = {"sample_id": sample_id, "translation": canned.get(sample_id, line["sentence"])}
        elif args.role == "generator":
            payload = {"sample_id": sample_id, "generated": canned.get(sample_id, "")}
        else:
            if sample_id not in canned:
                print(f"no canned annotation for {sample_id}", file=sys.stderr)
                return 1
            payload = {"sample_id": sample_id, "conllu": canned[sample_id]}
        out_lines.append(json.dumps(payload, ensure_ascii=False))

    with open(args.output, "w", encoding="utf-8") as handle:
        for line in out_lines:
            handle.write(line + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())

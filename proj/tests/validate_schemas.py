#!/usr/bin/env python3
"""Run every CLI subcommand on small inputs and validate its JSON output.

usage: validate_schemas.py CLI SCHEMA_DIR DATA_DIR
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema


def main() -> int:
    cli, schema_dir, data = sys.argv[1], Path(sys.argv[2]), Path(sys.argv[3])
    corpus, pairs = data / "text" / "corpus.txt", data / "text" / "pairs.csv"
    failures = 0

    with tempfile.TemporaryDirectory() as tmp:
        t = Path(tmp)

        def run(schema: str, *args: str) -> None:
            nonlocal failures
            proc = subprocess.run([cli, "--seed", "2", *map(str, args)], capture_output=True, text=True)
            try:
                if proc.returncode != 0:
                    raise RuntimeError(f"exit {proc.returncode}: {proc.stderr.strip()}")
                doc = json.loads(proc.stdout)
                spec = json.loads((schema_dir / f"{schema}.schema.json").read_text())
                jsonschema.validate(doc, spec)
                print(f"ok    {schema}: {' '.join(map(str, args[:2]))}")
            except Exception as e:  # report and keep going
                failures += 1
                print(f"FAIL  {schema}: {' '.join(map(str, args))}\n      {e}")

        run("index-corpus", "index-corpus", "--corpus", corpus, "--out", t / "index.json")
        run("embed-train", "embed-train", "--corpus", corpus, "--dim", 8, "--epochs", 1, "--out", t / "emb.txt")
        run("word-pair", "word-pair", "--index", t / "index.json", "--embeddings", t / "emb.txt",
            "--x", "smoking", "--y", "cancer", "--vocab-size", 200, "--permutations", 99)
        run("word-pair", "word-pair", "--index", t / "index.json", "--x", "smoking", "--y", "cancer",
            "--kind", "prec-pmi", "--vocab-size", 200, "--permutations", 99)
        run("nlp-eval", "nlp-eval", "--corpus", corpus, "--pairs", pairs, "--dim", 8, "--epochs", 1,
            "--trees", 20, "--features", 20, "--repeats", 2, "--min-votes", 0, "--predictions")
        run("baselines", "baselines", "--index", t / "index.json", "--pairs", pairs)
        run("baselines", "baselines", "--index", t / "index.json", "--x", "smoking", "--y", "cancer")
        run("synth-stylized", "synth", "stylized", "--count", 1, "--size", 100, "--out-dir", t / "sty")
        run("image-pair", "image-pair", "--x", t / "sty" / "pair_00_x.pgm", "--y", t / "sty" / "pair_00_y.pgm",
            "--n", 300, "--permutations", 99)
        run("synth-frames", "synth", "frames", "--size", 32, "--frames", 4, "--out-dir", t / "frames")
        run("frames-order", "frames-order", "--dir", t / "frames", "--n", 300, "--permutations", 99)
        run("synth-anm", "synth", "anm", "--count", 20, "--n", 100, "--out", t / "anm.jsonl")
        run("synth-corpus", "synth", "corpus", "--sentences", 200, "--out-dir", t / "corpus")
        run("significance", "significance", "--accuracy", 0.52, "--n", 1970)
        run("model-train", "model", "train", "--data", t / "anm.jsonl", "--trees", 20, "--features", 10,
            "--out", t / "model.json")
        run("model-info", "model", "info", "--model", t / "model.json")
        with open(t / "anm.jsonl") as f:
            first = json.loads(f.readline())
        (t / "scatter.jsonl").write_text(
            "".join(json.dumps({"a": a, "b": b}) + "\n" for a, b in zip(first["a"], first["b"])))
        run("model-predict", "model", "predict", "--model", t / "model.json", "--scatter", t / "scatter.jsonl")

    print("all outputs valid" if failures == 0 else f"{failures} invalid outputs")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())

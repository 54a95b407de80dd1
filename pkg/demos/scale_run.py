"""Learn a library over a generated corpus of 122 programs from the command line.

Runs ``leroy learn`` twice, single threaded and with one thread per core, and
checks that both runs write the same files byte for byte.

    python3 demos/scale_run.py [--seed 122] [--programs 122]
"""
import argparse
import os
import subprocess
import sys
import tempfile
import time
from pathlib import Path

from leroy.corpus_gen import random_corpus


def run(corpus: Path, out: Path, threads: int) -> float:
    env = dict(os.environ, LEROY_THREADS=str(threads))
    t0 = time.perf_counter()
    subprocess.run([sys.executable, "-m", "leroy.cli", "learn", "--corpus", str(corpus),
                    "--out", str(out), "--oracle-check"], env=env, check=True)
    return time.perf_counter() - t0


def snapshot(out: Path) -> dict:
    return {p.name: p.read_bytes() for p in sorted(out.iterdir())}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=122)
    ap.add_argument("--programs", type=int, default=122)
    args = ap.parse_args()
    sources = random_corpus(args.seed, args.programs, lines=(1, 4), n_snippets=3,
                            snippet_lines=(2, 4), allow_input=True, function_rate=0.1)
    with tempfile.TemporaryDirectory() as tmp:
        corpus = Path(tmp) / "corpus"
        corpus.mkdir()
        for i, src in enumerate(sources):
            (corpus / f"prog{i:03d}.py").write_text(src + "\n")
        lines = sum(len(s.splitlines()) for s in sources)
        print(f"{len(sources)} programs, {lines / len(sources):.1f} lines on average", flush=True)
        cores = os.cpu_count() or 1
        t1 = run(corpus, Path(tmp) / "one", 1)
        tn = run(corpus, Path(tmp) / "many", cores)
        same = snapshot(Path(tmp) / "one") == snapshot(Path(tmp) / "many")
        print(f"1 thread {t1:.1f}s, {cores} threads {tn:.1f}s, identical output: {same}")
        print((Path(tmp) / "one" / "library.py").read_text())


if __name__ == "__main__":
    main()

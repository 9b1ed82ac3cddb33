import argparse
from pathlib import Path

from hamlie.lab import ExperimentConfig


def parser(desc: str, samples: int = 100) -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(description=desc)
    ap.add_argument("--p", type=int, default=5)
    ap.add_argument("--r", type=int, default=1)
    ap.add_argument("--m", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--samples", type=int, default=samples)
    ap.add_argument("--max-seconds", type=float, default=None)
    ap.add_argument("--out-dir", default="results")
    return ap


def config(args, **kw) -> ExperimentConfig:
    return ExperimentConfig(p=args.p, r=args.r, m=args.m, seed=args.seed, samples=args.samples,
                            max_seconds=args.max_seconds, **kw)


def save(rep, args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{rep.command}-p{args.p}-r{args.r}-m{args.m}-s{args.seed}"
    (out / f"{stem}.json").write_text(rep.to_json())
    (out / f"{stem}.csv").write_text(rep.to_csv())
    print(rep.to_text())
    print(f"wrote {out / stem}.json and .csv")
    return 0 if rep.passed else 1

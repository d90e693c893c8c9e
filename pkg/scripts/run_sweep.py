"""Run the reference l1 sweep and write its CSV (defaults to the golden file path)."""
import argparse
from pathlib import Path

from advdomain.training import write_sweep_csv
from advdomain.verify import DEFAULT_GOLDEN, reference_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=DEFAULT_GOLDEN)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    rows = reference_sweep(args.threads)
    write_sweep_csv(rows, args.out)
    for r in rows:
        print(f"mu={r.mu:<7g} eps={r.eps:.5f}  delta={r.delta:+.4f}  ||w||_1={r.w_l1:.3f}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()

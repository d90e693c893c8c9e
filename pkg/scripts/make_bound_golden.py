"""Write the end-to-end bound golden: a small synthetic pair and its CLI report."""
import json
from pathlib import Path

from advdomain.cli import main
from advdomain.training import SyntheticDomainSpec, generate_domains

OUT = Path(__file__).resolve().parents[1] / "tests" / "data" / "bound_pipeline"
SPEC = SyntheticDomainSpec(n=10, d=2, separation=2.0, rotation=0.5, translation=0.4, seed=21)
ARGS = ["bound", "--kind", "corollary", "--mode", "statement", "--eps", "0.05", "--source-risk", "0.1",
        "--lambda", "0.05,0.02,0.03", "--M", "4", "--no-timestamp"]


def main_():
    OUT.mkdir(parents=True, exist_ok=True)
    doms = generate_domains(SPEC)
    doms.source.to_csv(OUT / "source.csv")
    doms.target.to_csv(OUT / "target.csv")
    report = OUT / "report.json"
    code = main(ARGS + ["--source", str(OUT / "source.csv"), "--target", str(OUT / "target.csv"),
                        "--out", str(report)])
    print(json.dumps(json.loads(report.read_text())["bound"], indent=2))
    return code


if __name__ == "__main__":
    raise SystemExit(main_())

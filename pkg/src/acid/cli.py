"""Command-line interface.

Subcommands mirror the pipeline stages so each can run on the previous
stage's outputs: curate, mine, classify, analyze, evaluate, and run (the
whole pipeline in one go).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from acid import pipeline
from acid.curation import CurationPolicy
from acid.errors import AcidError
from acid.evaluation import load_oracle, render_score_table, score
from acid.taxonomy import CATEGORY_ORDER


def _add_policy_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--min-iac-ratio", type=float, default=0.11, help="minimum IaC file ratio (default 0.11)")
    parser.add_argument("--min-commits-month", type=float, default=2.0, help="minimum commits per month (default 2)")
    parser.add_argument("--min-contributors", type=int, default=10, help="minimum contributor count (default 10)")
    parser.add_argument("--no-require-original", action="store_true", help="admit forks and clones")
    parser.add_argument("--no-enforce-contributors", action="store_true", help="waive the contributor criterion")


def _add_common_args(parser: argparse.ArgumentParser, manifest: bool = True) -> None:
    if manifest:
        parser.add_argument("--manifest", required=True, help="repository manifest file")
        parser.add_argument("--workdir", help="directory for cloned repositories")
        parser.add_argument("--ref", help="git ref to mine (default HEAD)")
        parser.add_argument("--exclude-merges", action="store_true", help="skip merge commits")
    parser.add_argument("--out", required=True, help="output directory")


def _add_classify_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--rules", help="alternate rule file")
    parser.add_argument("--cache-dir", help="issue cache directory")
    parser.add_argument("--offline", action="store_true", help="never touch the network")
    parser.add_argument("--base-url", default=pipeline.DEFAULT_BASE_URL, help="forge API base URL")
    parser.add_argument("--any-issue-ref", action="store_true",
                        help="join every referenced issue, not only closing-keyword references")


def _policy_from(args: argparse.Namespace) -> CurationPolicy:
    return CurationPolicy(
        min_iac_ratio=args.min_iac_ratio,
        require_original=not args.no_require_original,
        min_commits_per_month=args.min_commits_month,
        min_contributors=args.min_contributors,
        enforce_contributors=not args.no_enforce_contributors,
    )


def _config_from(args: argparse.Namespace) -> pipeline.RunConfig:
    return pipeline.RunConfig(
        manifest_path=Path(getattr(args, "manifest", "") or ""),
        output_dir=Path(args.out),
        workdir=Path(args.workdir) if getattr(args, "workdir", None) else None,
        cache_dir=Path(args.cache_dir) if getattr(args, "cache_dir", None) else None,
        policy=_policy_from(args) if hasattr(args, "min_iac_ratio") else CurationPolicy(),
        rule_file=Path(args.rules) if getattr(args, "rules", None) else None,
        offline=getattr(args, "offline", False),
        parallelism=getattr(args, "jobs", 1),
        output_formats=tuple(getattr(args, "format", None) or ("csv", "json", "ndjson")),
        include_merges=not getattr(args, "exclude_merges", False),
        ref_mode="any" if getattr(args, "any_issue_ref", False) else "closing_keyword",
        ref=getattr(args, "ref", None),
        base_url=getattr(args, "base_url", pipeline.DEFAULT_BASE_URL),
    )


def _cmd_curate(args: argparse.Namespace) -> int:
    rows = pipeline.stage_curate(_config_from(args))
    for name, profile, verdict in rows:
        status = "accepted" if verdict.accepted else "rejected: " + ", ".join(verdict.failed_criteria)
        print(
            f"{name}: iac_ratio={profile.iac_ratio:.3f} commits/month={profile.commits_per_month:.2f} "
            f"contributors={profile.contributor_count} fork={profile.is_fork_or_clone} -> {status}"
        )
    return 0


def _cmd_mine(args: argparse.Namespace) -> int:
    outcomes = pipeline.stage_mine(_config_from(args))
    for o in outcomes:
        if o.error:
            print(f"{o.name}: failed ({o.error})")
        elif not o.accepted:
            print(f"{o.name}: rejected ({', '.join(o.failed_criteria)})")
        else:
            print(f"{o.name}: {o.commits_scanned} commits, {len(o.iac_commit_ids)} touching IaC")
    return 0


def _cmd_classify(args: argparse.Namespace) -> int:
    ecms = pipeline.stage_classify(_config_from(args))
    print(f"classified {ecms} enhanced commit messages")
    return 0


def _cmd_analyze(args: argparse.Namespace) -> int:
    report = pipeline.stage_analyze(_config_from(args))
    print(pipeline.metrics_to_csv(report), end="")
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    predictions = pipeline.read_results_ndjson(Path(args.predictions))
    oracle = load_oracle(args.oracle)
    report = score(predictions, oracle)
    print(render_score_table(report))
    if args.csv_out:
        lines = ["Category,Occurrences,Precision,Recall"]

        def cell(value: float | None) -> str:
            return "" if value is None else f"{value:.2f}"

        for name in [c.value for c in CATEGORY_ORDER] + ["No Defect"]:
            row = report.rows[name]
            lines.append(f"{name},{row.support},{cell(row.precision)},{cell(row.recall)}")
        lines.append(f"Average,,{cell(report.macro_precision)},{cell(report.macro_recall)}")
        Path(args.csv_out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    summary = pipeline.run(_config_from(args))
    print(f"accepted: {len(summary.accepted)} ({', '.join(summary.accepted) or 'none'})")
    for item in summary.rejected:
        print(f"rejected: {item['name']} ({', '.join(item['failed_criteria'])})")
    for item in summary.failures:
        print(f"failed: {item['name']} ({item['error']})")
    print(f"commits scanned: {summary.commits_scanned}; ECMs classified: {summary.ecms_classified}")
    for path in summary.report_paths:
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="acid",
        description="Mine git repositories for infrastructure-as-code defect commits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curate", help="judge repositories against the inclusion criteria")
    _add_common_args(p)
    _add_policy_args(p)
    p.set_defaults(func=_cmd_curate)

    p = sub.add_parser("mine", help="ingest accepted repositories into per-repo artifacts")
    _add_common_args(p)
    _add_policy_args(p)
    p.set_defaults(func=_cmd_mine)

    p = sub.add_parser("classify", help="classify previously mined commits")
    _add_common_args(p, manifest=False)
    _add_classify_args(p)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("analyze", help="aggregate classifications into corpus metrics")
    _add_common_args(p, manifest=False)
    p.add_argument("--format", action="append", choices=("csv", "json", "ndjson"),
                   help="output formats (repeatable; default all)")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("evaluate", help="score predictions against a labeled oracle")
    p.add_argument("--predictions", required=True, help="classifications ndjson file")
    p.add_argument("--oracle", required=True, help="oracle file (commit_id;Category;...)")
    p.add_argument("--csv-out", help="also write the table as csv")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("run", help="full pipeline: curate, mine, classify, analyze")
    _add_common_args(p)
    _add_policy_args(p)
    _add_classify_args(p)
    p.add_argument("--jobs", type=int, default=1, help="repository-level parallelism")
    p.add_argument("--format", action="append", choices=("csv", "json", "ndjson"),
                   help="output formats (repeatable; default all)")
    p.set_defaults(func=_cmd_run)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (AcidError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

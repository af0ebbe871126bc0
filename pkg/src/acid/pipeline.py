"""End-to-end orchestration: manifest to classified corpus to reports.

Stages communicate through serialized artifacts under the output directory
(one subdirectory per repository), so each CLI subcommand can run alone.
Everything written here is deterministic for a fixed input tree: no
timestamps, stable ordering (repos by manifest order, commits by topology,
categories in taxonomy order), and atomic file writes with completion
markers for crash-resumable corpus runs.
"""

from __future__ import annotations

import dataclasses
import json
import os
import re
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from acid import iac, metrics, vcs
from acid.curation import CurationPolicy, CurationVerdict, RepositoryProfile, evaluate_repo
from acid.diffsignals import detect_diff_signals
from acid.ecm import IssueResolver, build_ecm
from acid.engine import ClassificationResult, classify_ecm
from acid.errors import AcidError, ManifestUnreadable
from acid.forge import DEFAULT_BASE_URL, IssueClient
from acid.iac import RepoIacProfile
from acid.metrics import MetricsReport
from acid.rules import RuleSet, load_rules, match_pattern
from acid.taxonomy import CATEGORY_ORDER, parse_label, sorted_labels
from acid.textops import tokenize


@dataclass(frozen=True)
class ManifestEntry:
    source: str
    fork: bool = False
    contributors: int | None = None


@dataclass
class RunConfig:
    manifest_path: Path
    output_dir: Path
    workdir: Path | None = None
    cache_dir: Path | None = None
    policy: CurationPolicy = field(default_factory=CurationPolicy)
    rule_file: Path | None = None
    offline: bool = False
    parallelism: int = 1
    output_formats: tuple[str, ...] = ("csv", "json", "ndjson")
    include_merges: bool = True
    ref_mode: str = "closing_keyword"
    ref: str | None = None
    base_url: str = DEFAULT_BASE_URL

    def resolved_workdir(self) -> Path:
        return self.workdir if self.workdir is not None else self.output_dir / "work"

    def resolved_cache_dir(self) -> Path:
        return self.cache_dir if self.cache_dir is not None else self.output_dir / "issue-cache"


@dataclass
class RepoOutcome:
    name: str
    source: str
    index: int = 0
    accepted: bool = False
    failed_criteria: tuple[str, ...] = ()
    error: str | None = None
    commits_scanned: int = 0
    ecms_classified: int = 0
    iac_commit_ids: tuple[str, ...] = ()
    timestamps: dict[str, int] = field(default_factory=dict)
    program_paths: tuple[str, ...] = ()
    commit_paths: dict[str, tuple[str, ...]] = field(default_factory=dict)
    results: list[ClassificationResult] = field(default_factory=list)


@dataclass
class RunSummary:
    accepted: list[str]
    rejected: list[dict]
    failures: list[dict]
    commits_scanned: int
    ecms_classified: int
    report_paths: list[str]


# --- manifest ---------------------------------------------------------------

_BOOL_VALUES = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def parse_manifest(text: str, path: str = "<manifest>") -> list[ManifestEntry]:
    """One repository per line: path or URL, then optional key=value fields."""
    entries: list[ManifestEntry] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        source = fields[0]
        fork = False
        contributors: int | None = None
        for item in fields[1:]:
            key, sep, value = item.partition("=")
            if not sep:
                raise ManifestUnreadable(f"{path}:{line_no}: expected key=value, got {item!r}")
            if key == "fork":
                if value.lower() not in _BOOL_VALUES:
                    raise ManifestUnreadable(f"{path}:{line_no}: bad fork flag {value!r}")
                fork = _BOOL_VALUES[value.lower()]
            elif key == "contributors":
                if not value.isdigit():
                    raise ManifestUnreadable(f"{path}:{line_no}: bad contributor count {value!r}")
                contributors = int(value)
            else:
                raise ManifestUnreadable(f"{path}:{line_no}: unknown field {key!r}")
        entries.append(ManifestEntry(source=source, fork=fork, contributors=contributors))
    return entries


def load_manifest(path: str | Path) -> list[ManifestEntry]:
    p = Path(path)
    try:
        text = p.read_text("utf-8")
    except OSError as exc:
        raise ManifestUnreadable(f"cannot read manifest {p}: {exc}") from exc
    return parse_manifest(text, path=str(p))


_URL_RE = re.compile(r"^[a-z+]+://|^git@", re.IGNORECASE)
_SLUG_RE = re.compile(r"^(?:[a-z+]+://[^/]+/|git@[^:]+:)([^/\s]+/[^/\s]+?)(?:\.git)?/?$", re.IGNORECASE)


def repo_slug(source: str) -> str:
    """'owner/name' for forge URLs, '' for local paths."""
    m = _SLUG_RE.match(source)
    return m.group(1) if m else ""


def repo_name(source: str) -> str:
    tail = source.rstrip("/").rsplit("/", 1)[-1]
    return tail[:-4] if tail.endswith(".git") else tail


# --- serialization ----------------------------------------------------------


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def result_to_json(result: ClassificationResult) -> dict:
    labels = [str(label) for label in result.sorted()]
    return {
        "commit_id": result.commit_id,
        "labels": labels,
        "evidence": {label: list(result.evidence.get(label, ())) for label in labels},
        "is_defect": result.is_defect,
    }


def result_from_json(data: Mapping) -> ClassificationResult:
    labels = frozenset(parse_label(text) for text in data.get("labels", ()))
    return ClassificationResult(
        commit_id=data["commit_id"],
        labels=labels,
        evidence={k: tuple(v) for k, v in data.get("evidence", {}).items()},
    )


def write_results_ndjson(path: Path, results: Iterable[ClassificationResult]) -> None:
    lines = [json.dumps(result_to_json(r), ensure_ascii=False) for r in results]
    _atomic_write(path, "\n".join(lines) + ("\n" if lines else ""))


def read_results_ndjson(path: Path) -> list[ClassificationResult]:
    results = []
    for line in path.read_text("utf-8").splitlines():
        if line.strip():
            results.append(result_from_json(json.loads(line)))
    return results


def commit_to_json(commit: vcs.CommitRecord) -> dict:
    return {
        "commit_id": commit.commit_id,
        "author_id": commit.author_id,
        "author_time": commit.author_time,
        "message": commit.message,
        "parents": list(commit.parents),
        "changes": [
            {
                "path": ch.path,
                "kind": ch.kind,
                "old_path": ch.old_path,
                "is_binary": ch.is_binary,
                "hunks": [
                    {
                        "old_start": h.old_start,
                        "new_start": h.new_start,
                        "removed": list(h.removed),
                        "added": list(h.added),
                    }
                    for h in ch.hunks
                ],
            }
            for ch in commit.changes
        ],
    }


def commit_from_json(data: Mapping) -> vcs.CommitRecord:
    return vcs.CommitRecord(
        commit_id=data["commit_id"],
        author_id=data["author_id"],
        author_time=data["author_time"],
        message=data["message"],
        parents=tuple(data.get("parents", ())),
        changes=tuple(
            vcs.FileChange(
                path=ch["path"],
                kind=ch["kind"],
                old_path=ch.get("old_path"),
                is_binary=ch.get("is_binary", False),
                hunks=tuple(
                    vcs.Hunk(
                        old_start=h["old_start"],
                        new_start=h["new_start"],
                        removed=tuple(h["removed"]),
                        added=tuple(h["added"]),
                    )
                    for h in ch.get("hunks", ())
                ),
            )
            for ch in data.get("changes", ())
        ),
    )


def write_commits_ndjson(path: Path, commits: Iterable[vcs.CommitRecord]) -> None:
    lines = [json.dumps(commit_to_json(c), ensure_ascii=False) for c in commits]
    _atomic_write(path, "\n".join(lines) + ("\n" if lines else ""))


def read_commits_ndjson(path: Path) -> list[vcs.CommitRecord]:
    commits = []
    for line in path.read_text("utf-8").splitlines():
        if line.strip():
            commits.append(commit_from_json(json.loads(line)))
    return commits


# --- per-repository processing ----------------------------------------------


def repo_dir_name(index: int, source: str) -> str:
    return f"{index:03d}-{repo_name(source)}"


def _resolve_source(entry: ManifestEntry, workdir: Path) -> Path:
    if _URL_RE.match(entry.source):
        dest = workdir / repo_name(entry.source)
        if not (dest / ".git").exists():
            workdir.mkdir(parents=True, exist_ok=True)
            vcs.clone(entry.source, dest)
        return dest
    return Path(entry.source)


def _iac_paths_of(commit: vcs.CommitRecord, profile: RepoIacProfile, markers) -> tuple[str, ...]:
    paths: list[str] = []
    for change in commit.changes:
        for path in (change.path, change.old_path):
            if path is None or path in paths:
                continue
            if path in profile.program_paths or iac.classify_file(path, markers).is_iac:
                paths.append(path)
    return tuple(paths)


def classify_repo_commits(
    commits: Sequence[vcs.CommitRecord],
    profile: RepoIacProfile,
    markers: Mapping[str, iac.PlatformKind],
    ruleset: RuleSet,
    resolver: IssueResolver | None,
    ref_mode: str = "closing_keyword",
) -> tuple[list[ClassificationResult], dict[str, tuple[str, ...]], dict[str, int], int]:
    """Classify the IaC commits of one repository.

    Returns (results, commit->IaC paths, commit->author_time, ecm count).
    Commits whose raw message carries no defect indicator skip the ECM join
    and classify to the empty label set.
    """
    results: list[ClassificationResult] = []
    commit_paths: dict[str, tuple[str, ...]] = {}
    timestamps: dict[str, int] = {}
    ecms_built = 0
    defect_lexicon = ruleset.defect_lexicon
    for commit in commits:
        paths = _iac_paths_of(commit, profile, markers)
        if not paths:
            continue
        commit_paths[commit.commit_id] = paths
        timestamps[commit.commit_id] = commit.author_time
        if match_pattern(tokenize(commit.message), defect_lexicon):
            ecm = build_ecm(commit, resolver, mode=ref_mode)
            kinds = {
                p: iac.classify_file(p, markers)
                for change in commit.changes
                for p in (change.path, change.old_path)
                if p is not None
            }
            signals = detect_diff_signals(commit.changes, kinds, ruleset)
            results.append(classify_ecm(ecm, signals, ruleset))
            ecms_built += 1
        else:
            results.append(ClassificationResult(commit_id=commit.commit_id, labels=frozenset()))
    return results, commit_paths, timestamps, ecms_built


@dataclass
class _MinedRepo:
    repo_path: Path
    iac_profile: RepoIacProfile
    markers: dict[str, iac.PlatformKind]
    commits: list[vcs.CommitRecord]
    profile: RepositoryProfile
    verdict: CurationVerdict


def _mine_entry(entry: ManifestEntry, config: RunConfig) -> _MinedRepo:
    repo_path = _resolve_source(entry, config.resolved_workdir())
    tree = vcs.head_tree_paths(repo_path, ref=config.ref or "HEAD")
    iac_profile = iac.profile_repo(tree)
    markers = iac.build_marker_dirs(tree)
    commits = vcs.list_commits(repo_path, ref=config.ref, include_merges=config.include_merges)
    contributors = (
        entry.contributors if entry.contributors is not None else vcs.contributor_count(commits)
    )
    rate = vcs.commits_per_month(commits) if commits else 0.0
    profile = RepositoryProfile(
        iac_ratio=iac_profile.iac_ratio,
        is_fork_or_clone=entry.fork,
        commits_per_month=rate,
        contributor_count=contributors,
    )
    return _MinedRepo(
        repo_path=repo_path,
        iac_profile=iac_profile,
        markers=markers,
        commits=commits,
        profile=profile,
        verdict=evaluate_repo(profile, config.policy),
    )


def process_repo(
    entry: ManifestEntry,
    index: int,
    config: RunConfig,
    ruleset: RuleSet,
    resolver_factory: Callable[[str], IssueResolver] | None = None,
) -> RepoOutcome:
    name = repo_name(entry.source)
    outcome = RepoOutcome(name=name, source=entry.source, index=index)
    repo_out = config.output_dir / "repos" / repo_dir_name(index, entry.source)
    marker = repo_out / ".done"

    try:
        if marker.exists():
            return _load_repo_outcome(repo_out, outcome)

        mined = _mine_entry(entry, config)
        iac_profile, markers, commits = mined.iac_profile, mined.markers, mined.commits
        profile, verdict = mined.profile, mined.verdict
        outcome.commits_scanned = len(commits)
        outcome.failed_criteria = verdict.failed_criteria
        if not verdict.accepted:
            return outcome

        slug = repo_slug(entry.source)
        resolver = resolver_factory(slug) if resolver_factory is not None else None
        results, commit_paths, timestamps, ecms = classify_repo_commits(
            commits, iac_profile, markers, ruleset, resolver, config.ref_mode
        )
        outcome.accepted = True
        outcome.results = results
        outcome.commit_paths = commit_paths
        outcome.timestamps = timestamps
        outcome.iac_commit_ids = tuple(commit_paths)
        outcome.program_paths = tuple(sorted(iac_profile.program_paths))
        outcome.ecms_classified = ecms

        _write_repo_outcome(repo_out, outcome, profile, verdict, iac_profile, markers)
        return outcome
    except AcidError as exc:
        outcome.error = str(exc)
        return outcome
    except OSError as exc:
        outcome.error = f"{type(exc).__name__}: {exc}"
        return outcome


def _write_repo_outcome(
    repo_out: Path,
    outcome: RepoOutcome,
    profile: RepositoryProfile,
    verdict: CurationVerdict,
    iac_profile: RepoIacProfile,
    markers: Mapping[str, iac.PlatformKind],
    done: bool = True,
) -> None:
    write_results_ndjson(repo_out / "classifications.ndjson", outcome.results)
    repo_json = {
        "name": outcome.name,
        "source": outcome.source,
        "commits_scanned": outcome.commits_scanned,
        "ecms_classified": outcome.ecms_classified,
        "iac_commit_ids": list(outcome.iac_commit_ids),
        "timestamps": outcome.timestamps,
        "program_paths": list(outcome.program_paths),
        "commit_paths": {k: list(v) for k, v in outcome.commit_paths.items()},
        "total_files": iac_profile.total_files,
        "iac_files": iac_profile.iac_files,
        "marker_dirs": {d: p.value for d, p in sorted(markers.items())},
        "profile": dataclasses.asdict(profile),
        "verdict": {"accepted": verdict.accepted, "failed_criteria": list(verdict.failed_criteria)},
    }
    _atomic_write(repo_out / "repo.json", json.dumps(repo_json, ensure_ascii=False, indent=2) + "\n")
    if done:
        _atomic_write(repo_out / ".done", "")


def _load_repo_outcome(repo_out: Path, outcome: RepoOutcome) -> RepoOutcome:
    data = json.loads((repo_out / "repo.json").read_text("utf-8"))
    outcome.accepted = data["verdict"]["accepted"]
    outcome.failed_criteria = tuple(data["verdict"]["failed_criteria"])
    outcome.commits_scanned = data["commits_scanned"]
    outcome.ecms_classified = data["ecms_classified"]
    outcome.iac_commit_ids = tuple(data["iac_commit_ids"])
    outcome.timestamps = {k: int(v) for k, v in data["timestamps"].items()}
    outcome.program_paths = tuple(data["program_paths"])
    outcome.commit_paths = {k: tuple(v) for k, v in data["commit_paths"].items()}
    outcome.results = read_results_ndjson(repo_out / "classifications.ndjson")
    return outcome


# --- corpus aggregation and reports ------------------------------------------


def aggregate(outcomes: Sequence[RepoOutcome]) -> MetricsReport:
    """Merge accepted repositories into one corpus-level report.

    Commit ids and program paths are namespaced by repository name so
    same-named files or cherry-picked commits in different repositories
    cannot collide.
    """
    results: list[ClassificationResult] = []
    iac_commit_ids: set[str] = set()
    commit_paths: dict[str, tuple[str, ...]] = {}
    timestamps: dict[str, int] = {}
    program_paths: set[str] = set()
    for outcome in outcomes:
        if not outcome.accepted:
            continue
        prefix = f"{outcome.index:03d}-{outcome.name}"
        for r in outcome.results:
            results.append(dataclasses.replace(r, commit_id=f"{prefix}:{r.commit_id}"))
        iac_commit_ids.update(f"{prefix}:{cid}" for cid in outcome.iac_commit_ids)
        commit_paths.update(
            {f"{prefix}:{cid}": tuple(f"{prefix}/{p}" for p in paths) for cid, paths in outcome.commit_paths.items()}
        )
        timestamps.update({f"{prefix}:{cid}": ts for cid, ts in outcome.timestamps.items()})
        program_paths.update(f"{prefix}/{p}" for p in outcome.program_paths)
    return metrics.build_report(results, iac_commit_ids, commit_paths, program_paths, timestamps)


def _pct(value: float) -> float:
    return round(value + 1e-9, 2)


def metrics_to_json(report: MetricsReport) -> dict:
    return {
        "defect_proportion": {
            "per_category": {c.value: _pct(report.defect_proportion.per_category[c]) for c in CATEGORY_ORDER},
            "total": _pct(report.defect_proportion.total),
        },
        "script_proportion": {
            "per_category": {c.value: _pct(report.script_proportion.per_category[c]) for c in CATEGORY_ORDER},
            "total": _pct(report.script_proportion.total),
        },
        "defects_per_year": {
            c.value: {str(year): count for year, count in sorted(series.items())}
            for c, series in report.defects_per_year.items()
        },
        "colabel_histogram": {str(size): _pct(pct) for size, pct in report.colabel_histogram.items()},
        "subcategory_shares": {
            parent.value: {sub.value: _pct(share) for sub, share in shares.items()}
            for parent, shares in report.subcategory_shares.items()
        },
    }


def metrics_to_csv(report: MetricsReport) -> str:
    lines = ["Category,Defect Proportion (%),Script Proportion (%)"]
    for c in CATEGORY_ORDER:
        lines.append(
            f"{c.value},{_pct(report.defect_proportion.per_category[c]):.2f},"
            f"{_pct(report.script_proportion.per_category[c]):.2f}"
        )
    lines.append(
        f"Total,{_pct(report.defect_proportion.total):.2f},{_pct(report.script_proportion.total):.2f}"
    )
    return "\n".join(lines) + "\n"


def defects_per_year_csv(report: MetricsReport) -> str:
    lines = ["Category,Year,Count"]
    for category, series in report.defects_per_year.items():
        for year, count in sorted(series.items()):
            lines.append(f"{category.value},{year},{count}")
    return "\n".join(lines) + "\n"


def write_reports(config: RunConfig, report: MetricsReport) -> list[str]:
    paths: list[str] = []
    if "json" in config.output_formats:
        _atomic_write(
            config.output_dir / "metrics.json",
            json.dumps(metrics_to_json(report), ensure_ascii=False, indent=2) + "\n",
        )
        paths.append("metrics.json")
    if "csv" in config.output_formats:
        _atomic_write(config.output_dir / "metrics.csv", metrics_to_csv(report))
        _atomic_write(config.output_dir / "defects_per_year.csv", defects_per_year_csv(report))
        paths.extend(["metrics.csv", "defects_per_year.csv"])
    return paths


def run(config: RunConfig, resolver_factory: Callable[[str], IssueResolver] | None = None) -> RunSummary:
    """The full pipeline over every manifest repository."""
    ruleset = load_rules(config.rule_file)
    entries = load_manifest(config.manifest_path)
    if resolver_factory is None:
        client = IssueClient(
            cache_dir=config.resolved_cache_dir(),
            offline=config.offline,
            base_url=config.base_url,
        )
        resolver_factory = client.resolver

    if config.parallelism > 1 and len(entries) > 1:
        with ThreadPoolExecutor(max_workers=config.parallelism) as pool:
            outcomes = list(
                pool.map(
                    lambda pair: process_repo(pair[1], pair[0], config, ruleset, resolver_factory),
                    enumerate(entries),
                )
            )
    else:
        outcomes = [
            process_repo(entry, i, config, ruleset, resolver_factory)
            for i, entry in enumerate(entries)
        ]

    report_paths: list[str] = []
    accepted = [o for o in outcomes if o.accepted]
    if accepted:
        report = aggregate(outcomes)
        report_paths = write_reports(config, report)

    summary = RunSummary(
        accepted=[o.name for o in accepted],
        rejected=[
            {"name": o.name, "failed_criteria": list(o.failed_criteria)}
            for o in outcomes
            if not o.accepted and o.error is None
        ],
        failures=[{"name": o.name, "error": o.error} for o in outcomes if o.error is not None],
        commits_scanned=sum(o.commits_scanned for o in outcomes),
        ecms_classified=sum(o.ecms_classified for o in outcomes),
        report_paths=report_paths,
    )
    _atomic_write(
        config.output_dir / "summary.json",
        json.dumps(dataclasses.asdict(summary), ensure_ascii=False, indent=2) + "\n",
    )
    return summary


# --- staged subcommands -------------------------------------------------------


def stage_curate(config: RunConfig) -> list[tuple[str, RepositoryProfile, CurationVerdict]]:
    """Profile and judge every manifest repository; no mining artifacts."""
    rows: list[tuple[str, RepositoryProfile, CurationVerdict]] = []
    for entry in load_manifest(config.manifest_path):
        mined = _mine_entry(entry, config)
        rows.append((repo_name(entry.source), mined.profile, mined.verdict))
    payload = [
        {
            "name": name,
            "profile": dataclasses.asdict(profile),
            "accepted": verdict.accepted,
            "failed_criteria": list(verdict.failed_criteria),
        }
        for name, profile, verdict in rows
    ]
    _atomic_write(
        config.output_dir / "curation.json",
        json.dumps(payload, ensure_ascii=False, indent=2) + "\n",
    )
    return rows


def stage_mine(config: RunConfig) -> list[RepoOutcome]:
    """Ingest accepted repositories: commits.ndjson + repo.json per repo."""
    outcomes: list[RepoOutcome] = []
    for index, entry in enumerate(load_manifest(config.manifest_path)):
        name = repo_name(entry.source)
        outcome = RepoOutcome(name=name, source=entry.source, index=index)
        repo_out = config.output_dir / "repos" / repo_dir_name(index, entry.source)
        try:
            mined = _mine_entry(entry, config)
            outcome.commits_scanned = len(mined.commits)
            outcome.failed_criteria = mined.verdict.failed_criteria
            if mined.verdict.accepted:
                outcome.accepted = True
                for commit in mined.commits:
                    paths = _iac_paths_of(commit, mined.iac_profile, mined.markers)
                    if paths:
                        outcome.commit_paths[commit.commit_id] = paths
                        outcome.timestamps[commit.commit_id] = commit.author_time
                outcome.iac_commit_ids = tuple(outcome.commit_paths)
                outcome.program_paths = tuple(sorted(mined.iac_profile.program_paths))
                write_commits_ndjson(repo_out / "commits.ndjson", mined.commits)
                _write_repo_outcome(
                    repo_out, outcome, mined.profile, mined.verdict,
                    mined.iac_profile, mined.markers, done=False,
                )
        except (AcidError, OSError) as exc:
            outcome.error = str(exc)
        outcomes.append(outcome)
    return outcomes


def _repo_dirs(output_dir: Path) -> list[Path]:
    root = output_dir / "repos"
    if not root.is_dir():
        return []
    return sorted(p for p in root.iterdir() if p.is_dir())


def stage_classify(
    config: RunConfig, resolver_factory: Callable[[str], IssueResolver] | None = None
) -> int:
    """Classify previously mined repositories; returns the ECM count."""
    ruleset = load_rules(config.rule_file)
    if resolver_factory is None:
        client = IssueClient(
            cache_dir=config.resolved_cache_dir(),
            offline=config.offline,
            base_url=config.base_url,
        )
        resolver_factory = client.resolver
    total_ecms = 0
    for repo_out in _repo_dirs(config.output_dir):
        commits_path = repo_out / "commits.ndjson"
        meta_path = repo_out / "repo.json"
        if not commits_path.is_file() or not meta_path.is_file():
            continue
        meta = json.loads(meta_path.read_text("utf-8"))
        program_paths = frozenset(meta["program_paths"])
        iac_profile = RepoIacProfile(
            total_files=meta["total_files"],
            iac_files=meta["iac_files"],
            iac_ratio=meta["iac_files"] / max(1, meta["total_files"]),
            program_paths=program_paths,
        )
        markers = {d: iac.PlatformKind(v) for d, v in meta["marker_dirs"].items()}
        commits = read_commits_ndjson(commits_path)
        resolver = resolver_factory(repo_slug(meta["source"]))
        results, commit_paths, timestamps, ecms = classify_repo_commits(
            commits, iac_profile, markers, ruleset, resolver, config.ref_mode
        )
        write_results_ndjson(repo_out / "classifications.ndjson", results)
        meta["ecms_classified"] = ecms
        meta["iac_commit_ids"] = list(commit_paths)
        meta["commit_paths"] = {k: list(v) for k, v in commit_paths.items()}
        meta["timestamps"] = timestamps
        _atomic_write(meta_path, json.dumps(meta, ensure_ascii=False, indent=2) + "\n")
        total_ecms += ecms
    return total_ecms


def stage_analyze(config: RunConfig) -> MetricsReport:
    """Aggregate classified repositories into the corpus metrics reports."""
    outcomes: list[RepoOutcome] = []
    for repo_out in _repo_dirs(config.output_dir):
        meta_path = repo_out / "repo.json"
        results_path = repo_out / "classifications.ndjson"
        if not meta_path.is_file() or not results_path.is_file():
            continue
        meta = json.loads(meta_path.read_text("utf-8"))
        if not meta["verdict"]["accepted"]:
            continue
        prefix = repo_out.name.partition("-")[0]
        index = int(prefix) if prefix.isdigit() else 0
        outcome = RepoOutcome(name=meta["name"], source=meta["source"], index=index)
        outcomes.append(_load_repo_outcome(repo_out, outcome))
    report = aggregate(outcomes)
    write_reports(config, report)
    return report

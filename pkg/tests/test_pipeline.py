"""Tests for manifest parsing, artifact serialization, and pipeline runs."""

from __future__ import annotations

import json

import pytest

from acid.curation import CurationPolicy
from acid.engine import ClassificationResult
from acid.errors import ManifestUnreadable
from acid.pipeline import (
    ManifestEntry,
    RunConfig,
    load_manifest,
    parse_manifest,
    read_commits_ndjson,
    read_results_ndjson,
    repo_dir_name,
    repo_name,
    repo_slug,
    result_from_json,
    result_to_json,
    run,
    stage_analyze,
    stage_classify,
    stage_curate,
    stage_mine,
    write_commits_ndjson,
    write_results_ndjson,
)
from acid.taxonomy import parse_label
from acid.vcs import CommitRecord, FileChange, Hunk, list_commits

from conftest import build_synthetic_ten


class TestParseManifest:
    def test_minimal(self):
        text = "# corpus\n\n/data/repo-a\nhttps://github.com/o/n.git fork=true contributors=12\n"
        entries = parse_manifest(text)
        assert entries == [
            ManifestEntry(source="/data/repo-a"),
            ManifestEntry(source="https://github.com/o/n.git", fork=True, contributors=12),
        ]

    @pytest.mark.parametrize(
        "line, fragment",
        [
            ("/r fork", "expected key=value"),
            ("/r fork=maybe", "bad fork flag"),
            ("/r contributors=-3", "bad contributor count"),
            ("/r contributors=many", "bad contributor count"),
            ("/r stars=5", "unknown field"),
        ],
    )
    def test_malformed_lines(self, line, fragment):
        with pytest.raises(ManifestUnreadable, match=fragment):
            parse_manifest(line, path="corpus.txt")

    def test_error_carries_location(self):
        with pytest.raises(ManifestUnreadable, match=r"corpus\.txt:3"):
            parse_manifest("# ok\n/a\n/b stars=5\n", path="corpus.txt")

    def test_load_missing_file(self, tmp_path):
        with pytest.raises(ManifestUnreadable, match="cannot read manifest"):
            load_manifest(tmp_path / "absent.txt")

    @pytest.mark.parametrize(
        "source, slug",
        [
            ("https://github.com/owner/name", "owner/name"),
            ("https://github.com/owner/name.git", "owner/name"),
            ("https://github.com/owner/name/", "owner/name"),
            ("git@github.com:owner/name.git", "owner/name"),
            ("/var/data/checkout", ""),
            ("relative/checkout", ""),
        ],
    )
    def test_repo_slug(self, source, slug):
        assert repo_slug(source) == slug

    @pytest.mark.parametrize(
        "source, name",
        [
            ("https://github.com/owner/name.git", "name"),
            ("/var/data/checkout/", "checkout"),
            ("repo", "repo"),
        ],
    )
    def test_repo_name(self, source, name):
        assert repo_name(source) == name

    def test_repo_dir_name(self):
        assert repo_dir_name(7, "https://github.com/o/iac-lab.git") == "007-iac-lab"


class TestResultSerialization:
    def test_json_shape(self):
        result = ClassificationResult(
            "abc123",
            frozenset({parse_label("Security"), parse_label("Configuration Data/Network")}),
            evidence={
                "Security": ("fix ssl bug",),
                "Configuration Data/Network": ("fix ssl bug", "infra/app.ts: -port: 80"),
            },
        )
        data = result_to_json(result)
        assert data == {
            "commit_id": "abc123",
            "labels": ["Configuration Data/Network", "Security"],
            "evidence": {
                "Configuration Data/Network": ["fix ssl bug", "infra/app.ts: -port: 80"],
                "Security": ["fix ssl bug"],
            },
            "is_defect": True,
        }

    def test_round_trip_preserves_everything(self):
        result = ClassificationResult(
            "abc123",
            frozenset({parse_label("Syntax")}),
            evidence={"Syntax": ("fix typo",)},
        )
        assert result_from_json(result_to_json(result)) == result

    def test_no_defect_row(self):
        data = result_to_json(ClassificationResult("d4", frozenset()))
        assert data == {"commit_id": "d4", "labels": [], "evidence": {}, "is_defect": False}

    def test_ndjson_round_trip(self, tmp_path):
        results = [
            ClassificationResult(
                "a",
                frozenset({parse_label("Service/Panic")}),
                evidence={"Service/Panic": ("fix deploy crash",)},
            ),
            ClassificationResult("b", frozenset()),
        ]
        path = tmp_path / "r.ndjson"
        write_results_ndjson(path, results)
        assert read_results_ndjson(path) == results
        assert not list(tmp_path.glob("*.tmp"))

    def test_evidence_normalized_to_label_keys(self):
        # A label without recorded evidence comes back with an empty tuple,
        # so readers can always index evidence by label.
        bare = ClassificationResult("a", frozenset({parse_label("Syntax")}))
        restored = result_from_json(result_to_json(bare))
        assert restored.evidence == {"Syntax": ()}
        assert restored.labels == bare.labels

    def test_empty_ndjson(self, tmp_path):
        path = tmp_path / "r.ndjson"
        write_results_ndjson(path, [])
        assert path.read_text("utf-8") == ""
        assert read_results_ndjson(path) == []


class TestCommitSerialization:
    def test_round_trip(self, tmp_path):
        commits = [
            CommitRecord(
                commit_id="c1",
                author_id="a@example.com",
                author_time=1600000000,
                message="rename and patch",
                parents=("c0",),
                changes=(
                    FileChange(
                        path="infra/new.ts",
                        kind="renamed",
                        old_path="infra/old.ts",
                        hunks=(
                            Hunk(old_start=1, new_start=1, removed=("a",), added=("b", "c")),
                        ),
                    ),
                    FileChange(path="logo.png", kind="modified", is_binary=True),
                ),
            )
        ]
        path = tmp_path / "c.ndjson"
        write_commits_ndjson(path, commits)
        assert read_commits_ndjson(path) == commits


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    """A manifest over the ten-commit repository, plus a permissive policy."""
    root = tmp_path_factory.mktemp("pipeline")
    repo = build_synthetic_ten(root)
    manifest = root / "corpus.txt"
    manifest.write_text(f"{repo}\n", "utf-8")
    return root, manifest, repo


def make_config(manifest, out, **overrides) -> RunConfig:
    defaults = dict(
        manifest_path=manifest,
        output_dir=out,
        offline=True,
        policy=CurationPolicy(min_commits_per_month=0.0),
    )
    defaults.update(overrides)
    return RunConfig(**defaults)


@pytest.fixture(scope="module")
def first_run(corpus, tmp_path_factory):
    root, manifest, repo = corpus
    out = tmp_path_factory.mktemp("out-run")
    summary = run(make_config(manifest, out))
    return summary, out, repo


class TestRun:
    def test_summary_counts(self, first_run):
        summary, _, _ = first_run
        assert summary.accepted == ["synthetic-ten"]
        assert summary.rejected == []
        assert summary.failures == []
        assert summary.commits_scanned == 10
        assert summary.ecms_classified == 6
        assert sorted(summary.report_paths) == [
            "defects_per_year.csv",
            "metrics.csv",
            "metrics.json",
        ]

    def test_per_commit_labels(self, first_run, synthetic_ten):
        _, out, repo = first_run
        results = read_results_ndjson(out / "repos" / "000-synthetic-ten" / "classifications.ndjson")
        by_id = {r.commit_id: {str(l) for l in r.labels} for r in results}
        commits = list_commits(repo)
        expected_iac = [e for e in synthetic_ten.expected if e["iac"]]
        assert len(by_id) == len(expected_iac) == 9
        for commit, expected in zip(
            (c for c in commits if c.commit_id in by_id), expected_iac
        ):
            assert commit.message.strip() == expected["message"]
            assert by_id[commit.commit_id] == expected["labels"], expected["message"]

    def test_metrics_json_matches_hand_tallies(self, first_run):
        _, out, _ = first_run
        data = json.loads((out / "metrics.json").read_text("utf-8"))
        from conftest import SYNTHETIC_TEN_METRICS as M

        for name, frac in M["defect_proportion"].items():
            if name == "total":
                assert data["defect_proportion"]["total"] == pytest.approx(100 * frac, abs=0.01)
            else:
                assert data["defect_proportion"]["per_category"][name] == pytest.approx(
                    100 * frac, abs=0.01
                )
        for name, frac in M["script_proportion"].items():
            if name == "total":
                assert data["script_proportion"]["total"] == pytest.approx(100 * frac, abs=0.01)
            else:
                assert data["script_proportion"]["per_category"][name] == pytest.approx(
                    100 * frac, abs=0.01
                )
        assert data["colabel_histogram"] == {
            "0": pytest.approx(100 * 3 / 9, abs=0.01),
            "1": pytest.approx(100 * 4 / 9, abs=0.01),
            "2": pytest.approx(100 * 2 / 9, abs=0.01),
        }
        for parent, shares in M["subcategory_shares"].items():
            for sub, frac in shares.items():
                assert data["subcategory_shares"][parent][sub] == pytest.approx(
                    100 * frac, abs=0.01
                )
        assert data["defects_per_year"] == {
            cat: {str(y): n for y, n in series.items()}
            for cat, series in M["defects_per_year"].items()
        }

    def test_metrics_csv_totals_row(self, first_run):
        _, out, _ = first_run
        lines = (out / "metrics.csv").read_text("utf-8").splitlines()
        assert lines[0] == "Category,Defect Proportion (%),Script Proportion (%)"
        assert len(lines) == 10
        assert lines[-1] == "Total,66.67,100.00"

    def test_repo_json_inventory(self, first_run):
        _, out, _ = first_run
        meta = json.loads(
            (out / "repos" / "000-synthetic-ten" / "repo.json").read_text("utf-8")
        )
        assert meta["name"] == "synthetic-ten"
        assert meta["commits_scanned"] == 10
        assert meta["ecms_classified"] == 6
        assert len(meta["iac_commit_ids"]) == 9
        assert meta["verdict"] == {"accepted": True, "failed_criteria": []}
        assert meta["total_files"] == 5
        assert meta["iac_files"] == 3

    def test_done_marker_short_circuits_reprocessing(self, corpus, tmp_path):
        _, manifest, _ = corpus
        first = run(make_config(manifest, tmp_path))
        target = tmp_path / "repos" / "000-synthetic-ten" / "classifications.ndjson"
        lines = target.read_text("utf-8").splitlines()
        record = json.loads(lines[0])
        record["labels"], record["evidence"], record["is_defect"] = [], {}, False
        lines[0] = json.dumps(record)
        mutated = "\n".join(lines) + "\n"
        target.write_text(mutated, "utf-8")
        again = run(make_config(manifest, tmp_path))
        assert target.read_text("utf-8") == mutated
        assert again.ecms_classified == first.ecms_classified
        assert again.accepted == first.accepted

    def test_rejection_under_default_policy(self, corpus, tmp_path):
        _, manifest, _ = corpus
        summary = run(make_config(manifest, tmp_path, policy=CurationPolicy()))
        assert summary.accepted == []
        assert summary.rejected == [
            {"name": "synthetic-ten", "failed_criteria": ["min_commits_per_month"]}
        ]
        assert summary.report_paths == []
        assert not (tmp_path / "metrics.csv").exists()
        assert json.loads((tmp_path / "summary.json").read_text("utf-8"))["accepted"] == []

    def test_unreadable_repo_is_a_failure_not_a_crash(self, tmp_path):
        manifest = tmp_path / "corpus.txt"
        manifest.write_text(f"{tmp_path / 'void'}\n", "utf-8")
        summary = run(make_config(manifest, tmp_path / "out"))
        assert summary.accepted == []
        assert len(summary.failures) == 1
        assert summary.failures[0]["name"] == "void"
        assert "void" in summary.failures[0]["error"]

    def test_parallel_run_matches_serial(self, corpus, tmp_path):
        _, manifest, _ = corpus
        repo2 = build_synthetic_ten(tmp_path / "second")
        wide = tmp_path / "corpus.txt"
        wide.write_text(f"{tmp_path / 'second' / 'synthetic-ten'}\n{manifest.read_text('utf-8')}", "utf-8")
        serial = run(make_config(wide, tmp_path / "serial"))
        parallel = run(make_config(wide, tmp_path / "parallel", parallelism=4))
        assert parallel.accepted == serial.accepted
        assert parallel.ecms_classified == serial.ecms_classified
        assert (tmp_path / "parallel" / "metrics.csv").read_bytes() == (
            tmp_path / "serial" / "metrics.csv"
        ).read_bytes()


class TestStagedRun:
    def test_stages_reproduce_the_single_run(self, corpus, first_run, tmp_path):
        _, manifest, _ = corpus
        _, run_out, _ = first_run
        config = make_config(manifest, tmp_path)

        outcomes = stage_mine(config)
        assert [o.accepted for o in outcomes] == [True]
        repo_dir = tmp_path / "repos" / "000-synthetic-ten"
        assert (repo_dir / "commits.ndjson").is_file()
        assert not (repo_dir / ".done").exists()

        assert stage_classify(config) == 6
        report = stage_analyze(config)
        assert report.defect_proportion.total == pytest.approx(100 * 6 / 9)

        staged = (tmp_path / "metrics.csv").read_bytes()
        assert staged == (run_out / "metrics.csv").read_bytes()
        assert (repo_dir / "classifications.ndjson").read_bytes() == (
            run_out / "repos" / "000-synthetic-ten" / "classifications.ndjson"
        ).read_bytes()

    def test_stage_curate_writes_verdicts(self, corpus, tmp_path):
        _, manifest, _ = corpus
        rows = stage_curate(make_config(manifest, tmp_path, policy=CurationPolicy()))
        assert len(rows) == 1
        name, profile, verdict = rows[0]
        assert name == "synthetic-ten"
        assert profile.contributor_count == 10
        assert not verdict.accepted
        payload = json.loads((tmp_path / "curation.json").read_text("utf-8"))
        assert payload[0]["failed_criteria"] == ["min_commits_per_month"]

    def test_manifest_contributor_override_feeds_curation(self, corpus, tmp_path):
        _, _, repo = corpus
        manifest = tmp_path / "corpus.txt"
        manifest.write_text(f"{repo} contributors=3\n", "utf-8")
        rows = stage_curate(make_config(manifest, tmp_path))
        _, profile, verdict = rows[0]
        assert profile.contributor_count == 3
        assert "min_contributors" in verdict.failed_criteria

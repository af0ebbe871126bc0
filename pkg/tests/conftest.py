"""Shared fixtures: scripted repositories and the golden-60 corpus."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import pytest

from acid import iac
from acid.diffsignals import DiffSignals, detect_diff_signals
from acid.ecm import EnhancedCommitMessage
from acid.engine import ClassificationResult, classify_ecm
from acid.rules import RuleSet, default_rules
from acid.vcs import FileChange, Hunk

from gitutil import commit_all, epoch, init_repo, run_git, write_file

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def ruleset() -> RuleSet:
    return default_rules()


def signals_from_flags(flags: dict) -> DiffSignals:
    """Build a DiffSignals from rule-file signal names, with stub evidence."""
    from acid.rules import DIFF_SIGNAL_NAMES

    fields: dict = {}
    evidence: dict = {}
    for rule_name, value in flags.items():
        attr = DIFF_SIGNAL_NAMES[rule_name]
        fields[attr] = bool(value)
        if value:
            evidence[attr] = (("stub.ts", f"+{attr}"),)
    return DiffSignals(**fields, evidence=evidence)


# --- synthetic-ten: one repo, ten scripted commits ---------------------------

# Expected facts per commit, in history order.  added/removed are diff line
# counts; labels are the classifications the pipeline must produce; iac=False
# marks the one commit that touches no IaC program file.
SYNTHETIC_TEN_EXPECTED = [
    {
        "message": "initial pulumi program",
        "email": "a1@example.com",
        "files": {"README.md", "infra/Pulumi.yaml", "infra/index.ts"},
        "added": 6,
        "removed": 0,
        "year": 2019,
        "iac": True,
        "labels": set(),
    },
    {
        "message": "fix incorrect port mapping",
        "email": "a2@example.com",
        "files": {"infra/index.ts"},
        "added": 1,
        "removed": 1,
        "year": 2019,
        "iac": True,
        "labels": {"Configuration Data/Network"},
    },
    {
        "message": "add storage bucket resource",
        "email": "a3@example.com",
        "files": {"main.tf"},
        "added": 2,
        "removed": 0,
        "year": 2020,
        "iac": True,
        "labels": set(),
    },
    {
        "message": "update readme",
        "email": "a4@example.com",
        "files": {"README.md"},
        "added": 1,
        "removed": 0,
        "year": 2020,
        "iac": False,
        "labels": set(),
    },
    {
        "message": "fix missing dependency import",
        "email": "a5@example.com",
        "files": {"infra/index.ts"},
        "added": 1,
        "removed": 0,
        "year": 2020,
        "iac": True,
        "labels": {"Dependency"},
    },
    {
        "message": "introduce network host config",
        "email": "a6@example.com",
        "files": {"infra/net.ts"},
        "added": 1,
        "removed": 0,
        "year": 2021,
        "iac": True,
        "labels": set(),
    },
    {
        "message": "fix wrong gateway issue",
        "email": "a7@example.com",
        "files": {"infra/net.ts"},
        "added": 1,
        "removed": 1,
        "year": 2021,
        "iac": True,
        "labels": {"Configuration Data/Network"},
    },
    {
        "message": "fix typo in comment docs",
        "email": "a8@example.com",
        "files": {"main.tf"},
        "added": 1,
        "removed": 1,
        "year": 2021,
        "iac": True,
        "labels": {"Documentation", "Syntax"},
    },
    {
        "message": "fix user credential leak, rotate secret token",
        "email": "a9@example.com",
        "files": {"infra/index.ts"},
        "added": 1,
        "removed": 1,
        "year": 2022,
        "iac": True,
        "labels": {"Configuration Data/Credential", "Security"},
    },
    {
        "message": "fix service deploy error",
        "email": "a10@example.com",
        "files": {"main.tf"},
        "added": 1,
        "removed": 0,
        "year": 2022,
        "iac": True,
        "labels": {"Service/Panic", "Service/Resource"},
    },
]

# Corpus-level tallies for the same repo, worked out by hand from the table
# above: 9 IaC commits, programs {infra/index.ts, infra/net.ts, main.tf}.
SYNTHETIC_TEN_METRICS = {
    "defect_proportion": {
        "Conditional": 0.0,
        "Configuration Data": 3 / 9,
        "Dependency": 1 / 9,
        "Documentation": 1 / 9,
        "Idempotency": 0.0,
        "Security": 1 / 9,
        "Service": 1 / 9,
        "Syntax": 1 / 9,
        "total": 6 / 9,
    },
    "script_proportion": {
        "Conditional": 0.0,
        "Configuration Data": 2 / 3,
        "Dependency": 1 / 3,
        "Documentation": 1 / 3,
        "Idempotency": 0.0,
        "Security": 1 / 3,
        "Service": 1 / 3,
        "Syntax": 1 / 3,
        "total": 3 / 3,
    },
    "colabel_histogram": {0: 300 / 9, 1: 400 / 9, 2: 200 / 9},
    "defects_per_year": {
        "Configuration Data": {2019: 1, 2020: 0, 2021: 1, 2022: 1},
        "Dependency": {2019: 0, 2020: 1, 2021: 0, 2022: 0},
        "Documentation": {2019: 0, 2020: 0, 2021: 1, 2022: 0},
        "Security": {2019: 0, 2020: 0, 2021: 0, 2022: 1},
        "Service": {2019: 0, 2020: 0, 2021: 0, 2022: 1},
        "Syntax": {2019: 0, 2020: 0, 2021: 1, 2022: 0},
    },
    "subcategory_shares": {
        "Configuration Data": {"Credential": 1 / 3, "Network": 2 / 3},
        "Service": {"Panic": 1.0, "Resource": 1.0},
    },
}


@dataclass(frozen=True)
class SyntheticTen:
    path: Path
    expected: list


def build_synthetic_ten(root: Path) -> Path:
    repo = init_repo(root / "synthetic-ten")

    def commit(i: int, message: str, when: int) -> None:
        commit_all(repo, message, f"Author {i}", f"a{i}@example.com", when)

    write_file(repo, "infra/Pulumi.yaml", "name: demo\nruntime: nodejs\n")
    write_file(
        repo,
        "infra/index.ts",
        'const port = 8332;\nconst user = "admin";\nexport const stack = "demo";\n',
    )
    write_file(repo, "README.md", "# demo\n")
    commit(1, "initial pulumi program", epoch(2019, 3, 10, 10))

    write_file(
        repo,
        "infra/index.ts",
        'const port = 9650;\nconst user = "admin";\nexport const stack = "demo";\n',
    )
    commit(2, "fix incorrect port mapping", epoch(2019, 7, 15, 11))

    write_file(
        repo, "main.tf", '# storage bucket\nresource "aws_s3_bucket" "b" { bucket = "demo" }\n'
    )
    commit(3, "add storage bucket resource", epoch(2020, 2, 20, 9, 30))

    write_file(repo, "README.md", "# demo\nusage notes\n")
    commit(4, "update readme", epoch(2020, 6, 1, 14))

    write_file(
        repo,
        "infra/index.ts",
        'import * as aws from "@pulumi/aws";\n'
        'const port = 9650;\nconst user = "admin";\nexport const stack = "demo";\n',
    )
    commit(5, "fix missing dependency import", epoch(2020, 9, 9, 16, 45))

    write_file(repo, "infra/net.ts", 'const host = "10.0.0.1";\n')
    commit(6, "introduce network host config", epoch(2021, 1, 5, 8, 20))

    write_file(repo, "infra/net.ts", 'const host = "10.0.0.2";\n')
    commit(7, "fix wrong gateway issue", epoch(2021, 3, 3, 12))

    write_file(
        repo,
        "main.tf",
        '# primary storage bucket\nresource "aws_s3_bucket" "b" { bucket = "demo" }\n',
    )
    commit(8, "fix typo in comment docs", epoch(2021, 8, 21, 17, 30))

    write_file(
        repo,
        "infra/index.ts",
        'import * as aws from "@pulumi/aws";\n'
        'const port = 9650;\nconst user = "svc";\nexport const stack = "demo";\n',
    )
    commit(9, "fix user credential leak, rotate secret token", epoch(2022, 4, 11, 10, 10))

    write_file(
        repo,
        "main.tf",
        '# primary storage bucket\nresource "aws_s3_bucket" "b" { bucket = "demo" }\n'
        'resource "aws_s3_bucket" "logs" { bucket = "logs" }\n',
    )
    commit(10, "fix service deploy error", epoch(2022, 10, 30, 15))
    return repo


@pytest.fixture(scope="session")
def synthetic_ten(tmp_path_factory) -> SyntheticTen:
    repo = build_synthetic_ten(tmp_path_factory.mktemp("corpus"))
    return SyntheticTen(path=repo, expected=SYNTHETIC_TEN_EXPECTED)


# --- sparse-history: seven commits across five whole months -----------------


@pytest.fixture(scope="session")
def sparse_history(tmp_path_factory) -> Path:
    repo = init_repo(tmp_path_factory.mktemp("sparse") / "sparse-history")
    dates = [
        epoch(2021, 1, 10, 12),
        epoch(2021, 2, 1, 12),
        epoch(2021, 2, 20, 12),
        epoch(2021, 3, 15, 12),
        epoch(2021, 4, 1, 12),
        epoch(2021, 5, 5, 12),
        epoch(2021, 6, 10, 12),
    ]
    for i, when in enumerate(dates):
        write_file(repo, "counter.txt", f"{i}\n")
        commit_all(repo, f"tick {i}", "Author", "a@example.com", when)
    return repo


# --- golden-60 ---------------------------------------------------------------


@dataclass(frozen=True)
class GoldenCase:
    id: str
    year: int
    path: str
    text: str
    change: FileChange
    labels: frozenset


def load_golden60() -> tuple[list[GoldenCase], list[str]]:
    data = json.loads((FIXTURES / "golden60.json").read_text("utf-8"))
    cases = []
    for entry in data["entries"]:
        change = FileChange(
            path=entry["path"],
            kind="modified",
            hunks=(
                Hunk(1, 1, tuple(entry["diff"]["removed"]), tuple(entry["diff"]["added"])),
            ),
        )
        cases.append(
            GoldenCase(
                id=entry["id"],
                year=entry["year"],
                path=entry["path"],
                text=entry["text"],
                change=change,
                labels=frozenset(entry["labels"]),
            )
        )
    return cases, list(data["programs"])


def golden_signals(case: GoldenCase, ruleset: RuleSet) -> DiffSignals:
    tree = {"infra/Pulumi.yaml", case.path}
    markers = iac.build_marker_dirs(tree)
    kinds = {case.path: iac.classify_file(case.path, markers)}
    return detect_diff_signals([case.change], kinds, ruleset)


def golden_classify(case: GoldenCase, ruleset: RuleSet) -> ClassificationResult:
    ecm = EnhancedCommitMessage(
        commit_id=case.id, text=case.text, issue_refs=(), resolved_count=0
    )
    return classify_ecm(ecm, golden_signals(case, ruleset), ruleset)


@pytest.fixture(scope="session")
def golden60() -> list[GoldenCase]:
    return load_golden60()[0]


@pytest.fixture(scope="session")
def golden60_programs() -> list[str]:
    return load_golden60()[1]


@pytest.fixture(scope="session")
def golden60_results(golden60, ruleset) -> list[ClassificationResult]:
    return [golden_classify(case, ruleset) for case in golden60]

"""Classification of repository files into PL-IaC programs.

Platform membership is marker-driven: Pulumi.yaml/yml, cdk.json, and
cdktf.json mark their directory (and everything below) as belonging to that
platform, with the deepest marker winning.  Terraform HCL needs no marker,
the .tf extension is definitive.  Which languages count as programs for each
platform is read from data/platform_languages.cfg.
"""

from __future__ import annotations

import posixpath
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources
from typing import Iterable, Mapping

from acid.errors import EmptyTree
from acid.vcs import CommitRecord


class PlatformKind(Enum):
    PULUMI = "Pulumi"
    AWS_CDK = "AwsCdk"
    TERRAFORM_CDK = "TerraformCdk"
    TERRAFORM_HCL = "TerraformHcl"
    NOT_IAC = "NotIac"


class Language(Enum):
    TYPESCRIPT_LIKE = "TypeScript-like"
    PYTHON_LIKE = "Python-like"
    GO_LIKE = "Go-like"
    CSHARP_LIKE = "CSharp-like"
    JAVA_LIKE = "Java-like"
    FSHARP_LIKE = "F#-like"
    VB_LIKE = "VB-like"
    HCL = "HCL"
    UNKNOWN = "Unknown"


_LANGUAGE_BY_EXT: dict[str, Language] = {
    ".ts": Language.TYPESCRIPT_LIKE,
    ".tsx": Language.TYPESCRIPT_LIKE,
    ".mts": Language.TYPESCRIPT_LIKE,
    ".cts": Language.TYPESCRIPT_LIKE,
    ".js": Language.TYPESCRIPT_LIKE,
    ".jsx": Language.TYPESCRIPT_LIKE,
    ".mjs": Language.TYPESCRIPT_LIKE,
    ".cjs": Language.TYPESCRIPT_LIKE,
    ".py": Language.PYTHON_LIKE,
    ".go": Language.GO_LIKE,
    ".cs": Language.CSHARP_LIKE,
    ".java": Language.JAVA_LIKE,
    ".fs": Language.FSHARP_LIKE,
    ".fsx": Language.FSHARP_LIKE,
    ".vb": Language.VB_LIKE,
    ".tf": Language.HCL,
}

_MARKER_FILES: dict[str, PlatformKind] = {
    "Pulumi.yaml": PlatformKind.PULUMI,
    "Pulumi.yml": PlatformKind.PULUMI,
    "cdk.json": PlatformKind.AWS_CDK,
    "cdktf.json": PlatformKind.TERRAFORM_CDK,
}

# When one directory holds several markers the most specific platform wins.
_MARKER_PRECEDENCE = {
    PlatformKind.TERRAFORM_CDK: 2,
    PlatformKind.AWS_CDK: 1,
    PlatformKind.PULUMI: 0,
}

_PLATFORM_CFG_KEYS = {
    "pulumi": PlatformKind.PULUMI,
    "awscdk": PlatformKind.AWS_CDK,
    "cdktf": PlatformKind.TERRAFORM_CDK,
}


@dataclass(frozen=True)
class IacProgramKind:
    kind: PlatformKind
    language: Language

    @property
    def is_iac(self) -> bool:
        return self.kind is not PlatformKind.NOT_IAC


NOT_IAC = IacProgramKind(PlatformKind.NOT_IAC, Language.UNKNOWN)


@dataclass(frozen=True)
class RepoIacProfile:
    total_files: int
    iac_files: int
    iac_ratio: float
    program_paths: frozenset[str]


@lru_cache(maxsize=None)
def supported_extensions() -> dict[PlatformKind, frozenset[str]]:
    """Platform -> program extensions, from data/platform_languages.cfg."""
    text = resources.files("acid").joinpath("data/platform_languages.cfg").read_text("utf-8")
    table: dict[PlatformKind, frozenset[str]] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, value = line.partition("=")
        platform = _PLATFORM_CFG_KEYS.get(key.strip().lower())
        if platform is None:
            continue
        table[platform] = frozenset(value.split())
    return table


def build_marker_dirs(tree: Iterable[str]) -> dict[str, PlatformKind]:
    """Map each marker-bearing directory ('' for the root) to its platform."""
    markers: dict[str, PlatformKind] = {}
    for path in tree:
        name = posixpath.basename(path)
        platform = _MARKER_FILES.get(name)
        if platform is None:
            continue
        directory = posixpath.dirname(path)
        existing = markers.get(directory)
        if existing is None or _MARKER_PRECEDENCE[platform] > _MARKER_PRECEDENCE[existing]:
            markers[directory] = platform
    return markers


def _nearest_marker(path: str, marker_dirs: Mapping[str, PlatformKind]) -> PlatformKind | None:
    directory = posixpath.dirname(path)
    while True:
        if directory in marker_dirs:
            return marker_dirs[directory]
        if not directory:
            return None
        directory = posixpath.dirname(directory)


def classify_file(path: str, marker_dirs: Mapping[str, PlatformKind]) -> IacProgramKind:
    """Decide whether path is a PL-IaC program and for which platform."""
    ext = posixpath.splitext(path)[1].lower()
    if ext == ".tf":
        return IacProgramKind(PlatformKind.TERRAFORM_HCL, Language.HCL)
    language = _LANGUAGE_BY_EXT.get(ext)
    if language is None:
        return NOT_IAC
    platform = _nearest_marker(path, marker_dirs)
    if platform is None:
        return NOT_IAC
    if ext not in supported_extensions().get(platform, frozenset()):
        return IacProgramKind(PlatformKind.NOT_IAC, language)
    return IacProgramKind(platform, language)


def profile_repo(tree: Iterable[str]) -> RepoIacProfile:
    """Profile the head tree: how much of it is PL-IaC program code."""
    paths = list(tree)
    if not paths:
        raise EmptyTree("repository tree has no files")
    marker_dirs = build_marker_dirs(paths)
    program_paths = frozenset(p for p in paths if classify_file(p, marker_dirs).is_iac)
    total = len(paths)
    return RepoIacProfile(
        total_files=total,
        iac_files=len(program_paths),
        iac_ratio=len(program_paths) / max(1, total),
        program_paths=program_paths,
    )


def is_iac_commit(
    commit: CommitRecord,
    profile: RepoIacProfile,
    marker_dirs: Mapping[str, PlatformKind] | None = None,
) -> bool:
    """True iff the commit touches at least one PL-IaC program path.

    Paths absent from the head tree (deleted or renamed-away files) fall
    back to marker/extension classification.
    """
    markers = marker_dirs if marker_dirs is not None else {}
    for change in commit.changes:
        for path in (change.path, change.old_path):
            if path is None:
                continue
            if path in profile.program_paths or classify_file(path, markers).is_iac:
                return True
    return False

"""Repository inclusion criteria.

Four criteria, all inclusive thresholds: enough IaC code, not a fork or
clone, an active commit rate, and enough contributors.  The contributor
criterion can be switched off for small-team corpora.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class RepositoryProfile:
    iac_ratio: float
    is_fork_or_clone: bool
    commits_per_month: float
    contributor_count: int


@dataclass(frozen=True)
class CurationPolicy:
    min_iac_ratio: float = 0.11
    require_original: bool = True
    min_commits_per_month: float = 2.0
    min_contributors: int = 10
    enforce_contributors: bool = True


@dataclass(frozen=True)
class CurationVerdict:
    accepted: bool
    failed_criteria: tuple[str, ...]


def evaluate_repo(profile: RepositoryProfile, policy: CurationPolicy) -> CurationVerdict:
    """Check every enabled criterion; failures are reported by name."""
    failed: list[str] = []
    if profile.iac_ratio < policy.min_iac_ratio:
        failed.append("min_iac_ratio")
    if policy.require_original and profile.is_fork_or_clone:
        failed.append("require_original")
    if profile.commits_per_month < policy.min_commits_per_month:
        failed.append("min_commits_per_month")
    if policy.enforce_contributors and profile.contributor_count < policy.min_contributors:
        failed.append("min_contributors")
    return CurationVerdict(accepted=not failed, failed_criteria=tuple(failed))

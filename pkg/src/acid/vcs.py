"""Git history access built on the git CLI.

Commits come back in topological order, oldest first, each with its parsed
unified diff (zero context lines, renames detected).  Merge commits are
diffed against their first parent.
"""

from __future__ import annotations

import re
import subprocess
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

from acid.errors import CorruptObject, EmptyHistory, NotARepository


@dataclass(frozen=True)
class Hunk:
    old_start: int
    new_start: int
    removed: tuple[str, ...]
    added: tuple[str, ...]


@dataclass(frozen=True)
class FileChange:
    path: str
    kind: str  # added | deleted | modified | renamed
    hunks: tuple[Hunk, ...] = ()
    old_path: str | None = None
    is_binary: bool = False

    @property
    def added_lines(self) -> tuple[str, ...]:
        return tuple(line for h in self.hunks for line in h.added)

    @property
    def removed_lines(self) -> tuple[str, ...]:
        return tuple(line for h in self.hunks for line in h.removed)


@dataclass(frozen=True)
class CommitRecord:
    commit_id: str
    author_id: str
    author_time: int
    message: str
    parents: tuple[str, ...]
    changes: tuple[FileChange, ...]

    @property
    def is_merge(self) -> bool:
        return len(self.parents) > 1


def _run_git(repo_path: str | Path, *args: str, input_bytes: bytes | None = None) -> bytes:
    proc = subprocess.run(
        ["git", "-C", str(repo_path), *args],
        input=input_bytes,
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
    )
    if proc.returncode != 0:
        stderr = proc.stderr.decode("utf-8", "replace").strip()
        raise CorruptObject(" ".join(args[:1]), stderr or f"git exited {proc.returncode}")
    return proc.stdout


def _require_repo(repo_path: str | Path) -> None:
    proc = subprocess.run(
        ["git", "-C", str(repo_path), "rev-parse", "--git-dir"],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
    )
    if proc.returncode != 0:
        raise NotARepository(f"not a git repository: {repo_path}")


def clone(url: str, dest: str | Path) -> Path:
    """Clone url into dest and return dest."""
    proc = subprocess.run(
        ["git", "clone", "--quiet", url, str(dest)],
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
    )
    if proc.returncode != 0:
        raise NotARepository(
            f"clone of {url} failed: {proc.stderr.decode('utf-8', 'replace').strip()}"
        )
    return Path(dest)


def head_tree_paths(repo_path: str | Path, ref: str = "HEAD") -> list[str]:
    """All file paths in the tree at ref; [] for an unborn HEAD."""
    _require_repo(repo_path)
    proc = subprocess.run(
        ["git", "-C", str(repo_path), "ls-tree", "-r", "--name-only", "-z", ref],
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
    )
    if proc.returncode != 0:
        return []
    out = proc.stdout.decode("utf-8", "replace")
    return [p for p in out.split("\0") if p]


# --- commit metadata -------------------------------------------------------


def _parse_commit_object(commit_id: str, raw: bytes) -> tuple[str, int, str, tuple[str, ...]]:
    """Return (author_id, author_time, message, parents) from a raw commit."""
    text = raw.decode("utf-8", "replace")
    head, _, message = text.partition("\n\n")
    parents: list[str] = []
    author_id = ""
    author_time = 0
    for line in head.splitlines():
        if line.startswith("parent "):
            parents.append(line[7:].strip())
        elif line.startswith("author "):
            value = line[7:]
            # "Name <email> 1610000000 +0000"
            m = re.match(r"^(.*)<([^>]*)>\s+(\d+)\s+[+-]\d{4}$", value)
            if not m:
                raise CorruptObject(commit_id, f"unparseable author line: {value!r}")
            author_id = m.group(2).strip()
            author_time = int(m.group(3))
    if not author_id and not author_time:
        raise CorruptObject(commit_id, "commit object has no author line")
    return author_id, author_time, message, tuple(parents)


def _batch_read_commits(
    repo_path: str | Path, commit_ids: Sequence[str]
) -> dict[str, tuple[str, int, str, tuple[str, ...]]]:
    if not commit_ids:
        return {}
    payload = ("\n".join(commit_ids) + "\n").encode("ascii")
    out = _run_git(repo_path, "cat-file", "--batch", input_bytes=payload)
    parsed: dict[str, tuple[str, int, str, tuple[str, ...]]] = {}
    pos = 0
    while pos < len(out):
        nl = out.index(b"\n", pos)
        header = out[pos:nl].decode("ascii", "replace")
        pos = nl + 1
        parts = header.split()
        if len(parts) == 2 and parts[1] == "missing":
            raise CorruptObject(parts[0], "object missing from repository")
        if len(parts) != 3 or parts[1] != "commit":
            raise CorruptObject(parts[0] if parts else "?", f"unexpected cat-file header: {header!r}")
        sha, _, size = parts
        raw = out[pos : pos + int(size)]
        pos += int(size) + 1  # trailing newline after the object body
        parsed[sha] = _parse_commit_object(sha, raw)
    return parsed


# --- diff parsing ----------------------------------------------------------

_HUNK_RE = re.compile(r"^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@")
_BINARY_RE = re.compile(r"^Binary files .* differ$")


def _unquote_path(path: str) -> str:
    if path.startswith('"') and path.endswith('"') and len(path) >= 2:
        return path[1:-1].encode("latin-1", "backslashreplace").decode("unicode_escape")
    return path


def _strip_prefix(path: str) -> str:
    return path[2:] if path.startswith(("a/", "b/")) else path


def parse_patch(patch: str) -> tuple[FileChange, ...]:
    """Parse `git diff ... -p -U0 -M` output into FileChange records."""
    changes: list[FileChange] = []

    cur_old: str | None = None
    cur_new: str | None = None
    cur_kind = "modified"
    cur_binary = False
    cur_rename_old: str | None = None
    hunks: list[Hunk] = []
    removed: list[str] = []
    added: list[str] = []
    hunk_header: tuple[int, int] | None = None
    in_file = False

    def flush_hunk() -> None:
        nonlocal hunk_header
        if hunk_header is not None:
            hunks.append(Hunk(hunk_header[0], hunk_header[1], tuple(removed), tuple(added)))
        removed.clear()
        added.clear()
        hunk_header = None

    def flush_file() -> None:
        nonlocal in_file, cur_old, cur_new, cur_kind, cur_binary, cur_rename_old
        flush_hunk()
        if in_file:
            if cur_kind == "deleted":
                path = cur_old or cur_new or ""
            else:
                path = cur_new or cur_old or ""
            old_path = cur_rename_old if cur_kind == "renamed" else None
            changes.append(
                FileChange(
                    path=path,
                    kind=cur_kind,
                    hunks=tuple(hunks),
                    old_path=old_path,
                    is_binary=cur_binary,
                )
            )
        hunks.clear()
        in_file = False
        cur_old = cur_new = cur_rename_old = None
        cur_kind = "modified"
        cur_binary = False

    for line in patch.splitlines():
        if line.startswith("diff --git "):
            flush_file()
            in_file = True
        elif not in_file:
            continue
        elif line.startswith("new file mode"):
            cur_kind = "added"
        elif line.startswith("deleted file mode"):
            cur_kind = "deleted"
        elif line.startswith("rename from "):
            cur_kind = "renamed"
            cur_rename_old = _unquote_path(line[len("rename from ") :])
        elif line.startswith("rename to "):
            cur_new = _unquote_path(line[len("rename to ") :])
        elif line.startswith("--- "):
            target = _unquote_path(line[4:])
            if target != "/dev/null":
                cur_old = _strip_prefix(target)
        elif line.startswith("+++ "):
            target = _unquote_path(line[4:])
            if target != "/dev/null":
                cur_new = _strip_prefix(target)
        elif _BINARY_RE.match(line):
            cur_binary = True
        elif line.startswith("@@"):
            m = _HUNK_RE.match(line)
            if m:
                flush_hunk()
                hunk_header = (int(m.group(1)), int(m.group(3)))
        elif hunk_header is not None:
            if line.startswith("+"):
                added.append(line[1:])
            elif line.startswith("-"):
                removed.append(line[1:])
            # "\ No newline at end of file" and anything else: ignore
    flush_file()
    return tuple(changes)


def _commit_changes(repo_path: str | Path, sha: str, parents: tuple[str, ...]) -> tuple[FileChange, ...]:
    base = ["diff-tree", "--no-commit-id", "-r", "-p", "-U0", "-M"]
    if parents:
        args = base + [parents[0], sha]
    else:
        args = base + ["--root", sha]
    out = _run_git(repo_path, *args)
    return parse_patch(out.decode("utf-8", "replace"))


# --- public API ------------------------------------------------------------


def list_commits(
    repo_path: str | Path,
    ref: str | None = None,
    include_merges: bool = True,
) -> list[CommitRecord]:
    """All commits reachable from ref, oldest first in topological order."""
    _require_repo(repo_path)
    target = ref or "HEAD"
    probe = subprocess.run(
        ["git", "-C", str(repo_path), "rev-parse", "--verify", "--quiet", f"{target}^{{commit}}"],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
    )
    if probe.returncode != 0:
        if ref is None:
            return []  # unborn HEAD: a repo with no commits has an empty history
        raise CorruptObject(target, "ref does not resolve to a commit")
    out = _run_git(repo_path, "rev-list", "--topo-order", "--reverse", target)
    shas = out.decode("ascii", "replace").split()
    meta = _batch_read_commits(repo_path, shas)
    records: list[CommitRecord] = []
    for sha in shas:
        author_id, author_time, message, parents = meta[sha]
        if not include_merges and len(parents) > 1:
            continue
        changes = _commit_changes(repo_path, sha, parents)
        records.append(
            CommitRecord(
                commit_id=sha,
                author_id=author_id,
                author_time=author_time,
                message=message,
                parents=parents,
                changes=changes,
            )
        )
    return records


def contributor_count(commits: Iterable[CommitRecord]) -> int:
    return len({c.author_id for c in commits})


def commits_per_month(commits: Sequence[CommitRecord]) -> float:
    """Commit rate over the history's span in whole calendar months.

    The span is rounded up to the next whole month unless first and last
    commit fall on the same day-of-month and time; a history entirely inside
    one month counts as one.
    """
    if not commits:
        raise EmptyHistory("cannot compute a commit rate for an empty history")
    times = [c.author_time for c in commits]
    first = datetime.fromtimestamp(min(times), tz=timezone.utc)
    last = datetime.fromtimestamp(max(times), tz=timezone.utc)
    months_diff = (last.year - first.year) * 12 + (last.month - first.month)
    first_key = (first.day, first.hour, first.minute, first.second)
    last_key = (last.day, last.hour, last.minute, last.second)
    whole = months_diff - 1 if last_key < first_key else months_diff
    months = max(1, whole if last_key == first_key else whole + 1)
    return len(commits) / months

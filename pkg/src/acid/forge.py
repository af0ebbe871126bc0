"""Cached client for a GitHub-compatible issues API.

Responses are cached one file per issue so corpus runs are resumable and
re-runs work fully offline.  Cache writes are atomic (temp file + rename)
and at most `max_concurrency` requests are in flight at a time.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
import threading
import time
from pathlib import Path
from typing import Callable

import requests

from acid.ecm import IssueRef, IssueResolver, IssueText
from acid.errors import AuthRequired, RateLimited

log = logging.getLogger(__name__)

TOKEN_ENV_VAR = "ACID_FORGE_TOKEN"
DEFAULT_BASE_URL = "https://api.github.com"


def _cache_file(cache_dir: Path, slug: str, number: int) -> Path:
    return cache_dir / slug.replace("/", "__") / f"issue-{number}.json"


class IssueClient:
    """Fetch issue title/body with a file cache in front of the API."""

    def __init__(
        self,
        cache_dir: str | Path,
        offline: bool = False,
        base_url: str = DEFAULT_BASE_URL,
        token: str | None = None,
        max_concurrency: int = 4,
        session: requests.Session | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.cache_dir = Path(cache_dir)
        self.offline = offline
        self.base_url = base_url.rstrip("/")
        self.token = token if token is not None else os.environ.get(TOKEN_ENV_VAR)
        self._session = session or requests.Session()
        self._gate = threading.Semaphore(max_concurrency)
        self._sleep = sleep

    def fetch_issue(self, ref: IssueRef, repo_slug_default: str = "") -> IssueText | None:
        """Cached issue text, or None when the issue cannot be resolved."""
        slug = ref.repo_slug or repo_slug_default
        if not slug:
            return None
        cached = self._read_cache(slug, ref.issue_number)
        if cached is not None:
            return cached
        if self.offline:
            return None
        return self._fetch_live(slug, ref.issue_number)

    def resolver(self, repo_slug_default: str = "") -> IssueResolver:
        return lambda ref: self.fetch_issue(ref, repo_slug_default)

    def _read_cache(self, slug: str, number: int) -> IssueText | None:
        path = _cache_file(self.cache_dir, slug, number)
        if not path.is_file():
            return None
        try:
            data = json.loads(path.read_text("utf-8"))
        except (OSError, ValueError):
            return None
        return IssueText(title=data.get("title") or "", body=data.get("body") or "")

    def _write_cache(self, slug: str, number: int, payload: dict) -> None:
        path = _cache_file(self.cache_dir, slug, number)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(payload, fh, ensure_ascii=False)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def _fetch_live(self, slug: str, number: int) -> IssueText | None:
        url = f"{self.base_url}/repos/{slug}/issues/{number}"
        for attempt in range(3):
            try:
                return self._request(slug, number, url)
            except RateLimited as exc:
                if attempt == 2:
                    log.warning("rate limited fetching %s#%s, giving up", slug, number)
                    return None
                self._sleep(exc.retry_after)
        return None

    def _request(self, slug: str, number: int, url: str) -> IssueText | None:
        headers = {"Accept": "application/vnd.github+json"}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        with self._gate:
            try:
                resp = self._session.get(url, headers=headers, timeout=30)
            except requests.RequestException as exc:
                log.warning("fetching %s#%s failed: %s", slug, number, exc)
                return None
        if resp.status_code == 200:
            try:
                payload = resp.json()
            except ValueError:
                return None
            self._write_cache(slug, number, payload)
            return IssueText(title=payload.get("title") or "", body=payload.get("body") or "")
        if resp.status_code == 404:
            return None
        if resp.status_code == 401:
            raise AuthRequired(f"forge rejected the request for {slug}#{number}; set {TOKEN_ENV_VAR}")
        if resp.status_code == 429 or (
            resp.status_code == 403 and resp.headers.get("X-RateLimit-Remaining") == "0"
        ):
            raise RateLimited(retry_after=float(resp.headers.get("Retry-After", "1") or "1"))
        log.warning("unexpected status %s for %s#%s", resp.status_code, slug, number)
        return None

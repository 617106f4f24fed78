"""Live corpus retrieval from the scholarly works API.

Cursor-paginated GET requests against the works endpoint, with bounded
exponential backoff on 429/5xx, local re-checking of the phrase filter, and
deduplication by work id.  The transport is injectable so recorded fixtures
can replay a harvest offline.
"""

from __future__ import annotations

import calendar
import logging
import time
from datetime import datetime, timezone
from typing import Callable, Optional, Sequence

from .corpus import (
    Corpus,
    Document,
    YearMonth,
    matches_query,
    reconstruct_abstract,
)
from .errors import ConfigurationError, CursorLoopError, FetchError

logger = logging.getLogger(__name__)

WORKS_URL = "https://api.openalex.org/works"
SELECT_FIELDS = "id,display_name,abstract_inverted_index,publication_year,publication_date"

MAX_ATTEMPTS = 5
RETRY_STATUSES = {429, 500, 502, 503, 504}

# transport(params) -> (status_code, parsed_json)
Transport = Callable[[dict], tuple[int, dict]]


def _requests_transport(url: str = WORKS_URL, timeout: float = 60.0) -> Transport:
    import requests

    session = requests.Session()

    def call(params: dict) -> tuple[int, dict]:
        resp = session.get(url, params=params, timeout=timeout)
        try:
            payload = resp.json() if resp.content else {}
        except ValueError:
            payload = {}
        return resp.status_code, payload

    return call


def build_filter(phrases: Sequence[str], date_from: YearMonth, date_to: YearMonth) -> str:
    """Filter expression: phrase OR-search over title+abstract plus date range."""
    joined = "|".join(f'"{p}"' for p in phrases)
    from_day = f"{date_from[0]:04d}-{date_from[1]:02d}-01"
    last = calendar.monthrange(date_to[0], date_to[1])[1]
    to_day = f"{date_to[0]:04d}-{date_to[1]:02d}-{last:02d}"
    return (
        f"title_and_abstract.search:{joined},"
        f"from_publication_date:{from_day},to_publication_date:{to_day}"
    )


def _short_id(raw: str) -> str:
    return raw.rstrip("/").rsplit("/", 1)[-1] if "/" in raw else raw


def _parse_work(work: dict) -> Optional[Document]:
    """Map one API record onto a Document; None when the id is missing."""
    raw_id = work.get("id") or ""
    if not raw_id:
        return None
    title = work.get("display_name") or ""
    inverted = work.get("abstract_inverted_index") or {}
    abstract = reconstruct_abstract(inverted)
    year = work.get("publication_year") or 0
    month: Optional[int] = None
    date = work.get("publication_date") or ""
    if len(date) >= 7 and date[4] == "-":
        try:
            month = int(date[5:7])
        except ValueError:
            month = None
    return Document(
        id=_short_id(raw_id), title=title, abstract=abstract, year=int(year), month=month
    )


def _get_page(
    transport: Transport,
    params: dict,
    sleep: Callable[[float], None],
) -> dict:
    delay = 1.0
    last_status = None
    for attempt in range(1, MAX_ATTEMPTS + 1):
        try:
            status, payload = transport(params)
        except Exception as exc:  # connection-level failure
            raise FetchError(f"transport failure: {exc}") from exc
        if status == 200:
            return payload
        last_status = status
        if status in RETRY_STATUSES and attempt < MAX_ATTEMPTS:
            logger.warning(
                "fetch: HTTP %s, retrying in %.1fs (attempt %d/%d)",
                status, delay, attempt, MAX_ATTEMPTS,
            )
            sleep(delay)
            delay *= 2
            continue
        break
    raise FetchError(f"fetch failed after retries, last HTTP status {last_status}")


def fetch_corpus(
    phrases: Sequence[str],
    date_from: YearMonth,
    date_to: YearMonth,
    page_size: int = 200,
    politeness_contact: Optional[str] = None,
    transport: Optional[Transport] = None,
    sleep: Callable[[float], None] = time.sleep,
    max_pages: Optional[int] = None,
) -> Corpus:
    """Traverse all result pages by cursor and assemble a clean corpus.

    Every returned document is re-checked against matches_query locally,
    deduplicated by id and finally sorted by id so page arrival order does
    not leak into the persisted corpus.  Seeing the same cursor twice raises
    CursorLoopError; max_pages bounds smoke-test harvests.
    """
    if not phrases:
        raise ConfigurationError("fetch requires at least one query phrase")
    if date_from > date_to:
        raise ConfigurationError(
            f"invalid date range: from {date_from} is after to {date_to}"
        )
    if page_size < 1:
        raise ConfigurationError("page size must be positive")
    if transport is None:
        transport = _requests_transport()

    params = {
        "filter": build_filter(phrases, date_from, date_to),
        "per-page": page_size,
        "select": SELECT_FIELDS,
        "cursor": "*",
    }
    if politeness_contact:
        params["mailto"] = politeness_contact

    docs: dict[str, Document] = {}
    dropped = 0
    undated = 0
    seen_cursors = {"*"}
    pages = 0
    while True:
        payload = _get_page(transport, dict(params), sleep)
        pages += 1
        for work in payload.get("results") or []:
            doc = _parse_work(work)
            if doc is None:
                continue
            if doc.year < 1000:  # keep the cache loadable
                undated += 1
                continue
            if not matches_query(doc, phrases):
                dropped += 1
                continue
            docs.setdefault(doc.id, doc)  # first occurrence wins
        cursor = (payload.get("meta") or {}).get("next_cursor")
        if not cursor:
            break
        if cursor in seen_cursors:
            raise CursorLoopError(f"cursor {cursor!r} repeated; aborting pagination")
        seen_cursors.add(cursor)
        params["cursor"] = cursor
        if max_pages is not None and pages >= max_pages:
            logger.info("fetch: stopping after %d pages (max_pages)", pages)
            break

    if dropped:
        logger.info("fetch: dropped %d records failing the local phrase re-check", dropped)
    if undated:
        logger.info("fetch: dropped %d records without a usable publication year", undated)
    documents = sorted(docs.values(), key=lambda d: d.id)
    logger.info("fetch: %d documents across %d pages", len(documents), pages)
    return Corpus(
        documents=documents,
        query_phrases=list(phrases),
        date_range=(date_from, date_to),
        retrieved_at=datetime.now(timezone.utc).isoformat(),
    )

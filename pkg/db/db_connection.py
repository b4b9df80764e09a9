"""
Engine and session handling for the benchmark result store.

DATABASE_URL (environment or .env) selects the backend. Without it results go
to a SQLite file under data/; a PostgreSQL URL works the same way.

Usage:
    with session_scope() as session:
        store_experiment_result(session, result)
"""

import logging
import os
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional

from dotenv import load_dotenv
from sqlalchemy import Engine, create_engine
from sqlalchemy.orm import Session, sessionmaker

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)

DEFAULT_DATABASE_URL = "sqlite:///data/dpp_impute.db"
DATABASE_URL = os.getenv("DATABASE_URL", DEFAULT_DATABASE_URL)

_SQLITE_PREFIX = "sqlite:///"


def create_db_engine(url: Optional[str] = None) -> Engine:
    """
    Build an engine for url (DATABASE_URL when omitted).

    For SQLite files the parent directory is created first.
    """
    url = url or DATABASE_URL
    if url.startswith(_SQLITE_PREFIX) and url != f"{_SQLITE_PREFIX}:memory:":
        Path(url[len(_SQLITE_PREFIX):]).parent.mkdir(parents=True, exist_ok=True)
    return create_engine(url, echo=False)


def get_session_factory(engine: Optional[Engine] = None) -> sessionmaker:
    # objects stay readable after commit so callers can report run ids
    return sessionmaker(bind=engine or get_engine(), expire_on_commit=False)


def get_db_session(engine: Optional[Engine] = None) -> Session:
    """New session on engine (the shared engine when omitted). The caller closes it."""
    return get_session_factory(engine)()


@contextmanager
def session_scope(engine: Optional[Engine] = None) -> Iterator[Session]:
    """Session that commits on success, rolls back on error and always closes."""
    session = get_db_session(engine)
    try:
        yield session
        session.commit()
    except Exception:
        session.rollback()
        raise
    finally:
        session.close()


_engine: Optional[Engine] = None


def get_engine() -> Engine:
    """Shared engine for DATABASE_URL, created on first use."""
    global _engine
    if _engine is None:
        logger.debug(f"Creating engine for {DATABASE_URL}")
        _engine = create_db_engine()
    return _engine

"""
Create (or drop) the result store tables.

Tables come from db/models.py; SQLite and PostgreSQL both work. Existing
tables are left untouched by create.

Usage:
    python db/create_tables.py
    python db/create_tables.py --url sqlite:///reports/results.db
    python db/create_tables.py --drop
"""

import argparse
import logging
import sys
from pathlib import Path

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from sqlalchemy import Engine, inspect, text  # noqa: E402

from common.logs import configure_logging  # noqa: E402
from db.db_connection import DATABASE_URL, create_db_engine  # noqa: E402
from db.models import Base  # noqa: E402

logger = logging.getLogger(__name__)


def _redacted(url: str) -> str:
    # hide credentials of server URLs
    return url.split("@")[1] if "@" in url else url


def create_tables(engine: Engine) -> None:
    with engine.connect() as conn:
        conn.execute(text("SELECT 1"))
    existing = set(inspect(engine).get_table_names())
    Base.metadata.create_all(engine)
    for name in Base.metadata.tables:
        logger.info(f"  {name}{' (already present)' if name in existing else ''}")
    logger.info("Result store tables ready")


def drop_tables(engine: Engine) -> bool:
    """Drop every table after the user types 'yes'. Returns whether tables were dropped."""
    answer = input("This deletes every stored benchmark result. Type 'yes' to continue: ")
    if answer.strip().lower() != "yes":
        logger.info("Drop cancelled")
        return False
    Base.metadata.drop_all(engine)
    logger.info(f"Dropped {len(Base.metadata.tables)} tables")
    return True


def main():
    parser = argparse.ArgumentParser(description="Create or drop the benchmark result store tables")
    parser.add_argument("--url", default=None, help="Database URL (default: DATABASE_URL)")
    parser.add_argument("--drop", action="store_true", help="Drop all tables instead (destructive)")
    args = parser.parse_args()

    configure_logging()
    url = args.url or DATABASE_URL
    logger.info(f"Database: {_redacted(url)}")
    try:
        engine = create_db_engine(url)
        if args.drop:
            drop_tables(engine)
        else:
            create_tables(engine)
    except Exception as e:
        logger.error(f"Database setup failed: {e}")
        logger.error("Check DATABASE_URL in your .env file and that requirements are installed")
        sys.exit(1)


if __name__ == "__main__":
    main()

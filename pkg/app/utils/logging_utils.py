import logging

from app.core.config import settings


def setup_logging(level: str | None = None) -> None:
    """
    Set up logging configuration for the simulator, CLI and API.
    """
    logging.basicConfig(
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        level=getattr(logging, (level or settings.LOG_LEVEL).upper(), logging.INFO),
    )

import logging
import sys

from dotenv import load_dotenv

from utilities import envs

load_dotenv()

from app.commands import cli

log = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def init_loggers():
    log_level = logging._nameToLevel.get(envs.get_log_level(), logging.INFO)
    logging.basicConfig(level=log_level, format=LOG_FORMAT, stream=sys.stderr)
    logging.getLogger().setLevel(log_level)

    asyncio_logger = logging.getLogger("asyncio")
    asyncio_logger.setLevel(logging.WARNING)

    logging.info(
        f"Initialized root logger with level {logging.getLevelName(logging.root.level)}"
    )


def main():
    init_loggers()
    log.debug(f"Environment: {envs.get_env()}")
    cli()


if __name__ == "__main__":
    main()

import logging
import sys

from src.api.router import dispatch
from src.common import get_settings


def main() -> int:
    settings = get_settings()
    logging.basicConfig(
        level=settings.log_level.upper(),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    return dispatch(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())

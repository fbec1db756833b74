# === FILE: cagsr/main.py ===
import sys

import click

from cagsr.cli.app import EXIT_USAGE, app


def main() -> None:
    # click reports usage errors with code 2; they are configuration mistakes here
    try:
        code = app(standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        sys.exit(EXIT_USAGE)
    except click.Abort:
        sys.exit(EXIT_USAGE)
    sys.exit(code if isinstance(code, int) else 0)


if __name__ == "__main__":
    main()

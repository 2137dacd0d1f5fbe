"""Entry point for python -m fibtheta."""

import sys


def main():
    from fibtheta.cli import main as cli_main
    sys.exit(cli_main())


if __name__ == "__main__":
    main()

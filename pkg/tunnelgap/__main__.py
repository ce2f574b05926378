"""Module entrypoint for `python -m tunnelgap`."""

from __future__ import annotations

from tunnelgap.cli import main


if __name__ == "__main__":
    raise SystemExit(main())

"""Module entry point: ``python -m resodec``."""

from .cli import main

if __name__ == "__main__":
    main()

"""Entry point for python -m cskit."""

from cskit.cli import main

if __name__ == "__main__":
    main()

"""Allow running as python -m color_oracle."""

from color_oracle.cli import main

if __name__ == "__main__":
    main()

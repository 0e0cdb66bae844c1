"""Quick runner: `python src/run.py <subcommand> ...` without installing anything."""
import os
import sys

sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from main import main

if __name__ == "__main__":
    main()

"""
Standalone entrypoint for the task-world engine.

Run locally:  python app.py bench --jobs 4 --out out/bench
Same as:      python -m taskworld bench --jobs 4 --out out/bench
"""

import sys

from taskworld.cli import main

if __name__ == "__main__":
    sys.exit(main())

import sys
from pathlib import Path

# make sibling test helpers (brute.py, genhes.py) importable as plain modules
sys.path.insert(0, str(Path(__file__).parent))

import sys
from pathlib import Path

# Make the top-level packages importable from tests and scripts
sys.path.insert(0, str(Path(__file__).parent))

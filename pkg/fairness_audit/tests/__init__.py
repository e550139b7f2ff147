from pathlib import Path

SAMPLE_DATA = Path(__file__).resolve().parent.parent / 'sample_data'

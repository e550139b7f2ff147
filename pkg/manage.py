#!/usr/bin/env python
"""paritylens command-line utility: fairness audits and hiring-model analysis."""
import os
import sys


def normalize_command_name(argv):
    """Accept hyphenated command names (sd-rates) for the underscore modules (sd_rates)."""
    if len(argv) > 1 and not argv[1].startswith('-'):
        argv = [argv[0], argv[1].replace('-', '_'), *argv[2:]]
    return argv


def main():
    """Run paritylens commands."""
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'paritylens.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Are you sure it's installed and "
            "available on your PYTHONPATH environment variable? Did you "
            "forget to activate a virtual environment?"
        ) from exc
    execute_from_command_line(normalize_command_name(sys.argv))


if __name__ == '__main__':
    main()

"""
The `atlas` entry point: `python atlas.py --help` lists the commands.
"""

from wander_atlas.cli.commands import atlas


if __name__ == "__main__":
    atlas()

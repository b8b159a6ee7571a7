"""
Runner modules - command-line entry points.

- cli.py: validate, fold, score, render, session and bench subcommands
"""

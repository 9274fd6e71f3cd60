"""Convergence studies, verification suites and the command-line front end."""

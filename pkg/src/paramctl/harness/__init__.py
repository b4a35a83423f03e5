"""Experiment configuration, replication, statistics, CSV output and the CLI."""

"""Experiment harness: data, downstream classifier, evaluation protocol, reports and CLI."""

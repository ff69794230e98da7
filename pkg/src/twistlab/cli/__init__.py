"""Command-line runner: scenarios, file verbs, reports."""

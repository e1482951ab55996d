"""Shared plumbing: domain errors, bit-vector helpers and CLI parsing."""

"""Exact twist calculus on finite group algebras."""

"""Verification workflow: check groups as LangGraph nodes."""

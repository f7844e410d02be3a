"""Tests for MCP Readiness Scanner."""

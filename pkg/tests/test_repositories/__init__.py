"""Unit tests for repository implementations."""
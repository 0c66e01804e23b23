"""
Test suite for TrustKey.

This package contains unit tests, property tests, and integration tests
for the trust tree, the lookup table, rekeying, the simulator and the CLI.
"""

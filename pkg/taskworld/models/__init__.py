"""Shared domain types used across the scene, world, planning and evolution layers."""

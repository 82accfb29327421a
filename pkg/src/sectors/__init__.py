"""Sector enumeration and closed-form counting."""

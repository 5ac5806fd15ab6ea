"""Desk-scale replay of the constructive steps of the Gelfond-Schneider proof."""

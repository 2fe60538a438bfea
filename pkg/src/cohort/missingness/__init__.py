"""Missingness forensics over the N1c v3 layer."""

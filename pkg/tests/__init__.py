"""Tests for incoherenton-lab"""

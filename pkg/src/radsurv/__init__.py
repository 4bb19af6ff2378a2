"""Slice-level radiomics and classical classifiers for glioma survival-class prediction."""

__version__ = "0.1.0"

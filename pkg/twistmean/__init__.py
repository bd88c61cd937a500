"""Twisted spherical means on annuli of C^n"""
